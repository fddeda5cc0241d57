// Copyright 2026 The ancm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// HTTP/JSON teaching service. Each session owns an agent and a world; a
// per-session lock serializes mutating requests and rejects overlapping ones.

#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ancm/agent.hpp"
#include "ancm/errors.hpp"
#include "ancm/json_io.hpp"

namespace ancm {

struct Session {
  std::string id;
  Agent agent;
  SceneSnapshot world;
  std::vector<nlohmann::json> log;
  int lessons = 0;
  int verify_success = 0;
  int verify_failure = 0;
  std::mutex busy;

  explicit Session(std::string sid, AgentConfig cfg) : id(std::move(sid)), agent(cfg) {}
};

/// Changed, added and removed objects between two scenes.
inline nlohmann::json world_diff(const SceneSnapshot& before, const SceneSnapshot& after) {
  nlohmann::json changes = nlohmann::json::array();
  for (const WorldObject& a : after.objects) {
    const WorldObject* b = before.find(a.id);
    if (!b) {
      changes.push_back({{"id", a.id.name}, {"before", nullptr}, {"after", json_io::to_json(a)}});
    } else if (!(*b == a)) {
      changes.push_back(
          {{"id", a.id.name}, {"before", json_io::to_json(*b)}, {"after", json_io::to_json(a)}});
    }
  }
  for (const WorldObject& b : before.objects) {
    if (!after.find(b.id))
      changes.push_back({{"id", b.id.name}, {"before", json_io::to_json(b)}, {"after", nullptr}});
  }
  return changes;
}

class TeachService {
 public:
  TeachService() { routes(); }

  httplib::Server& server() { return server_; }

  /// Binds to an ephemeral port on `host` and returns it.
  int bind_any(const std::string& host = "127.0.0.1") { return server_.bind_to_any_port(host); }
  bool bind(const std::string& host, int port) { return server_.bind_to_port(host, port); }
  bool listen() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() const { server_.wait_until_ready(); }

  std::shared_ptr<Session> session(const std::string& id) {
    std::lock_guard<std::mutex> g(sessions_mu_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
  }

 private:
  using json = nlohmann::json;
  using Handler = std::function<json(Session&, const httplib::Request&, int& status)>;

  static void send(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void error(httplib::Response& res, int status, const std::string& kind,
                    const std::string& msg) {
    send(res, status, {{"error", kind}, {"message", msg}});
  }

  /// Runs `h` on the session named in the path, mapping errors to statuses.
  void with_session(const httplib::Request& req, httplib::Response& res, bool mutating,
                    const Handler& h) {
    std::shared_ptr<Session> s = session(req.matches[1]);
    if (!s) return error(res, 404, "unknown-session", "no session '" + std::string(req.matches[1]) + "'");
    std::unique_lock<std::mutex> lock(s->busy, std::defer_lock);
    if (mutating) {
      if (!lock.try_lock())
        return error(res, 409, "busy", "a lesson is already in flight for this session");
    } else {
      lock.lock();
    }
    try {
      int status = 200;
      json body = h(*s, req, status);
      send(res, status, body);
    } catch (const json::exception& e) {
      error(res, 422, "schema", e.what());
    } catch (const json_io::SchemaError& e) {
      error(res, 422, "schema", e.what());
    } catch (const ParseError& e) {
      error(res, 422, "schema", e.what());
    } catch (const UnparseableUtterance& e) {
      error(res, 422, "unparseable-utterance", e.what());
    } catch (const SignalMismatch& e) {
      error(res, 422, "signal-mismatch", e.what());
    } catch (const PreconditionViolated& e) {
      error(res, 422, "precondition-violated", e.what());
    } catch (const UnknownContext& e) {
      error(res, 404, "unknown-concept", e.what());
    } catch (const Error& e) {
      error(res, 422, "rejected", e.what());
    }
  }

  static json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    return json::parse(req.body);
  }

  json run_lesson(Session& s, Lesson lesson) {
    const SceneSnapshot before = s.world;
    const LessonResponse r = s.agent.process_lesson(lesson);
    if (const auto* d = std::get_if<DemoScript>(&lesson.scenario)) {
      s.world = record_demonstration(*d).scenes.back();
    } else if (lesson.signal == Signal::react && r.final_scene) {
      s.world = *r.final_scene;
    } else {
      s.world = std::get<SceneSnapshot>(lesson.scenario);
    }
    ++s.lessons;
    if (lesson.signal == Signal::verify) ++(r.success ? s.verify_success : s.verify_failure);
    json out = json_io::to_json(r);
    out["world_diff"] = world_diff(before, s.world);
    out["world"] = json_io::to_json(s.world);
    s.log.push_back({{"lesson", s.lessons},
                     {"content", lesson.content},
                     {"signal", std::string(to_string(lesson.signal))},
                     {"status", out["status"]},
                     {"stores", r.stores},
                     {"creates", r.creates}});
    return out;
  }

  void routes() {
    server_.Post("/v1/session", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        const json body = parse_body(req);
        AgentConfig cfg;
        cfg.seed = body.value("seed", std::uint64_t{0});
        if (body.contains("thresholds")) cfg.thresholds = json_io::thresholds_from_json(body["thresholds"]);
        const std::string id = "s" + std::to_string(++next_id_);
        auto s = std::make_shared<Session>(id, cfg);
        if (body.contains("snapshot")) json_io::restore(s->agent, body["snapshot"]);
        if (body.contains("scene")) s->world = json_io::scene_from_json(body["scene"]);
        {
          std::lock_guard<std::mutex> g(sessions_mu_);
          sessions_.emplace(id, s);
        }
        send(res, 201, {{"id", id}});
      } catch (const json::exception& e) {
        error(res, 422, "schema", e.what());
      } catch (const Error& e) {
        error(res, 422, "schema", e.what());
      }
    });

    server_.Put(R"(/v1/session/([^/]+)/scene)", [this](const httplib::Request& req, httplib::Response& res) {
      with_session(req, res, true, [](Session& s, const httplib::Request& r, int&) {
        s.world = json_io::scene_from_json(parse_body(r));
        return json_io::to_json(s.world);
      });
    });

    server_.Post(R"(/v1/session/([^/]+)/lesson)", [this](const httplib::Request& req, httplib::Response& res) {
      with_session(req, res, true, [this](Session& s, const httplib::Request& r, int&) {
        json body = parse_body(r);
        if (!body.is_object()) throw json_io::SchemaError("lesson must be an object");
        if (!body.contains("scenario") && !body.contains("demo_script"))
          body["scenario"] = json_io::to_json(s.world);
        return run_lesson(s, json_io::lesson_from_json(body));
      });
    });

    server_.Post(R"(/v1/session/([^/]+)/demo)", [this](const httplib::Request& req, httplib::Response& res) {
      with_session(req, res, true, [this](Session& s, const httplib::Request& r, int&) {
        const json body = parse_body(r);
        json lesson = {{"content", json_io::detail::get<std::string>(body, "content")},
                       {"signal", body.value("signal", std::string("inform"))},
                       {"demo_script",
                        {{"initial", json_io::to_json(s.world)},
                         {"actions", json_io::detail::field(body, "actions")}}}};
        return run_lesson(s, json_io::lesson_from_json(lesson));
      });
    });

    server_.Get(R"(/v1/session/([^/]+)/memory)", [this](const httplib::Request& req, httplib::Response& res) {
      with_session(req, res, false, [](Session& s, const httplib::Request& r, int&) -> json {
        const ConceptMemory& mem = s.agent.memory();
        if (!r.has_param("concept")) return json_io::snapshot(s.agent);
        const std::string name = r.get_param_value("concept");
        Symbol c = concept_symbol(name);
        if (!mem.has_concept(c)) {
          // Also accept the word, e.g. ?concept=red.
          auto byword = mem.concept_for(name);
          if (!byword) throw UnknownContext("unknown concept " + name);
          c = *byword;
        }
        json j = json_io::to_json(mem.context(c), mem.thresholds().probability);
        j["word"] = mem.word_of(c);
        j["kind"] = std::string(to_string(mem.kind_of(c)));
        return j;
      });
    });

    server_.Get(R"(/v1/session/([^/]+)/metrics)", [this](const httplib::Request& req, httplib::Response& res) {
      with_session(req, res, false, [](Session& s, const httplib::Request&, int&) -> json {
        return {{"lessons", s.lessons},
                {"stores", s.agent.memory().store_count()},
                {"creates", s.agent.memory().create_count()},
                {"verify", {{"success", s.verify_success}, {"failure", s.verify_failure}}},
                {"history", s.log}};
      });
    });

    server_.Get(R"(/v1/session/([^/]+)/scene)", [this](const httplib::Request& req, httplib::Response& res) {
      with_session(req, res, false, [](Session& s, const httplib::Request&, int&) -> json {
        return json_io::to_json(s.world);
      });
    });

    server_.Delete(R"(/v1/session/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      std::shared_ptr<Session> s;
      {
        std::lock_guard<std::mutex> g(sessions_mu_);
        auto it = sessions_.find(req.matches[1]);
        if (it != sessions_.end()) {
          s = it->second;
          sessions_.erase(it);
        }
      }
      if (!s) return error(res, 404, "unknown-session", "no session '" + std::string(req.matches[1]) + "'");
      res.status = 204;
    });
  }

  httplib::Server server_;
  std::mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::atomic<std::uint64_t> next_id_{0};
};

}  // namespace ancm
