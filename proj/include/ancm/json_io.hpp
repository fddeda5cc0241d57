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

// JSON forms of scenes, mappings, concept memory snapshots, memory command
// envelopes, lessons and lesson responses.
//
// Facts and terms travel as s-expression strings. Documents that carry facts
// with non-entity symbols include a "lexicon" object (name -> kind) so the
// strings can be read back with their kinds.

#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ancm/agent.hpp"
#include "ancm/errors.hpp"
#include "ancm/fact.hpp"
#include "ancm/generalize.hpp"
#include "ancm/mapping.hpp"
#include "ancm/memory.hpp"
#include "ancm/world.hpp"

namespace ancm::json_io {

using nlohmann::json;

/// Thrown for documents that do not follow the schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw SchemaError(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <typename T>
T get(const json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const json::exception&) {
    throw SchemaError(std::string("field '") + key + "' has the wrong type");
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return get<T>(j, key);
}

}  // namespace detail

// --- Lexicon, facts and cases ------------------------------------------------

inline json to_json(const Lexicon& lex) {
  json j = json::object();
  const Lexicon defaults;
  for (const auto& [name, kind] : lex.declarations()) {
    if (defaults.lookup(name) == kind) continue;
    j[name] = std::string(to_string(kind));
  }
  return j;
}

inline Lexicon lexicon_from_json(const json& j) {
  Lexicon lex;
  if (j.is_null()) return lex;
  if (!j.is_object()) throw SchemaError("lexicon must be an object");
  for (const auto& [name, kind] : j.items()) {
    if (!kind.is_string()) throw SchemaError("lexicon kinds must be strings");
    auto k = kind_from_string(kind.get<std::string>());
    if (!k) throw SchemaError("unknown kind '" + kind.get<std::string>() + "'");
    lex.declare(name, *k);
  }
  return lex;
}

inline json facts_to_json(const Case& c) {
  json j = json::array();
  for (const Fact& f : c) j.push_back(to_string(f));
  return j;
}

inline Case facts_from_json(const json& j, const Lexicon& lex) {
  if (!j.is_array()) throw SchemaError("facts must be an array of strings");
  std::vector<Fact> out;
  for (const json& f : j) {
    if (!f.is_string()) throw SchemaError("facts must be an array of strings");
    try {
      out.push_back(parse_fact(f.get<std::string>(), lex));
    } catch (const ParseError& e) {
      throw SchemaError(e.what());
    }
  }
  return Case(std::move(out));
}

/// {"lexicon": {...}, "facts": [...]}
inline json case_to_json(const Case& c) {
  Lexicon lex;
  lex.declare_all(c);
  return {{"lexicon", to_json(lex)}, {"facts", facts_to_json(c)}};
}

inline Case case_from_json(const json& j, const Lexicon& base = {}) {
  Lexicon lex = base;
  if (j.is_object() && j.contains("lexicon")) {
    for (const auto& [name, kind] : lexicon_from_json(j.at("lexicon")).declarations())
      lex.declare(name, kind);
  }
  return facts_from_json(detail::field(j, "facts"), lex);
}

// --- Scenes ------------------------------------------------------------------

inline json to_json(const WorldObject& o) {
  return {{"id", o.id.name},
          {"shape", std::string(percept_name(o.shape))},
          {"color", std::string(percept_name(o.color))},
          {"x", o.position.x},
          {"y", o.position.y},
          {"w", 2 * o.half_extent.x},
          {"h", 2 * o.half_extent.y},
          {"held", o.held}};
}

template <typename E, std::size_t N>
E enum_from_json(const json& j, const char* key, const std::array<E, N>& all) {
  const std::string s = detail::get<std::string>(j, key);
  for (E e : all)
    if (percept_name(e) == s || word(e) == s) return e;
  if constexpr (std::is_same_v<E, Shape>) {
    if (s == "sphere") return Shape::sphere;
  }
  throw SchemaError("unknown " + std::string(key) + " '" + s + "'");
}

inline WorldObject object_from_json(const json& j) {
  WorldObject o;
  o.id = entity(detail::get<std::string>(j, "id"));
  o.shape = enum_from_json(j, "shape", kShapes);
  o.color = enum_from_json(j, "color", kColors);
  o.position = {detail::get<double>(j, "x"), detail::get<double>(j, "y")};
  o.half_extent = {detail::get_or<double>(j, "w", 6.0) / 2, detail::get_or<double>(j, "h", 6.0) / 2};
  if (!(o.half_extent.x > 0 && o.half_extent.y > 0)) throw SchemaError("w and h must be positive");
  o.held = detail::get_or<bool>(j, "held", false);
  return o;
}

inline json to_json(const SceneSnapshot& s) {
  json objs = json::array();
  for (const WorldObject& o : s.objects) objs.push_back(to_json(o));
  return {{"table",
           {{"x_min", s.table.xmin}, {"y_min", s.table.ymin}, {"x_max", s.table.xmax},
            {"y_max", s.table.ymax}}},
          {"objects", objs}};
}

inline SceneSnapshot scene_from_json(const json& j) {
  SceneSnapshot s;
  if (j.is_object() && j.contains("table")) {
    const json& t = j.at("table");
    s.table = {detail::get<double>(t, "x_min"), detail::get<double>(t, "y_min"),
               detail::get<double>(t, "x_max"), detail::get<double>(t, "y_max")};
    if (!(s.table.xmin < s.table.xmax && s.table.ymin < s.table.ymax))
      throw SchemaError("table bounds are empty");
  }
  const json& objs = detail::field(j, "objects");
  if (!objs.is_array()) throw SchemaError("objects must be an array");
  std::set<Symbol> ids;
  int held = 0;
  for (const json& o : objs) {
    s.objects.push_back(object_from_json(o));
    if (!ids.insert(s.objects.back().id).second)
      throw SchemaError("duplicate object id '" + s.objects.back().id.name + "'");
    held += s.objects.back().held ? 1 : 0;
  }
  if (held > 1) throw SchemaError("at most one object can be held");
  return s;
}

// --- Actions and demonstrations ----------------------------------------------

inline json to_json(const Action& a) {
  struct V {
    json operator()(const action::Point& p) const {
      return {{"type", "point"}, {"object", p.object.name}};
    }
    json operator()(const action::PickUp& p) const {
      return {{"type", "pick-up"}, {"object", p.object.name}};
    }
    json operator()(const action::Place& p) const {
      return {{"type", "place"}, {"x", p.position.x}, {"y", p.position.y}};
    }
  };
  return std::visit(V{}, a);
}

inline Action action_from_json(const json& j) {
  const std::string type = detail::get<std::string>(j, "type");
  if (type == "point") return action::Point{entity(detail::get<std::string>(j, "object"))};
  if (type == "pick-up") return action::PickUp{entity(detail::get<std::string>(j, "object"))};
  if (type == "place")
    return action::Place{{detail::get<double>(j, "x"), detail::get<double>(j, "y")}};
  throw SchemaError("unknown action type '" + type + "'");
}

inline json to_json(const DemoScript& d) {
  json acts = json::array();
  for (const Action& a : d.actions) acts.push_back(to_json(a));
  return {{"initial", to_json(d.initial)}, {"actions", acts}};
}

inline DemoScript demo_from_json(const json& j) {
  DemoScript d;
  d.initial = scene_from_json(detail::field(j, "initial"));
  const json& acts = detail::field(j, "actions");
  if (!acts.is_array()) throw SchemaError("actions must be an array");
  for (const json& a : acts) d.actions.push_back(action_from_json(a));
  return d;
}

// --- Mappings ------------------------------------------------------------------

inline json to_json(const Mapping& m) {
  json cs = json::array();
  for (const Correspondence& c : m.correspondences) {
    json b = json::array();
    for (const auto& [x, y] : c.entity_bindings) b.push_back({to_string(x), to_string(y)});
    cs.push_back({{"base", to_string(c.base_fact)}, {"target", to_string(c.target_fact)},
                  {"bindings", b}});
  }
  json b = json::array();
  for (const auto& [x, y] : m.bindings) b.push_back({to_string(x), to_string(y)});
  json inf = json::array();
  for (const Fact& f : m.candidate_inferences) inf.push_back(to_string(f));
  return {{"score", m.score}, {"correspondences", cs}, {"bindings", b},
          {"candidate_inferences", inf}};
}

// --- Generalization contexts and memory snapshots ------------------------------

inline void declare_context(Lexicon& lex, const GeneralizationContext& ctx) {
  lex.declare(ctx.context_id());
  for (const Generalization& g : ctx.generalizations()) {
    lex.declare_all(g.facts());
    for (const Member& m : g.members) {
      lex.declare_all(m.example);
      for (const auto& [a, b] : m.alignment) {
        visit_all_terms(Fact(predicate("_"), {a, b}), [&](const Term& t) { lex.declare(t.head()); });
      }
    }
  }
  for (const Case& c : ctx.examples()) lex.declare_all(c);
}

/// Context body without a lexicon; see memory snapshots for the lexicon.
inline json context_body(const GeneralizationContext& ctx, double probability_threshold) {
  json gens = json::array();
  for (const Generalization& g : ctx.generalizations()) {
    json facts = json::array();
    for (const auto& [f, n] : g.aligned_count) {
      facts.push_back({{"fact", to_string(f)},
                       {"count", n},
                       {"probability", g.probability(f)},
                       {"in_concept", g.probability(f) >= probability_threshold}});
    }
    json members = json::array();
    for (const Member& m : g.members) {
      json al = json::array();
      for (const auto& [a, b] : m.alignment) al.push_back({to_string(a), to_string(b)});
      members.push_back({{"example", facts_to_json(m.example)}, {"alignment", al}});
    }
    gens.push_back({{"id", g.id},
                    {"example_count", g.example_count},
                    {"next_entity_index", g.next_entity_index},
                    {"facts", facts},
                    {"members", members}});
  }
  json exs = json::array();
  for (const Case& c : ctx.examples()) exs.push_back(facts_to_json(c));
  return {{"concept", ctx.concept_id().name},
          {"context_id", ctx.context_id().name},
          {"next_generalization_id", ctx.next_generalization_id()},
          {"probability_threshold", probability_threshold},
          {"generalizations", gens},
          {"examples", exs}};
}

/// A single context with its own lexicon, e.g. for an inspector view.
inline json to_json(const GeneralizationContext& ctx, double probability_threshold) {
  Lexicon lex;
  declare_context(lex, ctx);
  json j = context_body(ctx, probability_threshold);
  j["lexicon"] = to_json(lex);
  return j;
}

inline void restore_context(GeneralizationContext& ctx, const json& j, const Lexicon& lex) {
  std::vector<Generalization> gens;
  const json& gj = detail::field(j, "generalizations");
  for (const json& g : gj) {
    Generalization out;
    out.id = detail::get<int>(g, "id");
    out.example_count = detail::get<int>(g, "example_count");
    out.next_entity_index = detail::get<int>(g, "next_entity_index");
    for (const json& f : detail::field(g, "facts")) {
      out.aligned_count[parse_fact(detail::get<std::string>(f, "fact"), lex)] =
          detail::get<int>(f, "count");
    }
    for (const json& m : detail::field(g, "members")) {
      Member mem;
      mem.example = facts_from_json(detail::field(m, "example"), lex);
      for (const json& p : detail::field(m, "alignment")) {
        if (!p.is_array() || p.size() != 2) throw SchemaError("alignment entries are pairs");
        mem.alignment.emplace(parse_term(p[0].get<std::string>(), lex),
                              parse_term(p[1].get<std::string>(), lex));
      }
      out.members.push_back(std::move(mem));
    }
    gens.push_back(std::move(out));
  }
  std::vector<Case> exs;
  for (const json& e : detail::field(j, "examples")) exs.push_back(facts_from_json(e, lex));
  ctx.restore(std::move(gens), std::move(exs), detail::get<int>(j, "next_generalization_id"));
}

inline json to_json(const Thresholds& t) {
  return {{"assimilation", t.assimilation}, {"probability", t.probability}, {"match", t.match}};
}

inline Thresholds thresholds_from_json(const json& j) {
  Thresholds t;
  t.assimilation = detail::get_or<double>(j, "assimilation", t.assimilation);
  t.probability = detail::get_or<double>(j, "probability", t.probability);
  t.match = detail::get_or<double>(j, "match", t.match);
  for (double v : {t.assimilation, t.probability, t.match})
    if (!(v > 0 && v <= 1)) throw SchemaError("thresholds must lie in (0,1]");
  return t;
}

/// Everything an agent has learned: the semantic map and every context.
inline json snapshot(const Agent& agent) {
  const ConceptMemory& mem = agent.memory();
  Lexicon lex;
  json concepts = json::array();
  for (const Symbol& c : mem.concepts()) {
    declare_context(lex, mem.context(c));
    json body = context_body(mem.context(c), mem.thresholds().probability);
    concepts.push_back({{"concept", c.name},
                        {"word", mem.word_of(c)},
                        {"kind", std::string(to_string(mem.kind_of(c)))},
                        {"context", body}});
  }
  return {{"format", "ancm-memory/1"},
          {"thresholds", to_json(mem.thresholds())},
          {"counters", {{"create", mem.create_count()}, {"store", mem.store_count()}}},
          {"lexicon", to_json(lex)},
          {"concepts", concepts}};
}

/// Loads a snapshot into a fresh agent.
inline void restore(Agent& agent, const json& j) {
  if (!agent.memory().concepts().empty()) throw SchemaError("snapshot target must be empty");
  const Lexicon lex = lexicon_from_json(detail::field(j, "lexicon"));
  for (const json& c : detail::field(j, "concepts")) {
    const Symbol sym = concept_symbol(detail::get<std::string>(c, "concept"));
    const std::string word = detail::get<std::string>(c, "word");
    auto kind = concept_kind_from_string(detail::get<std::string>(c, "kind"));
    if (!kind) throw SchemaError("unknown concept kind");
    GeneralizationContext& ctx = agent.memory().restore_concept(word, sym, *kind);
    restore_context(ctx, detail::field(c, "context"), lex);
    agent.semantic_map().add(word, sym, *kind);
  }
  if (j.contains("counters")) {
    agent.memory().restore_counters(detail::get<int>(j.at("counters"), "create"),
                                    detail::get<int>(j.at("counters"), "store"));
  }
}

// --- Memory command envelopes ----------------------------------------------------

inline FactPattern pattern_from_string(const std::string& text, const Lexicon& lex) {
  // Variables are atoms starting with '?'.
  Fact f;
  try {
    f = parse_fact(text, lex);
  } catch (const ParseError& e) {
    throw SchemaError(e.what());
  }
  FactPattern p{f.predicate, {}};
  for (const Term& t : f.args) {
    if (t.is_symbol() && !t.head().name.empty() && t.head().name[0] == '?')
      p.args.push_back(Variable{t.head().name.substr(1)});
    else
      p.args.push_back(t);
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
  return p;
}

inline std::string to_string(const FactPattern& p) {
  std::string s = "(" + p.predicate.name;
  for (const PatternArg& a : p.args) {
    s += ' ';
    if (const auto* v = std::get_if<Variable>(&a)) s += "?" + v->name;
    else s += ancm::to_string(std::get<Term>(a));
  }
  return s + ")";
}

/// {"command": "create"|"store"|"query"|"project", ...}
inline MemoryCommand command_from_json(const json& j) {
  const std::string cmd = detail::get<std::string>(j, "command");
  Lexicon lex = j.contains("lexicon") ? lexicon_from_json(j.at("lexicon")) : Lexicon{};
  if (cmd == "create") {
    auto kind = concept_kind_from_string(detail::get_or<std::string>(j, "kind", "visual"));
    if (!kind) throw SchemaError("unknown concept kind");
    return command::Create{detail::get<std::string>(j, "word"), *kind};
  }
  if (cmd == "store" || cmd == "project") {
    const Symbol c = concept_symbol(detail::get<std::string>(j, "concept"));
    lex.declare(c.name, Kind::concept_);
    const Case facts = facts_from_json(detail::field(j, cmd == "store" ? "facts" : "trace"), lex);
    if (cmd == "store") return command::Store{facts, c};
    return command::Project{facts, c};
  }
  if (cmd == "query") {
    const json& pj = detail::field(j, "pattern");
    if (!pj.is_string()) throw SchemaError("pattern must be a string");
    return command::Query{facts_from_json(detail::field(j, "scene"), lex),
                          pattern_from_string(pj.get<std::string>(), lex)};
  }
  throw SchemaError("unknown command '" + cmd + "'");
}

inline json response_to_json(const MemoryResponse& r) {
  struct V {
    json operator()(const Symbol& s) const { return {{"concept", s.name}}; }
    json operator()(const StorageOutcome& o) const {
      return {{"outcome", std::string(to_string(o.kind))},
              {"generalization", o.generalization_id},
              {"score", o.score}};
    }
    json operator()(const QueryResult& q) const {
      auto list = [](const std::vector<ScoredFact>& v) {
        json a = json::array();
        for (const ScoredFact& sf : v) a.push_back({{"fact", ancm::to_string(sf.fact)}, {"score", sf.score}});
        return a;
      };
      return {{"inferences", list(q.inferences)}, {"accepted", list(q.accepted)}};
    }
    json operator()(const NextState& n) const {
      json fs = json::array();
      for (const Fact& f : n.facts) fs.push_back(ancm::to_string(f));
      return {{"facts", fs}, {"terminal", n.terminal}, {"score", n.score},
              {"timepoint", ancm::to_string(n.timepoint)}};
    }
  };
  return std::visit(V{}, r);
}

// --- Lessons -------------------------------------------------------------------

/// {"scenario": scene} or {"demo_script": {...}}, plus "content" and "signal".
inline Lesson lesson_from_json(const json& j) {
  Lesson l;
  l.content = detail::get<std::string>(j, "content");
  auto sig = signal_from_string(detail::get_or<std::string>(j, "signal", "inform"));
  if (!sig) throw SchemaError("signal must be inform, verify or react");
  l.signal = *sig;
  if (j.contains("demo_script")) {
    l.scenario = demo_from_json(j.at("demo_script"));
  } else {
    l.scenario = scene_from_json(detail::field(j, "scenario"));
  }
  return l;
}

inline json to_json(const Lesson& l) {
  json j = {{"content", l.content}, {"signal", std::string(to_string(l.signal))}};
  if (const auto* d = std::get_if<DemoScript>(&l.scenario)) j["demo_script"] = to_json(*d);
  else j["scenario"] = to_json(std::get<SceneSnapshot>(l.scenario));
  return j;
}

inline json to_json(const LessonResponse& r) {
  json j = {{"status", r.success ? "success" : "failure"},
            {"detail", r.detail},
            {"stores", r.stores},
            {"creates", r.creates}};
  json plan = json::array();
  for (const Action& a : r.plan) plan.push_back(to_json(a));
  j["plan"] = plan;
  json proj = json::array();
  for (const NextState& n : r.projections) proj.push_back(response_to_json(MemoryResponse{n}));
  j["projections"] = proj;
  if (r.grounding) {
    json objs = json::object();
    for (const auto& [ref, o] : r.grounding->objects) objs[ref] = o.name;
    json goal = json::array();
    for (const Fact& f : r.grounding->goal) goal.push_back(ancm::to_string(f));
    j["grounding"] = {{"objects", objs}, {"goal", goal}};
  } else {
    j["grounding"] = nullptr;
  }
  if (r.final_scene) j["final_scene"] = to_json(*r.final_scene);
  return j;
}

}  // namespace ancm::json_io
