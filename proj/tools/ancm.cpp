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

// ancm command-line tool: curriculum experiments, the task demonstration,
// the teaching service, and scene dumps.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ancm/agent.hpp"
#include "ancm/curriculum.hpp"
#include "ancm/encode.hpp"
#include "ancm/json_io.hpp"
#include "ancm/service.hpp"

namespace {

using nlohmann::json;

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

int run_experiment(const std::string& kind_name, int trials, int lessons, std::uint64_t seed,
                   const std::string& out_dir) {
  auto kind = ancm::concept_kind_from_string(kind_name);
  if (!kind) throw ancm::ConfigError("--kind must be visual, spatial or action");
  ancm::TrialConfig cfg = ancm::TrialConfig::defaults(*kind);
  if (trials > 0) cfg.trials = trials;
  if (lessons >= 0) cfg.lessons_per_trial = lessons;
  cfg.seed = seed;

  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<ancm::TrialRecord> records = ancm::run_experiment(cfg);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::vector<ancm::CurveRow> rows = ancm::export_curves(records);

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  write_file(dir / "curves.csv", ancm::curves_csv(rows));
  write_file(dir / "curves.json", json{{"kind", kind_name},
                                       {"trials", cfg.trials},
                                       {"lessons_per_trial", cfg.lessons_per_trial},
                                       {"seed", seed},
                                       {"curves", ancm::curves_json(rows)}}
                                      .dump(2));
  for (std::size_t i = 0; i < records.size(); ++i)
    write_file(dir / ("trial_" + std::to_string(i) + "_memory.json"), records[i].memory.dump(2));

  std::cout << ancm::curves_csv(rows);
  std::cout << "# " << cfg.trials << " " << kind_name << " trials in " << secs << " s\n";
  return 0;
}

int demo_react(const std::string& utterance, std::uint64_t seed) {
  const ancm::Vocabulary vocab;
  const json trained = ancm::train_stages(
      {ancm::ConceptKind::visual, ancm::ConceptKind::spatial, ancm::ConceptKind::action}, vocab,
      seed);
  ancm::Agent agent = ancm::agent_from_snapshot(&trained, seed);
  const ancm::SceneSnapshot scene = ancm::task_scene();
  std::cout << "scene:\n";
  for (const ancm::Fact& f : ancm::scene_to_case(scene)) std::cout << "  " << ancm::to_string(f) << '\n';
  const ancm::LessonResponse r = agent.process_lesson({scene, utterance, ancm::Signal::react});
  for (std::size_t i = 0; i < r.projections.size(); ++i) {
    std::cout << "projection " << i + 1 << (r.projections[i].terminal ? " (final):" : ":");
    for (const ancm::Fact& f : r.projections[i].facts) std::cout << ' ' << ancm::to_string(f);
    std::cout << '\n';
  }
  std::cout << "plan:";
  for (const ancm::Action& a : r.plan) std::cout << ' ' << ancm::describe(a);
  std::cout << "\nstatus: " << (r.success ? "success" : "failure") << " (" << r.detail << ")\n";
  return r.success ? 0 : 1;
}

int dump_scene(int objects, std::uint64_t seed, bool facts) {
  std::mt19937_64 rng(seed);
  const ancm::Vocabulary vocab;
  const auto types = vocab.object_types();
  std::uniform_int_distribution<std::size_t> pick(0, types.size() - 1);
  ancm::SceneBuilder b(rng);
  for (int i = 0; i < objects; ++i) b.add(types[pick(rng)]);
  if (facts) {
    std::cout << ancm::write_case(ancm::scene_to_case(b.scene()));
  } else {
    std::cout << ancm::json_io::to_json(b.scene()).dump(2) << '\n';
  }
  return 0;
}

int serve(const std::string& host, int port) {
  ancm::TeachService svc;
  if (!svc.bind(host, port)) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  std::cout << "listening on http://" << host << ":" << port << "/v1\n" << std::flush;
  return svc.listen() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analogical concept memory for an interactive task-learning agent"};
  app.require_subcommand(1);

  std::string kind = "visual", out = "results";
  int trials = 0, lessons = -1;
  std::uint64_t seed = 1;
  auto* exp = app.add_subcommand("run-experiment", "Run seeded curriculum trials and export curves");
  exp->add_option("--kind", kind, "visual, spatial or action")->required();
  exp->add_option("--trials", trials, "Number of trials (default per kind)");
  exp->add_option("--lessons", lessons, "Lessons per trial (default per kind)");
  exp->add_option("--seed", seed, "Base random seed");
  exp->add_option("--out", out, "Output directory");

  std::string utterance = "move blue cone right of red cylinder";
  auto* demo = app.add_subcommand("demo-react", "Train the agent, then act on an instruction");
  demo->add_option("--utterance", utterance, "Instruction to carry out");
  demo->add_option("--seed", seed, "Random seed");

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* srv = app.add_subcommand("serve", "Run the HTTP teaching service");
  srv->add_option("--host", host, "Bind address");
  srv->add_option("--port", port, "Port");

  int objects = 3;
  bool facts = false;
  auto* dump = app.add_subcommand("dump-scene", "Print a random scene as JSON or facts");
  dump->add_option("--objects", objects, "Number of objects");
  dump->add_option("--seed", seed, "Random seed");
  dump->add_flag("--facts", facts, "Print predicate-calculus facts instead of JSON");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*exp) return run_experiment(kind, trials, lessons, seed, out);
    if (*demo) return demo_react(utterance, seed);
    if (*srv) return serve(host, port);
    if (*dump) return dump_scene(objects, seed, facts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
