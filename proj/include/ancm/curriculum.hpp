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

// Randomized teaching trials: inform lessons for one kind of concept, each
// followed by fixed generality and specificity exams, with store counting and
// learning-curve export.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ancm/agent.hpp"
#include "ancm/errors.hpp"
#include "ancm/json_io.hpp"
#include "ancm/world.hpp"

namespace ancm {

struct ObjectType {
  Color color = Color::green;
  Shape shape = Shape::box;
  friend bool operator==(const ObjectType&, const ObjectType&) = default;
};

inline std::string describe(const ObjectType& t) {
  return std::string(word(t.color)) + " " + std::string(word(t.shape));
}

/// Ground truth of the relation words: a CDC direction of the first object
/// with respect to the second, and disconnection.
inline const std::map<std::string, Cdc>& relation_directions() {
  static const std::map<std::string, Cdc> m = {
      {"left of", Cdc::e}, {"right of", Cdc::w}, {"above", Cdc::n}, {"below", Cdc::s}};
  return m;
}

inline Cdc relation_direction(const std::string& rel) {
  auto it = relation_directions().find(rel);
  if (it == relation_directions().end()) throw ConfigError("no ground truth for relation '" + rel + "'");
  return it->second;
}

inline bool relation_holds(const SceneSnapshot& s, const Symbol& a, const Symbol& b,
                           const std::string& rel) {
  const WorldObject* x = s.find(a);
  const WorldObject* y = s.find(b);
  if (!x || !y || x->held || y->held) return false;
  if (compute_rcc8(x->box(), y->box()) != Rcc8::dc) return false;
  const double d = std::hypot(x->position.x - y->position.x, x->position.y - y->position.y);
  if (d < kCentroidEpsilon) return false;
  return compute_cdc(x->position, y->position) == relation_direction(rel);
}

struct Vocabulary {
  std::vector<Color> colors{kColors.begin(), kColors.end()};
  std::vector<Shape> shapes{kShapes.begin(), kShapes.end()};
  std::vector<std::string> relations{"left of", "right of", "above", "below"};
  std::vector<std::string> verbs{"move"};

  std::vector<ObjectType> object_types() const {
    std::vector<ObjectType> out;
    for (Color c : colors)
      for (Shape s : shapes) out.push_back({c, s});
    return out;
  }

  void validate() const {
    if (colors.empty() || shapes.empty()) throw ConfigError("vocabulary needs colors and shapes");
    if (colors.size() * shapes.size() < 2) throw ConfigError("vocabulary needs two object types");
    for (const std::string& r : relations) relation_direction(r);
    for (const std::string& v : verbs)
      if (v != "move") throw ConfigError("unsupported verb '" + v + "'");
    auto dup = [](auto v) {
      std::sort(v.begin(), v.end());
      return std::adjacent_find(v.begin(), v.end()) != v.end();
    };
    if (dup(colors) || dup(shapes) || dup(relations)) throw ConfigError("duplicate vocabulary entry");
  }
};

struct TrialConfig {
  ConceptKind kind = ConceptKind::visual;
  Vocabulary vocabulary;
  int lessons_per_trial = 25;
  int trials = 10;
  int exam_size = 5;
  int max_distractors = 3;
  std::uint64_t seed = 1;

  static TrialConfig defaults(ConceptKind k) {
    TrialConfig c;
    c.kind = k;
    switch (k) {
      case ConceptKind::visual: c.lessons_per_trial = 25; c.trials = 10; break;
      case ConceptKind::spatial: c.lessons_per_trial = 30; c.trials = 10; break;
      case ConceptKind::action: c.lessons_per_trial = 30; c.trials = 5; break;
    }
    return c;
  }

  void validate() const {
    vocabulary.validate();
    if (lessons_per_trial < 0 || trials < 1 || exam_size < 0 || max_distractors < 0)
      throw ConfigError("trial sizes must be nonnegative and trials positive");
    if (kind != ConceptKind::visual && vocabulary.relations.empty())
      throw ConfigError("spatial and action trials need relations");
    if (kind == ConceptKind::action && vocabulary.verbs.empty())
      throw ConfigError("action trials need a verb");
  }
};

struct LessonRecord {
  int lesson = 0;
  int stores = 0;
  int creates = 0;
  int generality = 0;
  int specificity = 0;
};

struct TrialRecord {
  std::uint64_t seed = 0;
  std::vector<LessonRecord> lessons;
  nlohmann::json memory;
};

/// Places objects one by one, each disconnected from all earlier ones.
class SceneBuilder {
 public:
  explicit SceneBuilder(std::mt19937_64& rng) : rng_(rng) {}

  Symbol add(const ObjectType& t, std::vector<Constraint> extra = {}) {
    WorldObject o;
    o.id = entity("o" + std::to_string(scene_.objects.size() + 1));
    o.color = t.color;
    o.shape = t.shape;
    for (const WorldObject& other : scene_.objects) extra.push_back({Rcc8::dc, other.id});
    o.position = sample_point(extra, o.half_extent, scene_, rng_());
    scene_.objects.push_back(o);
    return o.id;
  }

  const SceneSnapshot& scene() const { return scene_; }

 private:
  std::mt19937_64& rng_;
  SceneSnapshot scene_;
};

/// Lesson and exam generation for one trial.
class Curriculum {
 public:
  Curriculum(const TrialConfig& cfg, std::mt19937_64& rng)
      : cfg_(cfg), rng_(rng), types_(cfg.vocabulary.object_types()) {}

  Lesson next_inform() {
    switch (cfg_.kind) {
      case ConceptKind::visual: {
        const ObjectType t = next_type();
        SceneBuilder b(rng_);
        b.add(t);
        return {b.scene(), describe(t), Signal::inform};
      }
      case ConceptKind::spatial: {
        const std::string rel = next_relation();
        auto [ta, tb] = type_pair();
        return {related_scene(ta, tb, relation_direction(rel), 0), content(ta, rel, tb),
                Signal::inform};
      }
      case ConceptKind::action: {
        const std::string rel = next_relation();
        auto [ta, tb] = type_pair();
        return {move_demo(ta, tb, rel, 0), "move " + content(ta, rel, tb), Signal::inform};
      }
    }
    throw ConfigError("unknown concept kind");
  }

  /// A verify lesson whose content is present in the scenario.
  Lesson generality_exam() {
    const int k = distractors();
    switch (cfg_.kind) {
      case ConceptKind::visual: {
        const auto [text, match] = visual_probe();
        const ObjectType target = pick_matching(match, true);
        SceneBuilder b(rng_);
        b.add(target);
        for (int i = 0; i < k; ++i) b.add(random_type());
        return {b.scene(), text, Signal::verify};
      }
      case ConceptKind::spatial: {
        const std::string rel = pick(cfg_.vocabulary.relations);
        auto [ta, tb] = type_pair();
        return {related_scene(ta, tb, relation_direction(rel), k), content(ta, rel, tb),
                Signal::verify};
      }
      case ConceptKind::action: {
        const std::string rel = pick(cfg_.vocabulary.relations);
        auto [ta, tb] = type_pair();
        return {move_demo(ta, tb, rel, k), "move " + content(ta, rel, tb), Signal::verify};
      }
    }
    throw ConfigError("unknown concept kind");
  }

  /// A verify lesson whose content is absent from the scenario.
  Lesson specificity_exam() { return build_specificity_scene(); }

  Lesson build_specificity_scene() {
    const int k = distractors();
    switch (cfg_.kind) {
      case ConceptKind::visual: {
        const auto [text, match] = visual_probe();
        SceneBuilder b(rng_);
        for (int i = 0; i <= k; ++i) b.add(pick_matching(match, false));
        return {b.scene(), text, Signal::verify};
      }
      case ConceptKind::spatial: {
        const std::string rel = pick(cfg_.vocabulary.relations);
        auto [ta, tb] = type_pair();
        for (int attempt = 0;; ++attempt) {
          const Cdc dir = other_direction(relation_direction(rel));
          SceneSnapshot s = related_scene(ta, tb, dir, k);
          if (!any_instance(s, ta, tb, rel)) return {s, content(ta, rel, tb), Signal::verify};
          if (attempt > 100) throw ConfigError("could not build a specificity scene");
        }
      }
      case ConceptKind::action: {
        const std::string rel = pick(cfg_.vocabulary.relations);
        auto [ta, tb] = type_pair();
        for (int attempt = 0;; ++attempt) {
          std::string other = rel;
          if (cfg_.vocabulary.relations.size() > 1) {
            while (other == rel) other = pick(cfg_.vocabulary.relations);
          }
          DemoScript d = move_demo(ta, tb, other, k, relation_direction(rel));
          const DemoView v = record_demonstration(d);
          if (!any_instance(v.scenes.back(), ta, tb, rel))
            return {d, "move " + content(ta, rel, tb), Signal::verify};
          if (attempt > 100) throw ConfigError("could not build a specificity demonstration");
        }
      }
    }
    throw ConfigError("unknown concept kind");
  }

  /// True when some pair of objects of the given types stands in `rel`.
  static bool any_instance(const SceneSnapshot& s, const ObjectType& ta, const ObjectType& tb,
                           const std::string& rel) {
    for (const WorldObject& x : s.objects) {
      if (ObjectType{x.color, x.shape} != ta) continue;
      for (const WorldObject& y : s.objects) {
        if (&x == &y || ObjectType{y.color, y.shape} != tb) continue;
        if (relation_holds(s, x.id, y.id, rel)) return true;
      }
    }
    return false;
  }

 private:
  struct Probe {
    std::string text;
    ObjectType type;
    int form;  // 0: color and shape, 1: color only, 2: shape only
    bool matches(const ObjectType& t) const {
      switch (form) {
        case 1: return t.color == type.color;
        case 2: return t.shape == type.shape;
        default: return t == type;
      }
    }
  };

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
    return v[d(rng_)];
  }

  int distractors() {
    std::uniform_int_distribution<int> d(0, cfg_.max_distractors);
    return d(rng_);
  }

  ObjectType random_type() { return pick(types_); }

  /// Object types in shuffled passes over the whole vocabulary.
  ObjectType next_type() {
    if (deck_.empty()) {
      deck_ = types_;
      std::shuffle(deck_.begin(), deck_.end(), rng_);
    }
    ObjectType t = deck_.back();
    deck_.pop_back();
    return t;
  }

  /// Relations in shuffled blocks, each block covering every relation once.
  std::string next_relation() {
    if (relation_block_.empty()) {
      relation_block_ = cfg_.vocabulary.relations;
      std::shuffle(relation_block_.begin(), relation_block_.end(), rng_);
    }
    std::string r = relation_block_.back();
    relation_block_.pop_back();
    return r;
  }

  std::pair<ObjectType, ObjectType> type_pair() {
    const ObjectType a = random_type();
    ObjectType b = random_type();
    while (b == a) b = random_type();
    return {a, b};
  }

  static std::string content(const ObjectType& a, const std::string& rel, const ObjectType& b) {
    return describe(a) + " " + rel + " " + describe(b);
  }

  std::pair<std::string, Probe> visual_probe() {
    Probe p;
    p.type = random_type();
    std::uniform_int_distribution<int> f(0, 2);
    p.form = f(rng_);
    switch (p.form) {
      case 1: p.text = std::string(word(p.type.color)); break;
      case 2: p.text = std::string(word(p.type.shape)); break;
      default: p.text = describe(p.type); break;
    }
    return {p.text, p};
  }

  ObjectType pick_matching(const Probe& p, bool want) {
    std::vector<ObjectType> pool;
    for (const ObjectType& t : types_)
      if (p.matches(t) == want) pool.push_back(t);
    if (pool.empty()) throw ConfigError("vocabulary too small for the exam");
    return pick(pool);
  }

  Cdc other_direction(Cdc dir) {
    std::vector<Cdc> others;
    for (Cdc c : kCdc)
      if (c != dir) others.push_back(c);
    return pick(others);
  }

  /// `a` (o1) stands in direction `dir` of `b` (o2), disconnected, then `k`
  /// distractors.
  SceneSnapshot related_scene(const ObjectType& ta, const ObjectType& tb, Cdc dir, int k) {
    for (int attempt = 0;; ++attempt) {
      try {
        SceneBuilder b(rng_);
        const Symbol a = b.add(ta);
        b.add(tb, {{converse(dir), a}});
        for (int i = 0; i < k; ++i) b.add(random_type());
        return b.scene();
      } catch (const Unsatisfiable&) {
        if (attempt > 20) throw;
      }
    }
  }

  /// Pick up `a` and put it `rel` of `b`. The start state never already
  /// satisfies the direction in `not_at_start` (defaults to the goal's).
  DemoScript move_demo(const ObjectType& ta, const ObjectType& tb, const std::string& rel, int k,
                       std::optional<Cdc> not_at_start = std::nullopt) {
    const Cdc goal = relation_direction(rel);
    const Cdc avoid = not_at_start.value_or(goal);
    for (int attempt = 0;; ++attempt) {
      try {
        Cdc start = other_direction(avoid);
        while (start == goal) start = other_direction(avoid);
        SceneSnapshot s = related_scene(ta, tb, start, k);
        const Symbol a = s.objects[0].id, b = s.objects[1].id;
        DemoScript d{s, {}};
        d.actions.push_back(action::PickUp{a});
        const SceneSnapshot held = apply_action(s, d.actions.back());
        std::vector<Constraint> cs = {{goal, b}};
        for (const WorldObject& o : held.objects)
          if (!o.held) cs.push_back({Rcc8::dc, o.id});
        d.actions.push_back(action::Place{sample_point(cs, held.objects[0].half_extent, held, rng_())});
        return d;
      } catch (const Unsatisfiable&) {
        if (attempt > 20) throw;
      }
    }
  }

  const TrialConfig& cfg_;
  std::mt19937_64& rng_;
  std::vector<ObjectType> types_;
  std::vector<ObjectType> deck_;
  std::vector<std::string> relation_block_;
};

inline AgentConfig agent_config_for(std::uint64_t seed) {
  AgentConfig a;
  a.seed = seed;
  return a;
}

inline Agent agent_from_snapshot(const nlohmann::json* snapshot, std::uint64_t seed) {
  Agent agent(agent_config_for(seed));
  if (snapshot) json_io::restore(agent, *snapshot);
  return agent;
}

/// Runs one trial: per lesson, one inform lesson then the fixed exams.
inline TrialRecord run_trial(const TrialConfig& cfg, std::uint64_t trial_seed,
                             const nlohmann::json* prerequisites = nullptr) {
  cfg.validate();
  std::mt19937_64 rng(trial_seed);
  Agent agent = agent_from_snapshot(prerequisites, trial_seed);
  Curriculum cur(cfg, rng);
  std::vector<Lesson> general, specific;
  for (int i = 0; i < cfg.exam_size; ++i) general.push_back(cur.generality_exam());
  for (int i = 0; i < cfg.exam_size; ++i) specific.push_back(cur.specificity_exam());

  TrialRecord rec;
  rec.seed = trial_seed;
  for (int l = 1; l <= cfg.lessons_per_trial; ++l) {
    const int stores = agent.memory().store_count();
    const int creates = agent.memory().create_count();
    agent.process_lesson(cur.next_inform());
    LessonRecord lr;
    lr.lesson = l;
    lr.stores = agent.memory().store_count() - stores;
    lr.creates = agent.memory().create_count() - creates;
    for (const Lesson& e : general) lr.generality += agent.process_lesson(e).success ? 1 : 0;
    for (const Lesson& e : specific) lr.specificity += agent.process_lesson(e).success ? 0 : 1;
    rec.lessons.push_back(lr);
  }
  rec.memory = json_io::snapshot(agent);
  return rec;
}

/// Teaches each stage's concepts with inform lessons until a full pass of
/// lessons stores nothing, and returns the memory snapshot.
inline nlohmann::json train_stages(const std::vector<ConceptKind>& stages, const Vocabulary& vocab,
                                   std::uint64_t seed) {
  Agent agent(agent_config_for(seed));
  std::mt19937_64 rng(seed);
  for (ConceptKind k : stages) {
    TrialConfig cfg = TrialConfig::defaults(k);
    cfg.vocabulary = vocab;
    Curriculum cur(cfg, rng);
    const int pass_length = k == ConceptKind::visual
                                ? static_cast<int>(vocab.colors.size() * vocab.shapes.size())
                                : 4 * static_cast<int>(vocab.relations.size());
    bool converged = false;
    for (int pass = 0; pass < 20 && !converged; ++pass) {
      const int before = agent.memory().store_count();
      for (int i = 0; i < pass_length; ++i) agent.process_lesson(cur.next_inform());
      converged = agent.memory().store_count() == before;
    }
    if (!converged) throw ConfigError("training did not converge");
  }
  return json_io::snapshot(agent);
}

/// The concepts a trial kind presupposes: visual for spatial, visual and
/// spatial for action.
inline nlohmann::json train_prerequisites(ConceptKind kind, const Vocabulary& vocab,
                                          std::uint64_t seed) {
  std::vector<ConceptKind> stages;
  if (kind != ConceptKind::visual) stages.push_back(ConceptKind::visual);
  if (kind == ConceptKind::action) stages.push_back(ConceptKind::spatial);
  return train_stages(stages, vocab, seed);
}

/// The tabletop of the task demonstration: a blue cone just east of a red
/// cylinder.
inline SceneSnapshot task_scene() {
  SceneSnapshot s;
  s.objects.push_back({entity("o1"), Shape::cone, Color::blue, {52, 50}, {3, 3}, false});
  s.objects.push_back({entity("o2"), Shape::cylinder, Color::red, {40, 50}, {3, 3}, false});
  return s;
}

inline std::vector<TrialRecord> run_experiment(const TrialConfig& cfg) {
  cfg.validate();
  nlohmann::json prereq;
  const bool needs = cfg.kind != ConceptKind::visual;
  if (needs) prereq = train_prerequisites(cfg.kind, cfg.vocabulary, cfg.seed ^ 0x5eedULL);
  std::vector<TrialRecord> out;
  for (int t = 0; t < cfg.trials; ++t) {
    out.push_back(run_trial(cfg, cfg.seed * 1000 + static_cast<std::uint64_t>(t),
                            needs ? &prereq : nullptr));
  }
  return out;
}

struct CurveRow {
  int lesson = 0;
  double mean_stores = 0;
  double mean_generality = 0;
  double mean_specificity = 0;
};

/// Per-lesson means across trials.
inline std::vector<CurveRow> export_curves(const std::vector<TrialRecord>& records) {
  std::size_t n = 0;
  for (const TrialRecord& r : records) n = std::max(n, r.lessons.size());
  std::vector<CurveRow> rows;
  for (std::size_t i = 0; i < n; ++i) {
    CurveRow row;
    row.lesson = static_cast<int>(i + 1);
    int count = 0;
    for (const TrialRecord& r : records) {
      if (i >= r.lessons.size()) continue;
      ++count;
      row.mean_stores += r.lessons[i].stores;
      row.mean_generality += r.lessons[i].generality;
      row.mean_specificity += r.lessons[i].specificity;
    }
    row.mean_stores /= count;
    row.mean_generality /= count;
    row.mean_specificity /= count;
    rows.push_back(row);
  }
  return rows;
}

inline std::string curves_csv(const std::vector<CurveRow>& rows) {
  std::ostringstream out;
  out << "lesson,mean_stores,mean_generality,mean_specificity\n";
  for (const CurveRow& r : rows)
    out << r.lesson << ',' << r.mean_stores << ',' << r.mean_generality << ',' << r.mean_specificity
        << '\n';
  return out.str();
}

inline nlohmann::json curves_json(const std::vector<CurveRow>& rows) {
  nlohmann::json a = nlohmann::json::array();
  for (const CurveRow& r : rows) {
    a.push_back({{"lesson", r.lesson},
                 {"mean_stores", r.mean_stores},
                 {"mean_generality", r.mean_generality},
                 {"mean_specificity", r.mean_specificity}});
  }
  return a;
}

}  // namespace ancm
