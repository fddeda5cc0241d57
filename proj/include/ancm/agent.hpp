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

// The teachable agent: comprehension of templated utterances against a scene,
// lesson processing with active learning, demonstration tracing, and
// projection-driven action execution.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ancm/encode.hpp"
#include "ancm/errors.hpp"
#include "ancm/fact.hpp"
#include "ancm/language.hpp"
#include "ancm/memory.hpp"
#include "ancm/planner.hpp"
#include "ancm/world.hpp"

namespace ancm {

enum class Signal { inform, verify, react };

inline std::string_view to_string(Signal s) {
  switch (s) {
    case Signal::inform: return "inform";
    case Signal::verify: return "verify";
    case Signal::react: return "react";
  }
  return "inform";
}

inline std::optional<Signal> signal_from_string(std::string_view s) {
  for (Signal x : {Signal::inform, Signal::verify, Signal::react})
    if (to_string(x) == s) return x;
  return std::nullopt;
}

/// A scripted demonstration: primitive actions applied to an initial scene.
struct DemoScript {
  SceneSnapshot initial;
  std::vector<Action> actions;
};

using Scenario = std::variant<SceneSnapshot, DemoScript>;

struct Lesson {
  Scenario scenario;
  std::string content;
  Signal signal = Signal::inform;
};

struct Grounding {
  /// Object-ref id -> scene object.
  std::map<std::string, Symbol> objects;
  /// Conjunction of qualitative relations asserted by rel/act refs.
  std::vector<Fact> goal;
};

enum class FailureReason { unknown_word, ungrounded_ref, unsatisfied_relation, unsatisfied_action };

inline std::string_view to_string(FailureReason r) {
  switch (r) {
    case FailureReason::unknown_word: return "unknown-word";
    case FailureReason::ungrounded_ref: return "ungrounded-ref";
    case FailureReason::unsatisfied_relation: return "unsatisfied-relation";
    case FailureReason::unsatisfied_action: return "unsatisfied-action";
  }
  return "unknown-word";
}

struct ComprehensionFailure {
  FailureReason reason;
  std::string detail;
};

using Comprehension = std::variant<Grounding, ComprehensionFailure>;

struct LessonResponse {
  bool success = false;
  std::string detail;
  int stores = 0;
  int creates = 0;
  std::optional<Grounding> grounding;
  std::vector<Action> plan;
  /// Next states returned by each projection during execution.
  std::vector<NextState> projections;
  std::optional<SceneSnapshot> final_scene;
};

/// A recorded demonstration as the agent sees it: the trace case with the
/// objects' visual facts, and the scenes at each timepoint.
struct DemoView {
  EpisodicTrace trace;
  Case trace_case;
  std::vector<SceneSnapshot> scenes;
};

struct AgentConfig {
  Thresholds thresholds;
  int max_plan_depth = 4;
  int max_projections = 8;
  std::uint64_t seed = 0;
};

inline Symbol timepoint_at(std::size_t i) { return timepoint("T" + std::to_string(i)); }

/// Qualitative states before, between and after the script's actions.
inline DemoView record_demonstration(const DemoScript& script) {
  DemoView v;
  v.scenes.push_back(script.initial);
  for (const Action& a : script.actions) v.scenes.push_back(apply_action(v.scenes.back(), a));
  for (std::size_t i = 0; i < v.scenes.size(); ++i)
    v.trace.episodes.push_back({timepoint_at(i), state_facts(v.scenes[i])});
  v.trace.start = v.trace.episodes.front().time;
  v.trace.final_ = v.trace.episodes.back().time;
  v.trace_case = trace_to_case(v.trace);
  for (const Fact& f : visual_facts(script.initial)) v.trace_case.insert(f);
  return v;
}

/// Visual facts of `o` plus the concept tag `(isa o C)`.
inline Case visual_example(const SceneSnapshot& scene, const Symbol& o, const Symbol& c) {
  Case out;
  for (const Fact& f : visual_facts(scene))
    if (f.args[0].head() == o) out.insert(f);
  out.insert(isa(o, c));
  return out;
}

/// Both objects' visual facts, the relations between them, and `(C a b)`.
inline Case spatial_example(const SceneSnapshot& scene, const Symbol& a, const Symbol& b,
                            const Symbol& c) {
  Case out;
  for (const Fact& f : visual_facts(scene)) {
    const Symbol& o = f.args[0].head();
    if (o == a || o == b) out.insert(f);
  }
  for (const QSRelation& r : extract_relations(scene)) {
    if ((r.a == a && r.b == b) || (r.a == b && r.b == a)) out.insert(r.to_fact());
  }
  out.insert(Fact(predicate(c.name), {Term(a), Term(b)}));
  return out;
}

inline Fact concept_tag(const Symbol& c, const Symbol& a, const Symbol& b) {
  return Fact(predicate(c.name), {Term(a), Term(b)});
}

class Agent {
 public:
  explicit Agent(AgentConfig cfg = {}) : cfg_(cfg), memory_(cfg.thresholds) {}

  const ConceptMemory& memory() const { return memory_; }
  ConceptMemory& memory() { return memory_; }
  const SemanticMap& semantic_map() const { return semantic_; }
  SemanticMap& semantic_map() { return semantic_; }
  const TemplateParser& parser() const { return parser_; }
  const AgentConfig& config() const { return cfg_; }

  ParseResult parse(std::string_view content) const { return parser_.parse(content); }

  /// Creates a concept and records it in the semantic map.
  Symbol learn_word(const std::string& word, ConceptKind kind) {
    const Symbol c = memory_.create(word, kind);
    semantic_.add(word, c, kind);
    return c;
  }

  /// Grounds every reference in the scene. With a demonstration, act-refs are
  /// checked against the recorded trace and the final scene.
  Comprehension comprehend(const ParseResult& p, const SceneSnapshot& scene,
                           const DemoView* demo = nullptr) const {
    Resolver r(*this, scene, demo);
    return r.run(p);
  }

  LessonResponse process_lesson(const Lesson& lesson) {
    ++lesson_counter_;
    const ParseResult p = parse(lesson.content);
    std::optional<DemoView> demo;
    SceneSnapshot scene;
    if (const auto* d = std::get_if<DemoScript>(&lesson.scenario)) {
      demo = record_demonstration(*d);
      scene = d->initial;
    } else {
      scene = std::get<SceneSnapshot>(lesson.scenario);
    }
    switch (lesson.signal) {
      case Signal::inform: return inform(p, scene, demo ? &*demo : nullptr);
      case Signal::verify: return verify(p, scene, demo ? &*demo : nullptr);
      case Signal::react: return react(p, scene);
    }
    return {};
  }

  /// Repeatedly projects the action concept over the trace so far, plans
  /// toward the projected state and executes the plan, until the projection
  /// reports the final state.
  LessonResponse execute_action(const Grounding& g, const ActRef& act, SceneSnapshot world) {
    LessonResponse resp;
    const SemanticEntry* e = semantic_.lookup(act.word());
    if (!e) throw std::invalid_argument("no action concept for '" + act.word() + "'");
    const Symbol a = g.objects.at(act.arg1);
    const Symbol b = g.objects.at(act.arg2);
    const Fact tag = concept_tag(e->concept_id, a, b);
    const std::vector<Fact> visual = visual_facts(world);
    std::vector<SceneSnapshot> snapshots{world};
    std::uint64_t seed = cfg_.seed * 1000003u + lesson_counter_ * 7919u;
    bool terminal = false;
    for (int step = 0; step < cfg_.max_projections && !terminal; ++step) {
      EpisodicTrace tr;
      for (std::size_t i = 0; i < snapshots.size(); ++i)
        tr.episodes.push_back({timepoint_at(i), state_facts(snapshots[i])});
      tr.start = tr.episodes.front().time;
      tr.final_ = tr.episodes.back().time;
      Case trace = trace_to_case(tr, false);
      for (const Fact& f : visual) trace.insert(f);
      trace.insert(tag);

      const NextState ns = memory_.project(trace, e->concept_id);
      resp.projections.push_back(ns);
      std::vector<Symbol> objects;
      for (const WorldObject& o : world.objects) objects.push_back(o.id);
      const std::vector<ActionModel> steps =
          plan(Case(state_facts(world)), objects, ns.facts, cfg_.max_plan_depth);
      for (const ActionModel& m : steps) {
        const Action act_now = concretize(m, world, seed++);
        world = apply_action(world, act_now);
        resp.plan.push_back(act_now);
      }
      if (!facts_hold(world, ns.facts))
        throw PlanningFailure("executed plan does not reproduce the projected state");
      snapshots.push_back(world);
      terminal = ns.terminal;
    }
    if (!terminal) throw PlanningFailure("projection never reached a final state");
    resp.final_scene = world;
    resp.success = facts_hold(world, g.goal);
    resp.grounding = g;
    resp.detail = resp.success ? "executed" : "goal not satisfied after execution";
    return resp;
  }

 private:
  /// Per-call comprehension state; query results are cached per concept.
  class Resolver {
   public:
    Resolver(const Agent& agent, const SceneSnapshot& scene, const DemoView* demo)
        : agent_(agent), scene_(scene), scene_case_(scene_to_case(scene)), demo_(demo) {
      if (demo_) final_case_ = scene_to_case(demo_->scenes.back());
    }

    Comprehension run(const ParseResult& p) {
      // Words first: the first unknown word is the failure.
      for (const ObjectRef& o : p.object_refs)
        for (const std::string& w : o.properties)
          if (!concept_of(w, ConceptKind::visual)) return fail(FailureReason::unknown_word, w);
      for (const RelRef& r : p.rel_refs)
        if (!concept_of(r.relation, ConceptKind::spatial))
          return fail(FailureReason::unknown_word, r.relation);
      for (const ActRef& a : p.act_refs) {
        if (!concept_of(a.word(), ConceptKind::action))
          return fail(FailureReason::unknown_word, a.word());
        if (!concept_of(a.relation, ConceptKind::spatial))
          return fail(FailureReason::unknown_word, a.relation);
      }

      std::vector<std::vector<Symbol>> cands;
      for (const ObjectRef& o : p.object_refs) {
        cands.push_back(candidates(o));
        if (cands.back().empty()) {
          std::string desc;
          for (const std::string& w : o.properties) desc += (desc.empty() ? "" : " ") + w;
          return fail(FailureReason::ungrounded_ref, desc);
        }
      }

      // Compose: injective assignment satisfying every rel/act constraint.
      std::map<std::string, Symbol> bind;
      std::set<Symbol> used;
      std::optional<FailureReason> last_reason;
      std::string last_detail;
      auto check = [&]() -> bool {
        for (const RelRef& r : p.rel_refs) {
          if (!relation_holds(r.relation, bind.at(r.arg1), bind.at(r.arg2), scene_case_, rel_cache_)) {
            last_reason = FailureReason::unsatisfied_relation;
            last_detail = r.relation;
            return false;
          }
        }
        for (const ActRef& a : p.act_refs) {
          if (!demo_) continue;
          const Symbol x = bind.at(a.arg1), y = bind.at(a.arg2);
          if (!action_holds(a, x, y) ||
              !relation_holds(a.relation, x, y, final_case_, final_cache_)) {
            last_reason = FailureReason::unsatisfied_action;
            last_detail = a.word();
            return false;
          }
        }
        return true;
      };
      auto search = [&](auto&& self, std::size_t k) -> bool {
        if (k == p.object_refs.size()) return check();
        for (const Symbol& o : cands[k]) {
          if (used.contains(o)) continue;
          used.insert(o);
          bind[p.object_refs[k].id] = o;
          if (self(self, k + 1)) return true;
          used.erase(o);
          bind.erase(p.object_refs[k].id);
        }
        return false;
      };
      if (!search(search, 0)) {
        if (!last_reason) return fail(FailureReason::ungrounded_ref, "no distinct referents");
        return fail(*last_reason, last_detail);
      }

      Grounding g;
      g.objects = bind;
      for (const RelRef& r : p.rel_refs) append_goal(g, r.relation, bind.at(r.arg1), bind.at(r.arg2));
      for (const ActRef& a : p.act_refs) append_goal(g, a.relation, bind.at(a.arg1), bind.at(a.arg2));
      return g;
    }

    /// Objects every property concept accepts, in scene order.
    std::vector<Symbol> candidates(const ObjectRef& o) {
      std::vector<Symbol> out;
      for (const WorldObject& obj : scene_.objects) {
        bool all = true;
        for (const std::string& w : o.properties) all = all && accepts_object(w, obj.id);
        if (all) out.push_back(obj.id);
      }
      return out;
    }

    bool accepts_object(const std::string& word, const Symbol& o) {
      auto c = concept_of(word, ConceptKind::visual);
      if (!c) return false;
      auto it = visual_cache_.find(*c);
      if (it == visual_cache_.end()) {
        std::set<Symbol> acc;
        if (!agent_.memory_.context(*c).empty()) {
          FactPattern pat{predicate(std::string(names::isa)), {Variable{"o"}, Term(*c)}};
          for (const ScoredFact& sf : agent_.memory_.query(scene_case_, pat).accepted)
            acc.insert(sf.fact.args[0].head());
        }
        it = visual_cache_.emplace(*c, std::move(acc)).first;
      }
      return it->second.contains(o);
    }

   private:
    using PairCache = std::map<Symbol, std::set<std::pair<Symbol, Symbol>>>;

    std::optional<Symbol> concept_of(const std::string& word, ConceptKind kind) const {
      const SemanticEntry* e = agent_.semantic_.lookup(word);
      if (!e || e->kind != kind) return std::nullopt;
      return e->concept_id;
    }

    std::set<std::pair<Symbol, Symbol>> accepted_pairs(const Symbol& c, const Case& scene) const {
      std::set<std::pair<Symbol, Symbol>> out;
      if (agent_.memory_.context(c).empty()) return out;
      FactPattern pat{predicate(c.name), {Variable{"a"}, Variable{"b"}}};
      for (const ScoredFact& sf : agent_.memory_.query(scene, pat).accepted)
        out.emplace(sf.fact.args[0].head(), sf.fact.args[1].head());
      return out;
    }

    bool relation_holds(const std::string& word, const Symbol& a, const Symbol& b,
                        const Case& scene, PairCache& cache) {
      const Symbol c = *concept_of(word, ConceptKind::spatial);
      auto it = cache.find(c);
      if (it == cache.end()) it = cache.emplace(c, accepted_pairs(c, scene)).first;
      return it->second.contains({a, b});
    }

    bool action_holds(const ActRef& act, const Symbol& a, const Symbol& b) {
      const Symbol c = *concept_of(act.word(), ConceptKind::action);
      auto it = action_cache_.find(c);
      if (it == action_cache_.end()) it = action_cache_.emplace(c, accepted_pairs(c, demo_->trace_case)).first;
      return it->second.contains({a, b});
    }

    void append_goal(Grounding& g, const std::string& word, const Symbol& a, const Symbol& b) const {
      const Symbol c = *concept_of(word, ConceptKind::spatial);
      for (const Fact& f : agent_.relation_definition(c, a, b))
        if (std::find(g.goal.begin(), g.goal.end(), f) == g.goal.end()) g.goal.push_back(f);
    }

    static Comprehension fail(FailureReason r, std::string detail) {
      return ComprehensionFailure{r, std::move(detail)};
    }

    const Agent& agent_;
    const SceneSnapshot& scene_;
    Case scene_case_;
    const DemoView* demo_;
    Case final_case_;
    std::map<Symbol, std::set<Symbol>> visual_cache_;
    PairCache rel_cache_;
    PairCache final_cache_;
    PairCache action_cache_;
  };

 public:
  /// The qualitative relations a spatial concept asserts between `a` and `b`:
  /// the concept facts of its first generalization (or first example) that
  /// relate the two tagged roles.
  std::vector<Fact> relation_definition(const Symbol& c, const Symbol& a, const Symbol& b) const {
    const GeneralizationContext& ctx = memory_.context(c);
    Case base;
    if (!ctx.generalizations().empty()) {
      base = concept_facts(ctx.generalizations().front(), cfg_.thresholds.probability).facts;
    } else if (!ctx.examples().empty()) {
      base = ctx.examples().front();
    }
    const Fact* tag = nullptr;
    for (const Fact& f : base)
      if (f.predicate.name == c.name && f.arity() == 2) tag = &f;
    if (!tag) return {};
    const Term ra = tag->args[0], rb = tag->args[1];
    std::vector<Fact> out;
    for (const Fact& f : base) {
      if (!qsr_of(f)) continue;
      const bool forward = f.args[0] == ra && f.args[1] == rb;
      const bool backward = f.args[0] == rb && f.args[1] == ra;
      if (!forward && !backward) continue;
      out.push_back(rewrite(f, [&](const Term& t) -> std::optional<Term> {
        if (t == ra) return Term(a);
        if (t == rb) return Term(b);
        return t;
      }));
    }
    return out;
  }

 private:
  LessonResponse verify(const ParseResult& p, const SceneSnapshot& scene, const DemoView* demo) const {
    LessonResponse r;
    Comprehension c = comprehend(p, scene, demo);
    if (auto* g = std::get_if<Grounding>(&c)) {
      r.success = true;
      r.grounding = *g;
      r.detail = "grounded";
    } else {
      const auto& f = std::get<ComprehensionFailure>(c);
      r.detail = std::string(to_string(f.reason)) + ": " + f.detail;
    }
    return r;
  }

  LessonResponse react(const ParseResult& p, const SceneSnapshot& scene) {
    if (p.act_refs.empty()) throw SignalMismatch("react lessons need an action utterance");
    LessonResponse r;
    Comprehension c = comprehend(p, scene);
    if (auto* f = std::get_if<ComprehensionFailure>(&c)) {
      r.detail = std::string(to_string(f->reason)) + ": " + f->detail;
      r.final_scene = scene;
      return r;
    }
    try {
      return execute_action(std::get<Grounding>(c), p.act_refs.front(), scene);
    } catch (const NoProjection& e) {
      r.detail = std::string("no-projection: ") + e.what();
    } catch (const PlanningFailure& e) {
      r.detail = std::string("planning-failure: ") + e.what();
    } catch (const Unsatisfiable& e) {
      r.detail = std::string("planning-failure: ") + e.what();
    }
    r.grounding = std::get<Grounding>(c);
    r.final_scene = scene;
    return r;
  }

  /// Active learning: if the content cannot be understood in the scenario,
  /// add whatever examples the failing concepts need.
  LessonResponse inform(const ParseResult& p, const SceneSnapshot& scene, const DemoView* demo) {
    LessonResponse r;
    Comprehension c = comprehend(p, scene, demo);
    if (auto* g = std::get_if<Grounding>(&c)) {
      r.success = true;
      r.grounding = *g;
      r.detail = "understood";
      return r;
    }
    if (!p.act_refs.empty() && !demo)
      throw SignalMismatch("action lessons need a demonstration scenario");

    const int stores_before = memory_.store_count();
    const int creates_before = memory_.create_count();
    auto ensure = [&](const std::string& word, ConceptKind kind) {
      if (const SemanticEntry* e = semantic_.lookup(word)) {
        if (e->kind != kind)
          throw DuplicateConcept("word '" + word + "' already names a " +
                                 std::string(to_string(e->kind)) + " concept");
        return e->concept_id;
      }
      return learn_word(word, kind);
    };
    for (const ObjectRef& o : p.object_refs)
      for (const std::string& w : o.properties) ensure(w, ConceptKind::visual);
    for (const RelRef& rr : p.rel_refs) ensure(rr.relation, ConceptKind::spatial);
    for (const ActRef& a : p.act_refs) {
      ensure(a.relation, ConceptKind::spatial);
      ensure(a.word(), ConceptKind::action);
    }

    // Everything below is judged against memory as it was before storing.
    Resolver res(*this, scene, demo);
    const std::map<std::string, Symbol> ref = referents(p, scene, res);
    std::vector<std::pair<Case, Symbol>> pending;
    for (const ObjectRef& o : p.object_refs) {
      const Symbol obj = ref.at(o.id);
      for (const std::string& w : o.properties) {
        if (!res.accepts_object(w, obj))
          pending.emplace_back(visual_example(scene, obj, semantic_.lookup(w)->concept_id), semantic_.lookup(w)->concept_id);
      }
    }
    for (const RelRef& rr : p.rel_refs) {
      const Symbol rc = semantic_.lookup(rr.relation)->concept_id;
      const Symbol a = ref.at(rr.arg1), b = ref.at(rr.arg2);
      if (!pair_accepted(rc, scene_to_case(scene), a, b))
        pending.emplace_back(spatial_example(scene, a, b, rc), rc);
    }
    for (const ActRef& act : p.act_refs) {
      const Symbol a = ref.at(act.arg1), b = ref.at(act.arg2);
      const SceneSnapshot& last = demo->scenes.back();
      const Symbol rc = semantic_.lookup(act.relation)->concept_id;
      if (!pair_accepted(rc, scene_to_case(last), a, b))
        pending.emplace_back(spatial_example(last, a, b, rc), rc);
      const Symbol ac = semantic_.lookup(act.word())->concept_id;
      if (!pair_accepted(ac, demo->trace_case, a, b)) {
        Case ex = demo->trace_case;
        ex.insert(concept_tag(ac, a, b));
        pending.emplace_back(std::move(ex), ac);
      }
    }
    for (const auto& [ex, concept_id] : pending) memory_.store(ex, concept_id);

    r.success = false;
    r.stores = memory_.store_count() - stores_before;
    r.creates = memory_.create_count() - creates_before;
    const auto& f = std::get<ComprehensionFailure>(c);
    r.detail = std::string(to_string(f.reason)) + ": " + f.detail;
    return r;
  }

  bool pair_accepted(const Symbol& c, const Case& scene, const Symbol& a, const Symbol& b) const {
    if (memory_.context(c).empty()) return false;
    FactPattern pat{predicate(c.name), {Variable{"a"}, Variable{"b"}}};
    const Fact want = concept_tag(c, a, b);
    for (const ScoredFact& sf : memory_.query(scene, pat).accepted)
      if (sf.fact == want) return true;
    return false;
  }

  /// The teacher's intended referents: the injective assignment of object refs
  /// to scene objects that satisfies the most known properties, earliest
  /// objects first on ties.
  static std::map<std::string, Symbol> referents(const ParseResult& p, const SceneSnapshot& scene,
                                                 Resolver& res) {
    if (scene.objects.size() < p.object_refs.size())
      throw UnparseableUtterance("scenario has fewer objects than the utterance mentions");
    std::map<std::string, Symbol> best, cur;
    int best_score = -1;
    std::set<Symbol> used;
    auto go = [&](auto&& self, std::size_t k, int score) -> void {
      if (k == p.object_refs.size()) {
        if (score > best_score) {
          best_score = score;
          best = cur;
        }
        return;
      }
      for (const WorldObject& o : scene.objects) {
        if (used.contains(o.id)) continue;
        int s = 0;
        for (const std::string& w : p.object_refs[k].properties) s += res.accepts_object(w, o.id);
        used.insert(o.id);
        cur[p.object_refs[k].id] = o.id;
        self(self, k + 1, score + s);
        used.erase(o.id);
      }
    };
    go(go, 0, 0);
    return best;
  }

  AgentConfig cfg_;
  ConceptMemory memory_;
  SemanticMap semantic_;
  TemplateParser parser_;
  std::uint64_t lesson_counter_ = 0;
};

}  // namespace ancm
