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

// Symbolic action models and iterative-deepening search toward a projected
// next state, plus grounding of symbolic steps into concrete world actions.

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ancm/encode.hpp"
#include "ancm/errors.hpp"
#include "ancm/fact.hpp"
#include "ancm/world.hpp"

namespace ancm {

/// A ground primitive: preconditions that must be present and absent, and
/// add/delete effects on the qualitative state.
struct ActionModel {
  enum class Primitive { pick_up, place };
  Primitive primitive;
  Symbol object;
  std::vector<Fact> pre;
  std::vector<Fact> pre_absent;
  std::vector<Fact> add;
  std::vector<Fact> del;

  std::string describe() const {
    return (primitive == Primitive::pick_up ? "pick-up(" : "place(") + object.name + ")";
  }

  bool applicable(const Case& state) const {
    for (const Fact& f : pre)
      if (!state.contains(f)) return false;
    for (const Fact& f : pre_absent)
      if (state.contains(f)) return false;
    return true;
  }

  Case apply(const Case& state) const {
    std::vector<Fact> out;
    for (const Fact& f : state)
      if (std::find(del.begin(), del.end(), f) == del.end()) out.push_back(f);
    out.insert(out.end(), add.begin(), add.end());
    return Case(std::move(out));
  }
};

inline bool mentions(const Fact& f, const Symbol& o) {
  return std::any_of(f.args.begin(), f.args.end(),
                     [&](const Term& t) { return t.is_symbol() && t.head() == o; });
}

inline std::optional<QsrKind> qsr_of(const Fact& f) {
  if (f.args.size() != 2) return std::nullopt;
  return qsr_from_string(f.predicate.name);
}

/// The relation facts a goal asks of `o`, closed under converse.
inline std::vector<Fact> placement_effects(const Symbol& o, const std::vector<Fact>& goal) {
  Case out;
  for (const Fact& f : goal) {
    auto k = qsr_of(f);
    if (!k || !mentions(f, o)) continue;
    out.insert(f);
    out.insert(Fact(predicate(std::string(to_string(converse(*k)))), {f.args[1], f.args[0]}));
  }
  return std::vector<Fact>(out.begin(), out.end());
}

/// Ground action models available in `state` for the given objects.
inline std::vector<ActionModel> ground_actions(const Case& state, const std::vector<Symbol>& objects,
                                               const std::vector<Fact>& goal) {
  std::vector<ActionModel> out;
  std::optional<Symbol> held;
  for (const Fact& f : state)
    if (f.predicate.name == names::held && f.args.size() == 1) held = f.args[0].head();
  if (!held) {
    for (const Symbol& o : objects) {
      ActionModel m{ActionModel::Primitive::pick_up, o, {}, {}, {held_fact(o)}, {}};
      for (const Symbol& other : objects) m.pre_absent.push_back(held_fact(other));
      for (const Fact& f : state)
        if (qsr_of(f) && mentions(f, o)) m.del.push_back(f);
      out.push_back(std::move(m));
    }
  } else {
    ActionModel m{ActionModel::Primitive::place, *held, {held_fact(*held)}, {}, {}, {held_fact(*held)}};
    m.add = placement_effects(*held, goal);
    out.push_back(std::move(m));
  }
  return out;
}

inline bool satisfied(const Case& state, const std::vector<Fact>& goal) {
  return std::all_of(goal.begin(), goal.end(), [&](const Fact& f) { return state.contains(f); });
}

/// Shortest sequence of ground actions whose simulated effects make `goal`
/// hold, by iterative deepening up to `max_depth`.
inline std::vector<ActionModel> plan(const Case& state, const std::vector<Symbol>& objects,
                                     const std::vector<Fact>& goal, int max_depth = 4) {
  std::vector<ActionModel> path;
  auto dfs = [&](auto&& self, const Case& s, int depth) -> bool {
    if (satisfied(s, goal)) return true;
    if (depth == 0) return false;
    for (ActionModel& m : ground_actions(s, objects, goal)) {
      if (!m.applicable(s)) continue;
      Case next = m.apply(s);
      path.push_back(std::move(m));
      if (self(self, next, depth - 1)) return true;
      path.pop_back();
    }
    return false;
  };
  for (int d = 0; d <= max_depth; ++d) {
    path.clear();
    if (dfs(dfs, state, d)) return path;
  }
  throw PlanningFailure("no plan of at most " + std::to_string(max_depth) +
                        " primitives reaches the projected state");
}

/// Picks a concrete primitive for a ground model. Placement satisfies every
/// goal relation on the held object and stays clear of all other objects.
inline Action concretize(const ActionModel& m, const SceneSnapshot& scene, std::uint64_t seed) {
  if (m.primitive == ActionModel::Primitive::pick_up) return action::PickUp{m.object};
  std::vector<Constraint> cs;
  std::vector<Symbol> constrained_rcc;
  for (const Fact& f : m.add) {
    auto k = qsr_of(f);
    if (!k || !f.args[0].is_symbol() || f.args[0].head() != m.object) continue;
    const Symbol anchor = f.args[1].head();
    cs.push_back({*k, anchor});
    if (std::holds_alternative<Rcc8>(*k)) constrained_rcc.push_back(anchor);
  }
  for (const WorldObject& o : scene.objects) {
    if (o.id == m.object || o.held) continue;
    if (std::find(constrained_rcc.begin(), constrained_rcc.end(), o.id) == constrained_rcc.end())
      cs.push_back({Rcc8::dc, o.id});
  }
  const WorldObject* held = scene.find(m.object);
  const Vec2 half = held ? held->half_extent : Vec2{3, 3};
  return action::Place{sample_point(cs, half, scene, seed)};
}

}  // namespace ancm
