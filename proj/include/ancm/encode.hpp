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

// Scene snapshots to predicate calculus.

#pragma once

#include <string>
#include <vector>

#include "ancm/fact.hpp"
#include "ancm/world.hpp"

namespace ancm {

inline Fact held_fact(const Symbol& object) {
  return Fact(predicate(std::string(names::held)), {Term(object)});
}

/// `(isa o <color>)` and `(isa o <shape>)` for every object, held or not.
inline std::vector<Fact> visual_facts(const SceneSnapshot& scene) {
  std::vector<Fact> out;
  for (const WorldObject& o : scene.objects) {
    out.push_back(isa(o.id, percept(std::string(percept_name(o.color)))));
    out.push_back(isa(o.id, percept(std::string(percept_name(o.shape)))));
  }
  return out;
}

inline std::vector<Fact> relation_facts(const SceneSnapshot& scene) {
  std::vector<Fact> out;
  for (const QSRelation& r : extract_relations(scene)) out.push_back(r.to_fact());
  return out;
}

/// The qualitative state recorded in episodic traces: spatial relations plus
/// `(held o)` for a grasped object.
inline std::vector<Fact> state_facts(const SceneSnapshot& scene) {
  std::vector<Fact> out = relation_facts(scene);
  if (const WorldObject* h = scene.held_object()) out.push_back(held_fact(h->id));
  return out;
}

inline Case scene_to_case(const SceneSnapshot& scene) {
  std::vector<Fact> facts = visual_facts(scene);
  std::vector<Fact> rel = relation_facts(scene);
  facts.insert(facts.end(), rel.begin(), rel.end());
  return Case(std::move(facts));
}

/// Lexicon with every color and shape percept declared.
inline Lexicon percept_lexicon() {
  Lexicon lex;
  for (Color c : kColors) lex.declare(std::string(percept_name(c)), Kind::percept);
  for (Shape s : kShapes) lex.declare(std::string(percept_name(s)), Kind::percept);
  return lex;
}

/// True when every fact is reproduced by recomputing the scene's state.
inline bool facts_hold(const SceneSnapshot& scene, const std::vector<Fact>& facts) {
  Case now = scene_to_case(scene);
  for (const Fact& f : state_facts(scene)) now.insert(f);
  for (const Fact& f : facts)
    if (!now.contains(f)) return false;
  return true;
}

}  // namespace ancm
