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

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ancm/encode.hpp"
#include "ancm/world.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace ancm {
namespace {

TEST(Rcc8, DisjointAndIdentical) {
  const Box a{{10, 10}, {2, 2}}, b{{30, 10}, {2, 2}};
  EXPECT_EQ(compute_rcc8(a, b), Rcc8::dc);
  EXPECT_EQ(compute_rcc8(a, a), Rcc8::eq);
}

TEST(Rcc8, StrictlyInside) {
  const Box outer{{10, 10}, {5, 5}}, inner{{10, 10}, {1, 1}};
  EXPECT_EQ(compute_rcc8(inner, outer), Rcc8::ntpp);
  EXPECT_EQ(compute_rcc8(outer, inner), Rcc8::ntppi);
}

TEST(Rcc8, Tangencies) {
  const Box a{{0, 0}, {1, 1}};
  EXPECT_EQ(compute_rcc8(a, Box{{2, 0}, {1, 1}}), Rcc8::ec);
  EXPECT_EQ(compute_rcc8(a, Box{{2, 2}, {1, 1}}), Rcc8::ec);  // corner contact
  EXPECT_EQ(compute_rcc8(a, Box{{1, 0}, {1, 1}}), Rcc8::po);
  EXPECT_EQ(compute_rcc8(Box{{0.5, 0}, {0.5, 1}}, a), Rcc8::tpp);
}

TEST(Rcc8, RandomizedContainmentMatchesPointSetOracle) {
  std::mt19937_64 rng(19);
  std::uniform_int_distribution<int> c(0, 7), len(1, 5);
  for (int i = 0; i < 2000; ++i) {
    const int ax = c(rng), ay = c(rng), bx = c(rng), by = c(rng);
    const oracle::IntRect a{ax, ay, ax + len(rng), ay + len(rng)};
    const oracle::IntRect b{bx, by, bx + len(rng), by + len(rng)};
    const Rcc8 got = compute_rcc8(oracle::to_box(a), oracle::to_box(b));
    EXPECT_EQ(got, oracle::rcc8_point_sets(a, b));
    EXPECT_EQ(compute_rcc8(oracle::to_box(b), oracle::to_box(a)), converse(got));
  }
}

TEST(Cdc, FirstArgumentRelativeToSecond) {
  EXPECT_EQ(compute_cdc({2, 0}, {0, 0}), Cdc::e);
  EXPECT_EQ(compute_cdc({0, 0}, {2, 0}), Cdc::w);
}

TEST(Cdc, AxisAndDiagonal) {
  EXPECT_EQ(compute_cdc({0, 3}, {0, 0}), Cdc::n);
  EXPECT_EQ(compute_cdc({0, -3}, {0, 0}), Cdc::s);
  EXPECT_EQ(compute_cdc({1, 1}, {0, 0}), Cdc::ne);
  EXPECT_EQ(compute_cdc({-1, 1}, {0, 0}), Cdc::nw);
  EXPECT_EQ(compute_cdc({-1, -1}, {0, 0}), Cdc::sw);
  EXPECT_EQ(compute_cdc({1, -1}, {0, 0}), Cdc::se);
}

TEST(Cdc, BandEdgesBelongToDiagonals) {
  const double t = std::tan(22.5 * M_PI / 180.0);
  // Exactly on the 22.5 degree edge, as represented by the slope sqrt(2)-1.
  EXPECT_EQ(compute_cdc({1, std::sqrt(2.0) - 1.0}, {0, 0}), Cdc::ne);
  EXPECT_EQ(compute_cdc({std::sqrt(2.0) - 1.0, 1}, {0, 0}), Cdc::ne);
  // Just inside the pure bands.
  EXPECT_EQ(compute_cdc({1, t * 0.999}, {0, 0}), Cdc::e);
  EXPECT_EQ(compute_cdc({t * 0.999, 1}, {0, 0}), Cdc::n);
  EXPECT_EQ(compute_cdc({1, t * 1.001}, {0, 0}), Cdc::ne);
}

TEST(Cdc, CoincidentCentroidsAreIndeterminate) {
  EXPECT_THROW(compute_cdc({1, 1}, {1, 1 + 1e-8}), Indeterminate);
}

TEST(Cdc, ConverseIsOppositeOctant) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    EXPECT_EQ(compute_cdc(b, a), converse(compute_cdc(a, b)));
  }
}

SceneSnapshot anchor_scene() {
  SceneSnapshot s;
  s.objects.push_back({entity("o1"), Shape::cone, Color::blue, {20, 20}, {3, 3}, false});
  s.objects.push_back({entity("o2"), Shape::cylinder, Color::red, {50, 50}, {3, 3}, false});
  return s;
}

TEST(SamplePoint, WestAndDisconnected) {
  const SceneSnapshot s = anchor_scene();
  const std::vector<Constraint> cs = {{Cdc::w, entity("o2")}, {Rcc8::dc, entity("o2")}};
  const Vec2 p = sample_point(cs, {3, 3}, s, 42);
  const Box placed{p, {3, 3}};
  EXPECT_EQ(compute_cdc(p, s.find(entity("o2"))->position), Cdc::w);
  EXPECT_EQ(compute_rcc8(placed, s.find(entity("o2"))->box()), Rcc8::dc);
  EXPECT_TRUE(s.table.contains(placed));
  EXPECT_EQ(sample_point(cs, {3, 3}, s, 42), p);  // deterministic per seed
}

TEST(SamplePoint, UnconstrainedIsInBounds) {
  const SceneSnapshot s = anchor_scene();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EXPECT_TRUE(s.table.contains(Box{sample_point({}, {3, 3}, s, seed), {3, 3}}));
  }
}

TEST(SamplePoint, ContradictionIsUnsatisfiable) {
  const SceneSnapshot s = anchor_scene();
  const std::vector<Constraint> cs = {{Rcc8::dc, entity("o2")}, {Rcc8::eq, entity("o2")}};
  EXPECT_THROW(sample_point(cs, {3, 3}, s, 1), Unsatisfiable);
}

TEST(SamplePoint, OutputsRevalidate) {
  std::mt19937_64 rng(23);
  const SceneSnapshot s = anchor_scene();
  for (Cdc dir : kCdc) {
    const std::vector<Constraint> cs = {{dir, entity("o2")}, {Rcc8::dc, entity("o2")}};
    const Vec2 p = sample_point(cs, {3, 3}, s, rng());
    for (const Constraint& c : cs) EXPECT_TRUE(satisfies(Box{p, {3, 3}}, c, s));
  }
}

TEST(ApplyAction, PickUpRemovesRelations) {
  const SceneSnapshot s = anchor_scene();
  const SceneSnapshot held = apply_action(s, action::PickUp{entity("o1")});
  EXPECT_TRUE(held.find(entity("o1"))->held);
  for (const Fact& f : scene_to_case(held)) EXPECT_EQ(f.predicate.name, "isa");
  const std::vector<Fact> st = state_facts(held);
  ASSERT_EQ(st.size(), 1u);
  EXPECT_EQ(st[0], held_fact(entity("o1")));
}

TEST(ApplyAction, Preconditions) {
  const SceneSnapshot s = anchor_scene();
  EXPECT_THROW(apply_action(s, action::Place{{10, 10}}), PreconditionViolated);
  EXPECT_THROW(apply_action(s, action::PickUp{entity("nope")}), PreconditionViolated);
  const SceneSnapshot held = apply_action(s, action::PickUp{entity("o1")});
  EXPECT_THROW(apply_action(held, action::PickUp{entity("o2")}), PreconditionViolated);
  EXPECT_THROW(apply_action(held, action::Place{{1, 1}}), PreconditionViolated);  // off table
  EXPECT_EQ(apply_action(s, action::Point{entity("o1")}), s);
}

TEST(ApplyAction, PickUpThenPlaceClosedLoop) {
  const SceneSnapshot s = anchor_scene();
  const SceneSnapshot held = apply_action(s, action::PickUp{entity("o1")});
  const std::vector<Constraint> cs = {{Cdc::w, entity("o2")}, {Rcc8::dc, entity("o2")}};
  const Vec2 p = sample_point(cs, {3, 3}, held, 9);
  const SceneSnapshot placed = apply_action(held, action::Place{p});
  EXPECT_FALSE(placed.find(entity("o1"))->held);
  EXPECT_TRUE(facts_hold(placed, {parse_fact("(w o1 o2)"), parse_fact("(dc o1 o2)")}));
}

TEST(ApplyAction, IsPure) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 50; ++i) {
    const SceneSnapshot s = testing::random_scene(rng, 3);
    const Action a = action::PickUp{entity("o2")};
    EXPECT_EQ(apply_action(s, a), apply_action(s, a));
  }
}

TEST(ExtractRelations, RecomputationReproducesFacts) {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 100; ++i) {
    const SceneSnapshot s = testing::random_scene(rng, 4);
    for (const QSRelation& r : extract_relations(s)) {
      const WorldObject* a = s.find(r.a);
      const WorldObject* b = s.find(r.b);
      if (const auto* k = std::get_if<Rcc8>(&r.kind)) {
        EXPECT_EQ(*k, compute_rcc8(a->box(), b->box()));
      } else {
        EXPECT_EQ(std::get<Cdc>(r.kind), compute_cdc(a->position, b->position));
      }
    }
  }
}

TEST(CorruptPercepts, ZeroRateIsIdentity) {
  std::mt19937_64 rng(1);
  const SceneSnapshot s = anchor_scene();
  EXPECT_EQ(corrupt_percepts(s, 0.0, rng), s);
  const SceneSnapshot all = corrupt_percepts(s, 1.0, rng);
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    EXPECT_NE(all.objects[i].color, s.objects[i].color);
    EXPECT_NE(all.objects[i].shape, s.objects[i].shape);
  }
}

}  // namespace
}  // namespace ancm
