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

#include <random>

#include <gtest/gtest.h>

#include "ancm/encode.hpp"
#include "ancm/fact.hpp"
#include "test_util.hpp"

namespace ancm {
namespace {

SceneSnapshot two_object_scene() {
  SceneSnapshot s;
  s.objects.push_back({entity("o1"), Shape::cone, Color::blue, {52, 50}, {3, 3}, false});
  s.objects.push_back({entity("o2"), Shape::cylinder, Color::red, {40, 50}, {3, 3}, false});
  return s;
}

TEST(SceneToCase, TwoObjectTableScene) {
  const Case c = scene_to_case(two_object_scene());
  const Case expected = parse_case(R"(
    (:declare percept CVBlue CVCone CVRed CVCylinder)
    (isa o1 CVBlue) (isa o1 CVCone) (isa o2 CVRed) (isa o2 CVCylinder)
    (e o1 o2) (dc o1 o2) (w o2 o1) (dc o2 o1))");
  EXPECT_EQ(c, expected);
}

TEST(SceneToCase, EmptyScene) { EXPECT_TRUE(scene_to_case(SceneSnapshot{}).empty()); }

TEST(SceneToCase, SingleObjectHasOnlyIsaFacts) {
  SceneSnapshot s;
  s.objects.push_back({entity("o1"), Shape::box, Color::green, {10, 10}, {3, 3}, false});
  const Case c = scene_to_case(s);
  ASSERT_EQ(c.size(), 2u);
  for (const Fact& f : c) EXPECT_EQ(f.predicate.name, "isa");
}

TEST(SceneToCase, FactCountProperty) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = static_cast<int>(rng() % 6);
    SceneSnapshot s = testing::random_scene(rng, n);
    const Case c = scene_to_case(s);
    const std::size_t pairs = static_cast<std::size_t>(n) * static_cast<std::size_t>(n > 0 ? n - 1 : 0);
    EXPECT_EQ(c.size(), 2u * static_cast<std::size_t>(n) + 2u * pairs);
  }
}

TEST(SceneToCase, DeterministicOrdering) {
  SceneSnapshot s = two_object_scene();
  SceneSnapshot r = s;
  std::swap(r.objects[0], r.objects[1]);
  EXPECT_EQ(write_case(scene_to_case(s)), write_case(scene_to_case(r)));
}

EpisodicTrace move_demo() {
  EpisodicTrace t;
  const Term o1 = entity("o1"), o2 = entity("o2"), big_o1 = entity("O1");
  t.episodes.push_back({timepoint("T0"),
                        {Fact(predicate("dc"), {o1, o2}), Fact(predicate("e"), {o1, o2})}});
  t.episodes.push_back({timepoint("T1"), {Fact(predicate("held"), {big_o1})}});
  t.episodes.push_back({timepoint("T2"), {Fact(predicate("w"), {o1, o2})}});
  t.start = timepoint("T0");
  t.final_ = timepoint("T2");
  return t;
}

TEST(TraceToCase, MoveDemonstration) {
  const Case c = trace_to_case(move_demo());
  const Case expected = parse_case(R"(
    (H T0 (dc o1 o2)) (H T0 (e o1 o2)) (H T1 (held O1)) (H T2 (w o1 o2))
    (:declare time T0)
    (isa T0 start) (after T1 T0) (after T2 T1) (final T2 T1))");
  EXPECT_EQ(c, expected);
  EXPECT_TRUE(c.contains(parse_fact("(H T1 (held O1))")));
  EXPECT_TRUE(c.contains(parse_fact("(final T2 T1)")));
}

TEST(TraceToCase, OneEpisode) {
  EpisodicTrace t;
  t.episodes.push_back({timepoint("T0"), {Fact(predicate("dc"), {entity("a"), entity("b")})}});
  t.start = t.final_ = timepoint("T0");
  const Case c = trace_to_case(t);
  Lexicon lex;
  lex.declare("T0", Kind::time);
  EXPECT_EQ(c, parse_case("(H T0 (dc a b)) (isa T0 start)", lex));
}

TEST(TraceToCase, IdenticalStatesStayDistinct) {
  const Fact dc(predicate("dc"), {entity("a"), entity("b")});
  EpisodicTrace t;
  t.episodes.push_back({timepoint("T0"), {dc}});
  t.episodes.push_back({timepoint("T1"), {dc}});
  t.start = timepoint("T0");
  t.final_ = timepoint("T1");
  Lexicon lex;
  lex.declare("T0", Kind::time);
  // Enumerated by hand: two H facts plus start/after/final scaffolding.
  EXPECT_EQ(trace_to_case(t),
            parse_case("(H T0 (dc a b)) (H T1 (dc a b)) (isa T0 start) (after T1 T0) "
                       "(final T1 T0)",
                       lex));
}

TEST(TraceToCase, MalformedMarkers) {
  EpisodicTrace t = move_demo();
  t.start = timepoint("T1");
  EXPECT_THROW(trace_to_case(t), MalformedTrace);
  t = move_demo();
  t.final_ = timepoint("T1");
  EXPECT_THROW(trace_to_case(t), MalformedTrace);
  EXPECT_THROW(trace_to_case(EpisodicTrace{}), MalformedTrace);
  t = move_demo();
  t.episodes[2].time = timepoint("T0");
  t.final_ = timepoint("T0");
  EXPECT_THROW(trace_to_case(t), MalformedTrace);
}

TEST(TraceToCase, SizeProperty) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    EpisodicTrace t;
    const int n = 1 + static_cast<int>(rng() % 5);
    std::size_t total = 0;
    for (int i = 0; i < n; ++i) {
      Case s = testing::random_case(rng, 5, 3, "o");
      total += s.size();
      t.episodes.push_back({timepoint("T" + std::to_string(i)), s.facts()});
    }
    t.start = t.episodes.front().time;
    t.final_ = t.episodes.back().time;
    // start marker, one after per successor, and a final marker when n >= 2.
    const std::size_t scaffolding = 1 + static_cast<std::size_t>(n - 1) + (n >= 2 ? 1 : 0);
    EXPECT_EQ(trace_to_case(t).size(), total + scaffolding);
  }
}

TEST(Case, DeduplicatesAndSorts) {
  Case c{parse_fact("(b x)"), parse_fact("(a y)"), parse_fact("(b x)")};
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].predicate.name, "a");
  EXPECT_FALSE(c.insert(parse_fact("(a y)")));
}

TEST(Case, EntitiesAreExactlyEntityKindTerms) {
  Lexicon lex;
  lex.declare("CVRed", Kind::percept);
  lex.declare("RRedMt", Kind::concept_);
  const Case c = parse_case("(isa o1 CVRed) (H T0 (dc o1 o2)) (isa (GenEntFn 0 RRedMt) CVRed)", lex);
  const std::vector<Term> ents = c.entities();
  ASSERT_EQ(ents.size(), 2u);
  EXPECT_EQ(ents[0], Term(entity("o1")));
  EXPECT_EQ(ents[1], Term(entity("o2")));
}

TEST(Parse, GenEntFnSlotsAndKinds) {
  Lexicon lex;
  lex.declare("CVRed", Kind::percept);
  const Fact f = parse_fact("(isa (GenEntFn 0 RRedMt) CVRed)", lex);
  ASSERT_TRUE(f.args[0].is_gen_entity());
  EXPECT_EQ(f.args[0].args().size(), 2u);
  EXPECT_EQ(f.args[0].args()[0].head().kind, Kind::literal);
  EXPECT_EQ(f.args[0].args()[1].head().kind, Kind::concept_);
  EXPECT_EQ(f.args[1].head().kind, Kind::percept);
  EXPECT_EQ(f, isa(gen_entity(0, concept_symbol("RRedMt")), percept("CVRed")));
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse_case("(isa o1"), ParseError);
  EXPECT_THROW(parse_case("isa o1)"), ParseError);
  EXPECT_THROW(parse_case("()"), ParseError);
  EXPECT_THROW(parse_case("(:declare flavor x)"), ParseError);
  EXPECT_THROW(parse_fact("(a) (b)"), ParseError);
}

TEST(Parse, CommentsAreIgnored) {
  const Case c = parse_case("; a comment\n(isa o1 x) ; trailing\n\n");
  EXPECT_EQ(c.size(), 1u);
}

Case random_rich_case(std::mt19937_64& rng) {
  Case c = testing::random_case(rng, 6, 3, "o");
  const Symbol ctx = concept_symbol("RThingMt");
  if (rng() % 2) c.insert(isa(gen_entity(static_cast<int>(rng() % 3), ctx), percept("CVRed")));
  if (rng() % 2) c.insert(holds_in(timepoint("T1"), Fact(predicate("held"), {entity("o1")})));
  if (rng() % 2) c.insert(after_fact(skolemize(gen_entity(1, ctx)), timepoint("T0")));
  if (rng() % 2) c.insert(start_fact(timepoint("T0")));
  return c;
}

TEST(Serialization, RoundTripIsIdentity) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const Case c = random_rich_case(rng);
    const std::string text = write_case(c);
    const Case back = parse_case(text);
    EXPECT_EQ(back, c) << text;
    EXPECT_EQ(write_case(back), text);
  }
}

}  // namespace
}  // namespace ancm
