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
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "ancm/mapping.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace ancm {
namespace {

Case red_case(const std::string& body) {
  Lexicon lex;
  return parse_case("(:declare percept CVRed CVCube CVCylinder CVBox)\n"
                    "(:declare concept RRed)\n" + body, lex);
}

TEST(Match, IdenticalCasesScoreOne) {
  const Case a = red_case("(isa o2 CVRed) (isa o2 CVCylinder) (isa o2 RRed)");
  const Mapping m = match(a, a);
  EXPECT_DOUBLE_EQ(m.score, 1.0);
  EXPECT_EQ(m.correspondences.size(), 3u);
  EXPECT_TRUE(m.candidate_inferences.empty());
}

TEST(Match, TwoRedExamples) {
  const Case base = red_case("(isa o2 CVRed) (isa o2 CVCylinder) (isa o2 RRed)");
  const Case target = red_case("(isa o3 CVRed) (isa o3 CVCube) (isa o3 RRed)");
  const Mapping m = match(base, target);
  ASSERT_EQ(m.correspondences.size(), 2u);
  for (const Correspondence& c : m.correspondences) {
    EXPECT_EQ(c.base_fact.args[1], c.target_fact.args[1]);
    ASSERT_EQ(c.entity_bindings.size(), 1u);
    EXPECT_EQ(c.entity_bindings[0].first, Term(entity("o2")));
    EXPECT_EQ(c.entity_bindings[0].second, Term(entity("o3")));
  }
  EXPECT_NEAR(m.score, 2.0 / 3.0, 1e-12);
  ASSERT_EQ(m.candidate_inferences.size(), 1u);
  EXPECT_EQ(m.candidate_inferences[0], red_case("(isa o3 CVCylinder)")[0]);
}

TEST(Match, DisjointCasesScoreZero) {
  const Case a = parse_case("(p a) (r a b)");
  const Case b = parse_case("(q c) (s c d)");
  const Mapping m = match(a, b);
  EXPECT_EQ(m.score, 0.0);
  EXPECT_TRUE(m.correspondences.empty());
  EXPECT_TRUE(m.candidate_inferences.empty());
}

TEST(Match, UnboundTermsAreSkolemized) {
  const Case base = parse_case("(p a) (r a b)");
  const Case target = parse_case("(p x)");
  const Mapping m = match(base, target);
  ASSERT_EQ(m.candidate_inferences.size(), 1u);
  EXPECT_EQ(to_string(m.candidate_inferences[0]), "(r x (:skolem b))");
}

TEST(Match, WeightsScaleScore) {
  const Case base = parse_case("(p a) (q a)");
  const Case target = parse_case("(p x)");
  const std::vector<double> w = {1.0, 0.5};  // canonical order: p, q
  EXPECT_NEAR(match(base, target, w).score, 1.0 / 1.5, 1e-12);
  const std::vector<double> bad = {1.0, 0.0};
  EXPECT_THROW(match(base, target, bad), std::invalid_argument);
  const std::vector<double> short_w = {1.0};
  EXPECT_THROW(match(base, target, short_w), std::invalid_argument);
}

TEST(Match, PreboundBindingsAreRespected) {
  const Case base = parse_case("(p a)");
  const Case target = parse_case("(p x) (p y)");
  MatchOptions opt;
  opt.prebound = {{Term(entity("a")), Term(entity("y"))}};
  const Mapping m = match(base, target, opt);
  ASSERT_EQ(m.correspondences.size(), 1u);
  EXPECT_EQ(m.correspondences[0].target_fact, parse_fact("(p y)"));
}

TEST(Greedy, NoHypothesesGivesEmptySelection) {
  EXPECT_TRUE(greedy_correspondence_search({}, 3, 3, 2, 2).empty());
}

TEST(Greedy, TiesBreakByCanonicalOrder) {
  const Case base = parse_case("(p a)");
  const Case target = parse_case("(p x) (p y)");
  HypothesisSpace hs = local_hypotheses(base, target);
  sort_hypotheses(hs.hypotheses);
  const auto chosen = greedy_correspondence_search(hs, base, target);
  ASSERT_EQ(chosen.size(), 1u);
  EXPECT_EQ(target[hs.hypotheses[chosen[0]].target], parse_fact("(p x)"));
}

TEST(Greedy, HeavierHypothesesFirst) {
  const Case base = parse_case("(p a) (q a)");
  const Case target = parse_case("(p x) (q y)");
  const std::vector<double> w = {0.2, 0.9};
  const Mapping m = match(base, target, w);
  ASSERT_EQ(m.correspondences.size(), 1u);
  EXPECT_EQ(m.correspondences[0].base_fact, parse_fact("(q a)"));
}

TEST(Greedy, SelectionIsMaximal) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    const Case b = testing::random_case(rng, 8, 4, "b");
    const Case t = testing::random_case(rng, 8, 4, "t");
    HypothesisSpace hs = local_hypotheses(b, t);
    sort_hypotheses(hs.hypotheses);
    const auto chosen = greedy_correspondence_search(hs, b, t);
    detail::GreedyState st(hs.base_terms.size(), hs.target_terms.size(), b.size(), t.size());
    for (std::size_t c : chosen) {
      ASSERT_TRUE(st.consistent(hs.hypotheses[c]));
      st.take(hs.hypotheses[c]);
    }
    for (const LocalHypothesis& h : hs.hypotheses) EXPECT_FALSE(st.consistent(h));
  }
}

TEST(MatchProperty, BindingsAreInjectiveAndConsistent) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const Case b = testing::random_case(rng, 10, 5, "b");
    const Case t = testing::random_case(rng, 10, 5, "t");
    const Mapping m = match(b, t);
    std::set<Term> images;
    for (const auto& [from, to] : m.bindings) EXPECT_TRUE(images.insert(to).second);
    std::set<Fact> bases, targets;
    for (const Correspondence& c : m.correspondences) {
      EXPECT_TRUE(bases.insert(c.base_fact).second);
      EXPECT_TRUE(targets.insert(c.target_fact).second);
      const Fact mapped = rewrite(c.base_fact, [&](const Term& x) -> std::optional<Term> {
        return m.bindings.at(x);
      });
      EXPECT_EQ(mapped, c.target_fact);
    }
  }
}

TEST(MatchProperty, ScoreIsBoundedByExhaustiveOptimum) {
  std::mt19937_64 rng(13);
  int optimal = 0;
  const int n = 300;
  for (int i = 0; i < n; ++i) {
    const Case b = testing::random_case(rng, 6, 3, "b");
    const Case t = testing::random_case(rng, 6, 3, "t");
    const double got = match(b, t).score;
    const double best = oracle::exhaustive_best_score(b, t);
    EXPECT_GE(got, 0.0);
    EXPECT_LE(got, best + 1e-12);
    if (got >= best - 1e-12) ++optimal;
  }
  EXPECT_GE(optimal, static_cast<int>(std::ceil(0.95 * n)));
}

TEST(MatchProperty, InferencesAreAnchoredAndNew) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 300; ++i) {
    const Case b = testing::random_case(rng, 8, 4, "b");
    const Case t = testing::random_case(rng, 8, 4, "t");
    const Mapping m = match(b, t);
    std::set<Term> images;
    for (const auto& [from, to] : m.bindings) images.insert(to);
    for (const Fact& f : m.candidate_inferences) {
      EXPECT_FALSE(t.contains(f));
      bool anchored = false;
      visit_terms(f, [&](const Term& x) {
        if (!x.is_bindable()) return;
        if (images.contains(x)) anchored = true;
        else EXPECT_TRUE(x.is_skolem()) << to_string(f);
      });
      EXPECT_TRUE(anchored) << to_string(f);
    }
  }
}

TEST(MatchProperty, SelfMatchIsPerfect) {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 200; ++i) {
    const Case c = testing::random_case(rng, 10, 5, "e");
    EXPECT_DOUBLE_EQ(match(c, c).score, 1.0);
  }
}

}  // namespace
}  // namespace ancm
