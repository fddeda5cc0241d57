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

#include <gtest/gtest.h>

#include "ancm/language.hpp"

namespace ancm {
namespace {

TEST(Parse, ObjectRelationObject) {
  const ParseResult r = TemplateParser().parse("blue cone left of red cylinder");
  ASSERT_EQ(r.object_refs.size(), 2u);
  EXPECT_EQ(r.object_refs[0], (ObjectRef{"or1", {"blue", "cone"}}));
  EXPECT_EQ(r.object_refs[1], (ObjectRef{"or2", {"red", "cylinder"}}));
  ASSERT_EQ(r.rel_refs.size(), 1u);
  EXPECT_EQ(r.rel_refs[0], (RelRef{"left of", "or1", "or2"}));
  EXPECT_TRUE(r.act_refs.empty());
}

TEST(Parse, SingleObject) {
  const ParseResult r = TemplateParser().parse("red cylinder");
  ASSERT_EQ(r.object_refs.size(), 1u);
  EXPECT_EQ(r.object_refs[0].properties, (std::vector<std::string>{"red", "cylinder"}));
  EXPECT_TRUE(r.rel_refs.empty());
  EXPECT_TRUE(r.act_refs.empty());
}

TEST(Parse, Action) {
  const ParseResult r = TemplateParser().parse("move blue cone right of red cylinder");
  ASSERT_EQ(r.act_refs.size(), 1u);
  EXPECT_EQ(r.act_refs[0], (ActRef{"move", "or1", "or2", "right of"}));
  EXPECT_EQ(r.act_refs[0].word(), "move right of");
  EXPECT_TRUE(r.rel_refs.empty());
}

TEST(Parse, SingleWordRelationAndCase) {
  const ParseResult r = TemplateParser().parse("  Green Box ABOVE the purple ball ");
  ASSERT_EQ(r.rel_refs.size(), 1u);
  EXPECT_EQ(r.rel_refs[0].relation, "above");
  EXPECT_EQ(r.object_refs[1].properties, (std::vector<std::string>{"purple", "ball"}));
}

TEST(Parse, UnknownOfRelationPassesThrough) {
  const ParseResult r = TemplateParser().parse("red box north of blue cone");
  ASSERT_EQ(r.rel_refs.size(), 1u);
  EXPECT_EQ(r.rel_refs[0].relation, "north of");
}

TEST(Parse, Errors) {
  const TemplateParser p;
  EXPECT_THROW(p.parse(""), UnparseableUtterance);
  EXPECT_THROW(p.parse("move red box"), UnparseableUtterance);
  EXPECT_THROW(p.parse("move"), UnparseableUtterance);
}

TEST(SemanticMapTest, BidirectionalAndBijective) {
  SemanticMap m;
  m.add("red", concept_symbol("RRed"), ConceptKind::visual);
  ASSERT_NE(m.lookup("red"), nullptr);
  EXPECT_EQ(m.lookup("red")->concept_id, concept_symbol("RRed"));
  EXPECT_EQ(m.lookup(concept_symbol("RRed"))->word, "red");
  EXPECT_EQ(m.lookup("blue"), nullptr);
  EXPECT_THROW(m.add("red", concept_symbol("RRed2"), ConceptKind::visual), DuplicateConcept);
  EXPECT_THROW(m.add("crimson", concept_symbol("RRed"), ConceptKind::visual), DuplicateConcept);
}

}  // namespace
}  // namespace ancm
