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

#include <algorithm>
#include <random>

#include "ancm/json_io.hpp"
#include "trained.hpp"

namespace ancm {
namespace {

using testing::object;
using testing::trained_agent;

bool contains(const std::vector<Fact>& v, const std::string& f) {
  return std::find(v.begin(), v.end(), parse_fact(f)) != v.end();
}

SceneSnapshot scene_of(std::vector<WorldObject> objs) {
  SceneSnapshot s;
  s.objects = std::move(objs);
  return s;
}

const ComprehensionFailure& failure(const Comprehension& c) {
  return std::get<ComprehensionFailure>(c);
}

TEST(Comprehend, FullKnowledgeGroundsBothRefs) {
  const Agent agent = trained_agent(ConceptKind::spatial);
  const Comprehension c =
      agent.comprehend(agent.parse("blue cone left of red cylinder"), task_scene());
  ASSERT_TRUE(std::holds_alternative<Grounding>(c)) << failure(c).detail;
  const Grounding& g = std::get<Grounding>(c);
  EXPECT_EQ(g.objects.at("or1"), entity("o1"));
  EXPECT_EQ(g.objects.at("or2"), entity("o2"));
  EXPECT_TRUE(contains(g.goal, "(e o1 o2)"));
  EXPECT_TRUE(contains(g.goal, "(dc o1 o2)"));
}

TEST(Comprehend, UnknownWord) {
  const Agent agent;
  const Comprehension c = agent.comprehend(agent.parse("red"), task_scene());
  ASSERT_TRUE(std::holds_alternative<ComprehensionFailure>(c));
  EXPECT_EQ(failure(c).reason, FailureReason::unknown_word);
  EXPECT_NE(failure(c).detail.find("red"), std::string::npos);
}

TEST(Comprehend, MissingObjectIsUngrounded) {
  const Agent agent = trained_agent(ConceptKind::visual);
  const SceneSnapshot s = scene_of({object("o1", Color::red, Shape::box, 20, 20),
                                    object("o2", Color::blue, Shape::sphere, 60, 60)});
  const Comprehension c = agent.comprehend(agent.parse("blue cone"), s);
  ASSERT_TRUE(std::holds_alternative<ComprehensionFailure>(c));
  EXPECT_EQ(failure(c).reason, FailureReason::ungrounded_ref);
}

TEST(Comprehend, TwoRefsNeverShareAnObject) {
  const Agent agent = trained_agent(ConceptKind::spatial);
  const SceneSnapshot one = scene_of({object("o1", Color::blue, Shape::cone, 50, 50)});
  EXPECT_TRUE(std::holds_alternative<ComprehensionFailure>(
      agent.comprehend(agent.parse("blue cone left of blue cone"), one)));

  const SceneSnapshot two = scene_of({object("o1", Color::blue, Shape::cone, 30, 50),
                                      object("o2", Color::blue, Shape::cone, 60, 50)});
  const Comprehension c = agent.comprehend(agent.parse("blue cone left of blue cone"), two);
  ASSERT_TRUE(std::holds_alternative<Grounding>(c));
  const Grounding& g = std::get<Grounding>(c);
  EXPECT_NE(g.objects.at("or1"), g.objects.at("or2"));
  EXPECT_TRUE(relation_holds(two, g.objects.at("or1"), g.objects.at("or2"), "left of"));
}

TEST(Inform, RedOnFreshAgent) {
  Agent agent;
  const Lesson l{scene_of({object("o1", Color::red, Shape::cylinder, 50, 50)}), "red",
                 Signal::inform};
  const LessonResponse first = agent.process_lesson(l);
  EXPECT_FALSE(first.success);
  EXPECT_EQ(first.creates, 1);
  EXPECT_EQ(first.stores, 1);
  ASSERT_TRUE(agent.memory().concept_for("red"));
  EXPECT_EQ(agent.memory().concept_for("red")->name, "RRed");

  const LessonResponse second = agent.process_lesson(l);
  EXPECT_TRUE(second.success);
  EXPECT_EQ(second.creates, 0);
  EXPECT_EQ(second.stores, 0);
}

TEST(Inform, OneStorePerUnknownWord) {
  Agent agent;
  const LessonResponse r = agent.process_lesson(
      {scene_of({object("o1", Color::green, Shape::cone, 50, 50)}), "green cone", Signal::inform});
  EXPECT_EQ(r.creates, 2);
  EXPECT_EQ(r.stores, 2);
  const Symbol green = *agent.memory().concept_for("green");
  const Symbol cone = *agent.memory().concept_for("cone");
  EXPECT_TRUE(agent.memory().context(green).examples().front().contains(
      isa(entity("o1"), green)));
  EXPECT_TRUE(agent.memory().context(cone).examples().front().contains(isa(entity("o1"), cone)));
}

TEST(Inform, ActionWithoutDemoIsASignalMismatch) {
  Agent agent = trained_agent(ConceptKind::spatial);
  EXPECT_THROW(agent.process_lesson(
                   {task_scene(), "move blue cone right of red cylinder", Signal::inform}),
               SignalMismatch);
}

// Running an inform lesson a second time in a row never stores.
void check_minimality(ConceptKind kind, Agent agent, std::uint64_t seed, int lessons) {
  TrialConfig cfg = TrialConfig::defaults(kind);
  std::mt19937_64 rng(seed);
  Curriculum cur(cfg, rng);
  for (int i = 0; i < lessons; ++i) {
    const Lesson l = cur.next_inform();
    agent.process_lesson(l);
    const LessonResponse again = agent.process_lesson(l);
    EXPECT_EQ(again.stores, 0) << to_string(kind) << " lesson " << i << ": " << l.content;
    EXPECT_TRUE(again.success) << l.content << ": " << again.detail;
  }
}

TEST(Inform, MinimalityVisual) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) check_minimality(ConceptKind::visual, Agent{}, seed, 25);
}

TEST(Inform, MinimalitySpatial) {
  check_minimality(ConceptKind::spatial, trained_agent(ConceptKind::visual), 5, 30);
}

TEST(Inform, MinimalityAction) {
  check_minimality(ConceptKind::action, trained_agent(ConceptKind::spatial), 5, 20);
}

TEST(Verify, SpecificityCaseFails) {
  Agent agent = trained_agent(ConceptKind::spatial);
  const SceneSnapshot s = scene_of({object("o1", Color::blue, Shape::cone, 40, 50),
                                    object("o2", Color::red, Shape::cylinder, 52, 50)});
  ASSERT_FALSE(relation_holds(s, entity("o1"), entity("o2"), "left of"));
  const LessonResponse r =
      agent.process_lesson({s, "blue cone left of red cylinder", Signal::verify});
  EXPECT_FALSE(r.success);
  EXPECT_TRUE(agent.process_lesson({s, "blue cone right of red cylinder", Signal::verify}).success);
}

TEST(Verify, NeverMutatesMemory) {
  for (ConceptKind kind : {ConceptKind::visual, ConceptKind::spatial, ConceptKind::action}) {
    Agent agent = kind == ConceptKind::visual ? Agent{} : trained_agent(kind);
    if (kind == ConceptKind::visual) {
      agent.process_lesson({scene_of({object("o1", Color::red, Shape::box, 50, 50)}), "red box",
                            Signal::inform});
    }
    TrialConfig cfg = TrialConfig::defaults(kind);
    std::mt19937_64 rng(99);
    Curriculum cur(cfg, rng);
    const nlohmann::json before = json_io::snapshot(agent);
    for (int i = 0; i < 8; ++i) {
      const Lesson g = cur.generality_exam();
      const Lesson s = cur.specificity_exam();
      agent.process_lesson(g);
      agent.process_lesson(s);
    }
    EXPECT_EQ(json_io::snapshot(agent), before) << to_string(kind);
  }
}

DemoScript move_script() {
  SceneSnapshot s = task_scene();
  return {s, {action::PickUp{entity("o1")}, action::Place{{28, 50}}}};
}

TEST(Demonstration, ThreeStates) {
  const DemoView v = record_demonstration(move_script());
  ASSERT_EQ(v.trace.episodes.size(), 3u);
  EXPECT_EQ(v.trace.start, timepoint_at(0));
  EXPECT_EQ(v.trace.final_, timepoint_at(2));
  EXPECT_TRUE(v.trace_case.contains(start_fact(timepoint_at(0))));
  EXPECT_TRUE(v.trace_case.contains(parse_fact("(after T1 T0)")));
  EXPECT_TRUE(v.trace_case.contains(parse_fact("(final T2 T1)")));
  EXPECT_TRUE(v.trace_case.contains(parse_fact("(H T2 (w o1 o2))")));
  EXPECT_TRUE(v.trace_case.contains(parse_fact("(isa o1 CVBlue)", percept_lexicon())));
}

TEST(Demonstration, HeldOnlyInTheMiddle) {
  const DemoView v = record_demonstration(move_script());
  const Fact held = held_fact(entity("o1"));
  auto has = [&](std::size_t i) {
    const auto& fs = v.trace.episodes[i].state;
    return std::find(fs.begin(), fs.end(), held) != fs.end();
  };
  EXPECT_FALSE(has(0));
  EXPECT_TRUE(has(1));
  EXPECT_FALSE(has(2));
}

TEST(Demonstration, ZeroActionsGiveOneEpisode) {
  const DemoView v = record_demonstration({task_scene(), {}});
  ASSERT_EQ(v.trace.episodes.size(), 1u);
  EXPECT_EQ(v.trace.start, v.trace.final_);
}

TEST(Demonstration, PropagatesActionErrors) {
  EXPECT_THROW(record_demonstration({task_scene(), {action::Place{{10, 10}}}}),
               PreconditionViolated);
}

TEST(React, TaskDemonstration) {
  Agent agent = trained_agent(ConceptKind::action);
  const LessonResponse r =
      agent.process_lesson({task_scene(), "move blue cone right of red cylinder", Signal::react});
  ASSERT_TRUE(r.success) << r.detail;
  ASSERT_EQ(r.plan.size(), 2u);
  EXPECT_EQ(std::get<action::PickUp>(r.plan[0]).object, entity("o1"));
  EXPECT_TRUE(std::holds_alternative<action::Place>(r.plan[1]));
  ASSERT_EQ(r.projections.size(), 2u);
  EXPECT_EQ(r.projections[0].facts, std::vector<Fact>{held_fact(entity("o1"))});
  EXPECT_FALSE(r.projections[0].terminal);
  EXPECT_TRUE(contains(r.projections[1].facts, "(w o1 o2)"));
  EXPECT_TRUE(contains(r.projections[1].facts, "(dc o1 o2)"));
  EXPECT_TRUE(r.projections[1].terminal);
  ASSERT_TRUE(r.final_scene);
  EXPECT_TRUE(facts_hold(*r.final_scene, {parse_fact("(w o1 o2)"), parse_fact("(dc o1 o2)")}));
}

TEST(React, GoalAlreadySatisfiedStillPicksUpAndPlaces) {
  Agent agent = trained_agent(ConceptKind::action);
  const SceneSnapshot s = scene_of({object("o1", Color::blue, Shape::cone, 28, 50),
                                    object("o2", Color::red, Shape::cylinder, 40, 50)});
  ASSERT_TRUE(relation_holds(s, entity("o1"), entity("o2"), "right of"));
  const LessonResponse r =
      agent.process_lesson({s, "move blue cone right of red cylinder", Signal::react});
  ASSERT_TRUE(r.success) << r.detail;
  ASSERT_EQ(r.plan.size(), 2u);
  EXPECT_TRUE(std::holds_alternative<action::PickUp>(r.plan[0]));
  EXPECT_TRUE(std::holds_alternative<action::Place>(r.plan[1]));
}

TEST(React, UnknownActionFailsWithoutMutation) {
  Agent agent = trained_agent(ConceptKind::spatial);
  const nlohmann::json before = json_io::snapshot(agent);
  const LessonResponse r =
      agent.process_lesson({task_scene(), "move blue cone right of red cylinder", Signal::react});
  EXPECT_FALSE(r.success);
  EXPECT_TRUE(r.plan.empty());
  ASSERT_TRUE(r.final_scene);
  EXPECT_EQ(*r.final_scene, task_scene());
  EXPECT_EQ(json_io::snapshot(agent), before);
}

TEST(React, NeedsAnActionUtterance) {
  Agent agent = trained_agent(ConceptKind::spatial);
  EXPECT_THROW(agent.process_lesson({task_scene(), "blue cone", Signal::react}), SignalMismatch);
}

TEST(React, PlansAlwaysReachTheGoal) {
  Agent agent = trained_agent(ConceptKind::action);
  TrialConfig cfg = TrialConfig::defaults(ConceptKind::action);
  std::mt19937_64 rng(2024);
  Curriculum cur(cfg, rng);
  for (int i = 0; i < 16; ++i) {
    const Lesson demo = cur.generality_exam();
    const SceneSnapshot start = std::get<DemoScript>(demo.scenario).initial;
    const LessonResponse r = agent.process_lesson({start, demo.content, Signal::react});
    ASSERT_TRUE(r.success) << demo.content << ": " << r.detail;
    ASSERT_TRUE(r.grounding);
    EXPECT_TRUE(facts_hold(*r.final_scene, r.grounding->goal)) << demo.content;
    const Symbol a = r.grounding->objects.at("or1"), b = r.grounding->objects.at("or2");
    const std::string rel = agent.parse(demo.content).act_refs.front().relation;
    EXPECT_TRUE(relation_holds(*r.final_scene, a, b, rel)) << demo.content;
  }
}

TEST(React, Deterministic) {
  auto run = [] {
    Agent agent = trained_agent(ConceptKind::action, 3);
    return agent.process_lesson({task_scene(), "move blue cone right of red cylinder", Signal::react});
  };
  const LessonResponse a = run(), b = run();
  EXPECT_EQ(a.plan, b.plan);
  EXPECT_EQ(a.final_scene, b.final_scene);
}

}  // namespace
}  // namespace ancm
