#include <gtest/gtest.h>

#include "meia/eval.hpp"
#include "meia/skills.hpp"
#include "support.hpp"

using namespace meia;

namespace {

// Tour memory over the fixture cafe, built once.
const EvalWorld& world() {
    static const EvalWorld w = build_world(test::cafe_small(), 0);
    return w;
}

SkillAction act(std::string_view text) {
    const auto open = text.find('(');
    SkillAction a;
    a.kind = *parse_skill_name(text.substr(0, open));
    const std::string_view inner = text.substr(open + 1, text.size() - open - 2);
    if (!inner.empty()) a.args.emplace_back(inner);
    return a;
}

std::int64_t int_of(const WorldScene& s, Category c, const char* key) {
    for (const auto& o : s.objects)
        if (o.category == c) return std::get<std::int64_t>(o.state.at(key));
    return -1;
}

}  // namespace

TEST(Skills, CatalogIsCompleteAndStable) {
    EXPECT_EQ(catalog().size(), 12u);
    for (const auto& s : catalog()) EXPECT_EQ(parse_skill_name(s.name), s.kind);
    EXPECT_TRUE(signature(SkillKind::TakeTowel).derived);
    const std::string text = render_catalog();
    EXPECT_EQ(text.rfind("# skill catalog v1\n", 0), 0u);
    EXPECT_NE(text.find("control_ac(command: raise|lower|on|off)"), std::string::npos);
    EXPECT_EQ(text, render_catalog());
}

TEST(Skills, ArityAndChoicesAreChecked) {
    EXPECT_EQ(check_arity(act("make_coffee()")), "");
    EXPECT_NE(check_arity(act("make_coffee(now)")), "");
    EXPECT_NE(check_arity(act("control_ac(sideways)")), "");
    EXPECT_NE(check_arity(SkillAction{SkillKind::MoveTo, {}}), "");
    EXPECT_EQ(to_string(act("control_ac(lower)")), "control_ac(lower)");

    WorldScene s = world().scene;
    RobotState r = world().start;
    const auto o = execute(act("control_ac(sideways)"), s, r, world().memory);
    EXPECT_FALSE(o.success);
    EXPECT_EQ(o.reason, FailureReason::PreconditionFailed);
}

TEST(Skills, TargetNames) {
    const auto a = parse_target_name("coffee_machine");
    ASSERT_TRUE(a);
    EXPECT_EQ(a->category, Category::CoffeeMachine);
    EXPECT_FALSE(a->id);
    const auto b = parse_target_name("table_12");
    ASSERT_TRUE(b);
    EXPECT_EQ(b->id, 12);
    EXPECT_FALSE(parse_target_name("sofa"));
}

TEST(Skills, MoveNeedsMemoryOfTheTarget) {
    WorldScene s = world().scene;
    RobotState r = world().start;
    const EnvironmentMemory empty(s.bounds);
    const auto o = execute(act("move_to(kettle)"), s, r, empty);
    EXPECT_FALSE(o.success);
    EXPECT_EQ(o.reason, FailureReason::TargetUnknown);
    EXPECT_EQ(r.position(), world().start.position());
}

TEST(Skills, ManipulationNeedsReach) {
    WorldScene s = world().scene;
    RobotState r = world().start;
    const auto far = execute(act("make_coffee()"), s, r, world().memory);
    EXPECT_FALSE(far.success);
    EXPECT_EQ(far.reason, FailureReason::PreconditionFailed);

    const auto move = execute(act("move_to(coffee_machine)"), s, r, world().memory);
    ASSERT_TRUE(move.success) << move.detail;
    EXPECT_GT(move.distance_traveled, 0.0);
    const auto near = execute(act("make_coffee()"), s, r, world().memory);
    ASSERT_TRUE(near.success) << near.detail;
    EXPECT_EQ(int_of(s, Category::CoffeeMachine, "cups_made"), 1);
}

TEST(Skills, WipingNeedsATowel) {
    WorldScene s = world().scene;
    RobotState r = world().start;
    const auto& mem = world().memory;
    ASSERT_TRUE(execute(act("move_to(table)"), s, r, mem).success);
    const auto dry = execute(act("wipe_table()"), s, r, mem);
    EXPECT_FALSE(dry.success);
    EXPECT_EQ(dry.reason, FailureReason::PreconditionFailed);
    ASSERT_TRUE(execute(act("take_towel()"), s, r, mem).success);
    EXPECT_EQ(r.held_item, "towel");
    const auto wet = execute(act("wipe_table()"), s, r, mem);
    EXPECT_TRUE(wet.success) << wet.detail;
}

TEST(Skills, AirConditionerSetpointNeedsPower) {
    WorldScene s = world().scene;
    RobotState r = world().start;
    const auto& mem = world().memory;
    ASSERT_TRUE(execute(act("move_to(air_conditioner)"), s, r, mem).success);
    ASSERT_TRUE(execute(act("control_ac(lower)"), s, r, mem).success);
    EXPECT_EQ(int_of(s, Category::AirConditioner, "setpoint"), 23);
    ASSERT_TRUE(execute(act("control_ac(off)"), s, r, mem).success);
    const auto o = execute(act("control_ac(raise)"), s, r, mem);
    EXPECT_FALSE(o.success);
    EXPECT_EQ(o.reason, FailureReason::PreconditionFailed);
}

TEST(Skills, RepeatedSwitchIsANoOp) {
    WorldScene s = world().scene;
    RobotState r = world().start;
    const auto& mem = world().memory;
    ASSERT_TRUE(execute(act("move_to(light_switch)"), s, r, mem).success);
    const auto first = execute(act("control_lighting(on)"), s, r, mem);
    const auto second = execute(act("control_lighting(on)"), s, r, mem);
    EXPECT_TRUE(first.success);
    EXPECT_FALSE(first.no_op);
    EXPECT_TRUE(second.success);
    EXPECT_TRUE(second.no_op);
}
