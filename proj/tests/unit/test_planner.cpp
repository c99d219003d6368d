#include <gtest/gtest.h>

#include <filesystem>

#include "meia/error.hpp"
#include "meia/eval.hpp"
#include "meia/planner.hpp"
#include "support.hpp"

using namespace meia;

namespace {

const EvalWorld& world() {
    static const EvalWorld w = build_world(test::cafe_small(), 0);
    return w;
}

// Replies from a fixed list, one per call.
class ListBackend final : public Backend {
public:
    explicit ListBackend(std::vector<std::string> replies) : replies_(std::move(replies)) {}
    std::string name() const override { return "list"; }
    std::string complete(const BackendCall& call) override {
        calls.push_back(call.messages);
        return replies_.at(std::min(next_++, replies_.size() - 1));
    }
    std::vector<std::vector<ChatMessage>> calls;

private:
    std::vector<std::string> replies_;
    std::size_t next_ = 0;
};

}  // namespace

TEST(PlanGrammar, ToleratesFormattingNoise) {
    const Plan p = parse_plan(
        "```\n"
        "# fetch coffee\n"
        "1. move_to(coffee_machine)\n"
        "\n"
        "- make_coffee()\n"
        "* control_ac( \"lower\" )\n"
        "2) control_lighting(on)\n"
        "```\n");
    ASSERT_EQ(p.steps.size(), 4u);
    EXPECT_EQ(p.steps[0], (SkillAction{SkillKind::MoveTo, {"coffee_machine"}}));
    EXPECT_EQ(p.steps[2], (SkillAction{SkillKind::ControlAc, {"lower"}}));
    EXPECT_EQ(render_plan(p.steps), "move_to(coffee_machine)\nmake_coffee()\ncontrol_ac(lower)\ncontrol_lighting(on)\n");
    EXPECT_EQ(parse_plan(render_plan(p.steps)).steps, p.steps);
}

TEST(PlanGrammar, ErrorsCarryLineNumbers) {
    try {
        parse_plan("move_to(kettle)\nfly_away()\n");
        FAIL();
    } catch (const PlanParseError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_NE(e.reason().find("fly_away"), std::string::npos);
    }
    try {
        parse_plan("make_coffee(now)");
        FAIL();
    } catch (const PlanParseError& e) {
        EXPECT_EQ(e.line(), 1);
    }
    EXPECT_THROW(parse_plan("move_to(kettle"), PlanParseError);
    EXPECT_THROW(parse_plan("move_to(a b)"), PlanParseError);
    EXPECT_TRUE(parse_plan("# nothing\n\n").steps.empty());
}

TEST(Planning, RetriesOnceWithTheParseError) {
    ListBackend b({"make coffee please", "move_to(coffee_machine)\nmake_coffee()\n"});
    const auto req = make_planner_request("Make me a cup of coffee.", world().memory, true, true);
    std::vector<PlanAttempt> attempts;
    const Plan p = plan(req, b, &attempts);
    EXPECT_EQ(p.steps.size(), 2u);
    ASSERT_EQ(attempts.size(), 2u);
    EXPECT_FALSE(attempts[0].error.empty());
    EXPECT_TRUE(attempts[1].error.empty());
    ASSERT_EQ(b.calls.size(), 2u);
    EXPECT_GT(b.calls[1].size(), b.calls[0].size());

    ListBackend bad({"nope", "still nope"});
    EXPECT_THROW(plan(req, bad), PlanParseError);
}

TEST(Planning, RequestCarriesMemoryUnlessWithheld) {
    const auto full = make_planner_request("Turn on the lights.", world().memory, true, true);
    EXPECT_FALSE(full.memory.empty());
    EXPECT_FALSE(full.floor_plan_summary.empty());
    const auto none = make_planner_request("Turn on the lights.", world().memory, false, false);
    EXPECT_TRUE(none.memory.empty());
    EXPECT_TRUE(none.floor_plan_summary.empty());
    EXPECT_EQ(none.floor_plan, nullptr);
    const auto msgs = plan_messages(full);
    ASSERT_EQ(msgs.size(), 2u);
    EXPECT_EQ(msgs[0].role, "system");
    EXPECT_NE(msgs[0].content.find("# skill catalog v1"), std::string::npos);
    EXPECT_NE(msgs[1].content.find("Turn on the lights."), std::string::npos);
}

TEST(Planning, ScriptedPlannerGroundsLandmarksInMemory) {
    ScriptedBackend b;
    const auto cases = generate_instructions(3, InstructionLength::Long, 3, world());
    for (const auto& c : cases) {
        const auto req = make_planner_request(c.text, world().memory, true, true);
        EXPECT_EQ(plan(req, b).steps, c.grounding_plan.steps) << c.text;
    }
    const auto req = make_planner_request("Sing me a song.", world().memory, true, true);
    EXPECT_TRUE(plan(req, b).steps.empty());
}

TEST(Backends, HashCoversTaskAndMessagesOnly) {
    BackendCall a;
    a.messages = {{"user", "hello"}};
    BackendCall b = a;
    b.floor_plan = &world().memory.plan();
    EXPECT_EQ(request_hash(a), request_hash(b));
    b.messages[0].content = "hello!";
    EXPECT_NE(request_hash(a), request_hash(b));
    BackendCall c = a;
    c.task = BackendTask::Eqa;
    EXPECT_NE(request_hash(a), request_hash(c));
    EXPECT_EQ(request_hash(a).size(), 64u);
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Backends, RecordedBackendReplaysAndRejectsUnknownRequests) {
    RecordedBackend rec(test::fixture_path("transcripts"));
    BackendCall unknown;
    unknown.messages = {{"user", "not recorded"}};
    EXPECT_THROW(rec.complete(unknown), BackendError);

    const auto dir = std::filesystem::temp_directory_path() / "meia_transcript_test";
    std::filesystem::remove_all(dir);
    write_transcript(dir, unknown, "ANSWER: yes");
    RecordedBackend again(dir);
    EXPECT_EQ(again.complete(unknown), "ANSWER: yes");
    std::filesystem::remove_all(dir);
}

TEST(Backends, FactoryAndRemoteClient) {
    EXPECT_THROW(make_backend("oracle"), BackendError);
    EXPECT_EQ(make_backend("scripted")->name(), "scripted");

    RemoteConfig cfg;
    cfg.endpoint = "http://127.0.0.1:9/v1/chat/completions";
    cfg.api_key = "k";
    cfg.timeout_seconds = 2;
    RemoteBackend remote(cfg);
    BackendCall call;
    call.messages = {{"system", "s"}, {"user", "u"}};
    const auto body = remote.request_body(call);
    EXPECT_EQ(body.at("model"), "gpt-4");
    EXPECT_EQ(body.at("messages").size(), 2u);
    EXPECT_EQ(body.at("temperature"), 0);
    EXPECT_THROW(remote.complete(call), BackendError);

    RemoteConfig bad;
    bad.endpoint = "not a url";
    EXPECT_THROW(RemoteBackend(bad).complete(call), BackendError);
}

TEST(Verdicts, ParseAllThreeForms) {
    const auto a = parse_verdict("ANSWER: Yes.");
    ASSERT_TRUE(std::holds_alternative<EqaAnswer>(a));
    EXPECT_EQ(std::get<EqaAnswer>(a).text, "Yes.");
    const auto p = parse_verdict("  EXPLORE: 2.5, -1\n");
    ASSERT_TRUE(std::holds_alternative<EqaExplore>(p));
    const auto& pt = std::get<Vec3>(std::get<EqaExplore>(p).target);
    EXPECT_DOUBLE_EQ(pt.x, 2.5);
    EXPECT_DOUBLE_EQ(pt.y, -1.0);
    const auto n = parse_verdict("EXPLORE: kettle_4");
    EXPECT_EQ(std::get<std::string>(std::get<EqaExplore>(n).target), "kettle_4");
    EXPECT_THROW(parse_verdict("I think so"), ParseError);
    EXPECT_THROW(parse_verdict("EXPLORE:"), ParseError);
    EXPECT_EQ(render_target(Vec3{1, 2, 0}), "1.00, 2.00");
}

TEST(Verdicts, ViewDescriptionListsVisibleObjects) {
    const auto frames = observe_four_directions(world().scene, world().start);
    bool any = false;
    for (const auto& f : frames) {
        const std::string d = describe_view(f);
        any = any || d.find('_') != std::string::npos;
    }
    EXPECT_TRUE(any);
    WorldScene empty;
    empty.bounds = {0, 0, 5, 5};
    EXPECT_EQ(describe_view(render(empty, RobotState::at(2, 2, 0))), "nothing");
}
