#include <gtest/gtest.h>

#include "meia/eqa.hpp"
#include "meia/error.hpp"
#include "meia/planner.hpp"
#include "support.hpp"

using namespace meia;

namespace {

// Two tables, cup + kettle on table 1, bread on table 2.
WorldScene small_cafe() {
    WorldScene s;
    s.bounds = {0, 0, 8, 6};
    test::add_object(s, 1, Category::Table, {2.0, 2.0, 0.375}, {0.4, 0.4, 0.375});
    test::add_object(s, 2, Category::Table, {6.0, 4.0, 0.375}, {0.4, 0.4, 0.375});
    test::add_object(s, 3, Category::Cup, {1.8, 2.0, 0.8}, {0.05, 0.05, 0.05}, 1);
    test::add_object(s, 4, Category::Kettle, {2.2, 2.1, 0.85}, {0.1, 0.1, 0.1}, 1);
    test::add_object(s, 5, Category::Bread, {6.0, 4.0, 0.8}, {0.08, 0.08, 0.05}, 2);
    return s;
}

}  // namespace

TEST(Eqa, FiveTemplatesInThreeTypes) {
    const auto t = question_templates();
    ASSERT_EQ(t.size(), 5u);
    EXPECT_EQ(t[0].type, QuestionType::Location);
    EXPECT_EQ(t[1].type, QuestionType::Location);
    EXPECT_EQ(t[2].type, QuestionType::Comparing);
    EXPECT_EQ(t[3].type, QuestionType::Existence);
    EXPECT_EQ(t[4].type, QuestionType::Existence);
    EXPECT_FALSE(t[0].yes_no);
    for (int k = 1; k < 5; ++k) EXPECT_TRUE(t[static_cast<std::size_t>(k)].yes_no);
    EXPECT_THROW(question_template(6), std::exception);
    EXPECT_EQ(parse_question_type(to_string(QuestionType::Comparing)), QuestionType::Comparing);
}

TEST(Eqa, AffordanceTableResolves) {
    EXPECT_FALSE(affordance_table().empty());
    for (const auto& a : affordance_table()) {
        EXPECT_EQ(find_affordance(a.activity), &a);
        EXPECT_FALSE(a.categories.empty());
    }
    EXPECT_EQ(find_affordance("fly a kite"), nullptr);
}

TEST(Eqa, OracleAnswersHandBuiltScene) {
    const WorldScene s = small_cafe();
    EXPECT_EQ(answer_oracle(s, 1, {{3}, {}, {}}).answer, "kettle");
    EXPECT_EQ(answer_oracle(s, 1, {{5}, {}, {}}).answer, "nothing");
    EXPECT_EQ(answer_oracle(s, 2, {{3, 4}, {}, {}}).answer, "Yes");
    EXPECT_EQ(answer_oracle(s, 2, {{3, 5}, {}, {}}).answer, "No");
    // cup-kettle is about 0.4 m, cup-bread about 4.5 m.
    EXPECT_EQ(answer_oracle(s, 3, {{3, 4, 5}, {}, {}}).answer, "Yes");
    EXPECT_EQ(answer_oracle(s, 3, {{3, 5, 4}, {}, {}}).answer, "No");
    EXPECT_EQ(answer_oracle(s, 4, {{}, Category::Kettle, {}}).answer, "Yes");
    EXPECT_EQ(answer_oracle(s, 4, {{}, Category::Mop, {}}).answer, "No");
    EXPECT_THROW(answer_oracle(s, 2, {{3, 99}, {}, {}}), OracleError);
}

TEST(Eqa, QuestionsParseBack) {
    const WorldScene s = small_cafe();
    const QaBindings b{{3, 4, 5}, {}, {}};
    const std::string q = render_question(s, 3, b);
    EXPECT_EQ(q.find('<'), std::string::npos);
    const auto parsed = parse_question(q);
    ASSERT_TRUE(parsed);
    EXPECT_EQ(parsed->template_id, 3);
    EXPECT_EQ(parsed->categories, (std::vector<Category>{Category::Cup, Category::Kettle, Category::Bread}));
    EXPECT_FALSE(parse_question("What is the meaning of life?"));
}

TEST(Eqa, AnswerNormalisation) {
    EXPECT_EQ(normalize_answer("Yes."), "yes");
    EXPECT_EQ(normalize_answer("  NO!! "), "no");
    EXPECT_EQ(normalize_answer("Coffee  machine, and cup"), "coffee machine and cup");
}

TEST(Eqa, RandomScenesAreValidAndSeeded) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const WorldScene a = randomize_scene(seed);
        EXPECT_NO_THROW(validate_scene(a));
        EXPECT_EQ(dump_scene(a), dump_scene(randomize_scene(seed)));
        for (int t = 1; t <= 5; ++t) EXPECT_TRUE(instantiable(a, t)) << "seed " << seed << " template " << t;
    }
    EXPECT_NE(dump_scene(randomize_scene(1)), dump_scene(randomize_scene(2)));
    SceneOptions full;
    full.complete = true;
    const WorldScene c = randomize_scene(4, full);
    for (Category cat : all_categories()) {
        bool present = false;
        for (const auto& o : c.objects) present = present || o.category == cat;
        EXPECT_TRUE(present) << category_name(cat);
    }
}

TEST(Eqa, SmallDatasetRoundTripsAndStaysBalanced) {
    DatasetOptions opt;
    opt.seeds = 10;
    opt.per_template = 3;
    const auto items = generate_dataset(opt);
    ASSERT_EQ(items.size(), 150u);
    for (int t = 2; t <= 5; ++t) {
        const double y = yes_fraction(items, t);
        EXPECT_GE(y, 0.4);
        EXPECT_LE(y, 0.6);
    }
    const std::string text = write_dataset(items);
    const auto back = read_dataset(text);
    ASSERT_EQ(back.size(), items.size());
    EXPECT_EQ(write_dataset(back), text);
    for (const auto& it : back)
        EXPECT_EQ(answer_oracle(it.scene, it.template_id, it.bindings).answer, it.answer);
    EXPECT_THROW(read_dataset("{\"items\": 4}"), ParseError);
}

TEST(Eqa, ScriptedEpisodeAnswersFromMemory) {
    const WorldScene s = small_cafe();
    ScriptedBackend b;
    RobotState r = RobotState::at(0.8, 1.0, 0.0);
    EnvironmentMemory mem(s.bounds);
    EqaContext ctx;
    const std::string q = render_question(s, 2, {{3, 4}, {}, {}});
    const auto res = run_eqa_episode(q, s, r, mem, b, {}, ctx);
    EXPECT_EQ(normalize_answer(res.answer), "yes");
    EXPECT_GE(res.pl, 0.0);
    EXPECT_FALSE(ctx.visited.empty());

    // With no explorations allowed the answer is forced at once.
    RobotState r2 = RobotState::at(0.8, 1.0, 0.0);
    EnvironmentMemory mem2(s.bounds);
    EqaContext ctx2;
    const auto forced = run_eqa_episode(render_question(s, 4, {{}, Category::Bread, {}}), s, r2, mem2, b, {0}, ctx2);
    EXPECT_EQ(forced.ec, 0);
    EXPECT_EQ(forced.pl, 0.0);
}
