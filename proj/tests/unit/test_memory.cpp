#include <gtest/gtest.h>

#include "meia/error.hpp"
#include "meia/mem.hpp"
#include "meia/motion.hpp"
#include "support.hpp"

using namespace meia;

namespace {

WorldScene two_object_scene() {
    WorldScene s;
    s.bounds = {0, 0, 6, 5};
    test::add_object(s, 1, Category::Table, {3.0, 2.5, 0.375}, {0.4, 0.4, 0.375});
    test::add_object(s, 2, Category::Cup, {3.0, 2.5, 0.8}, {0.05, 0.05, 0.05}, 1);
    return s;
}

}  // namespace

TEST(FloorPlan, LayoutCoversBounds) {
    const auto l = FloorPlanLayout::covering({0, 0, 10, 8}, 0.1);
    EXPECT_EQ(l.cols, 100);
    EXPECT_EQ(l.rows, 80);
    const auto cell = l.cell_of({0.05, 7.95, 0});
    ASSERT_TRUE(cell);
    EXPECT_EQ(cell->first, 0);
    EXPECT_EQ(cell->second, 79);
    EXPECT_FALSE(l.cell_of({-0.5, 1, 0}));
}

TEST(FloorPlan, BandRulesForOccupiedFreeAndIgnored) {
    FloorPlan plan = empty_floor_plan(FloorPlanLayout::covering({0, 0, 1, 1}, 0.5));
    const ZBand band;
    accumulate_point(plan, {{0.25, 0.25, 0.0}, {1, 2, 3}}, band);   // floor return
    accumulate_point(plan, {{0.75, 0.25, 2.5}, {1, 2, 3}}, band);   // above band
    accumulate_point(plan, {{0.25, 0.75, 1.0}, {9, 9, 9}}, band);   // occupied
    accumulate_point(plan, {{0.25, 0.75, 0.5}, {7, 7, 7}}, band);   // lower: colour wins
    accumulate_point(plan, {{0.25, 0.75, 0.0}, {0, 0, 0}}, band);   // floor does not clear it
    EXPECT_EQ(plan.at(0, 0).state, CellState::Free);
    EXPECT_EQ(plan.at(1, 0).state, CellState::Unknown);
    EXPECT_EQ(plan.at(0, 1).state, CellState::Occupied);
    EXPECT_EQ(plan.at(0, 1).color, (Rgb{7, 7, 7}));
    EXPECT_EQ(plan.count(CellState::Occupied), 1u);
}

TEST(FloorPlan, PgmAndPngEncodings) {
    FloorPlan plan = empty_floor_plan(FloorPlanLayout::covering({0, 0, 1, 0.5}, 0.5));
    accumulate_point(plan, {{0.25, 0.25, 1.0}, {5, 6, 7}}, {});
    const std::string pgm = floor_plan_pgm(plan);
    ASSERT_EQ(pgm.rfind("P5\n2 1\n255\n", 0), 0u);
    EXPECT_EQ(static_cast<unsigned char>(pgm[pgm.size() - 2]), 255);
    EXPECT_EQ(static_cast<unsigned char>(pgm.back()), 0);
    const auto png = floor_plan_png(plan);
    ASSERT_GE(png.size(), 8u);
    EXPECT_EQ(png[1], 'P');
    EXPECT_EQ(png[2], 'N');
    EXPECT_EQ(png[3], 'G');
}

TEST(Memory, IntegrateRespectsFlags) {
    const WorldScene s = two_object_scene();
    const RobotState r = RobotState::at(1.6, 2.5, 0.0);
    const SensorFrame f = render(s, r);

    EnvironmentMemory both(s.bounds);
    both.integrate_frame(f, 1);
    EXPECT_EQ(both.language().size(), 2u);
    EXPECT_GT(both.cloud().size(), 0u);
    EXPECT_GT(both.plan().count(CellState::Occupied), 0u);

    EnvironmentMemory lang(s.bounds, {}, {true, false});
    lang.integrate_frame(f, 1);
    EXPECT_EQ(lang.language().size(), 2u);
    EXPECT_EQ(lang.cloud().size(), 0u);

    EnvironmentMemory img(s.bounds, {}, {false, true});
    img.integrate_frame(f, 1);
    EXPECT_TRUE(img.language().empty());
    EXPECT_GT(img.cloud().size(), 0u);
}

TEST(Memory, LatestObservationWinsAndFusionDeduplicates) {
    WorldScene s = two_object_scene();
    const RobotState r = RobotState::at(1.6, 2.5, 0.0);
    EnvironmentMemory mem(s.bounds);
    mem.integrate_frame(render(s, r), 1);
    const std::size_t points = mem.cloud().size();
    mem.integrate_frame(render(s, r), 2);
    EXPECT_EQ(mem.cloud().size(), points);  // same view adds no new voxels
    EXPECT_EQ(mem.language().at(2).last_seen, 2);

    s.find(2)->position.y += 0.2;
    mem.integrate_frame(render(s, r), 3);
    EXPECT_NEAR(mem.language().at(2).world_pos.y, s.find(2)->position.y, 0.06);
}

TEST(Memory, EntriesOfSortsByDistance) {
    WorldScene s;
    s.bounds = {0, 0, 8, 6};
    test::add_object(s, 1, Category::Table, {3.0, 1.5, 0.375}, {0.4, 0.4, 0.375});
    test::add_object(s, 2, Category::Table, {3.0, 4.0, 0.375}, {0.4, 0.4, 0.375});
    EnvironmentMemory mem(s.bounds);
    const RobotState r = RobotState::at(0.8, 2.75, 0.0);
    mem.integrate_frame(render(s, r), 1);
    ASSERT_EQ(mem.language().size(), 2u);
    const auto near_first = mem.entries_of(Category::Table, {3.0, 1.0, 0});
    ASSERT_EQ(near_first.size(), 2u);
    EXPECT_EQ(near_first[0].object_id, 1);
    EXPECT_TRUE(mem.entries_of(Category::Cup, {}).empty());
}

TEST(Memory, SerializationRoundTrips) {
    const WorldScene s = two_object_scene();
    EnvironmentMemory mem(s.bounds);
    mem.integrate_frame(render(s, RobotState::at(1.6, 2.5, 0.0)), 4);
    const std::string text = serialize_memory(mem);
    const EnvironmentMemory back = deserialize_memory(text);
    EXPECT_TRUE(back == mem);
    EXPECT_EQ(serialize_memory(back), text);
    EXPECT_THROW(deserialize_memory("{"), ParseError);
    EXPECT_THROW(deserialize_memory("{\"language\": 3}"), ParseError);
}

TEST(Memory, OutlierFilterRederivesPlan) {
    const WorldScene s = two_object_scene();
    EnvironmentMemory mem(s.bounds);
    mem.integrate_frame(render(s, RobotState::at(1.6, 2.5, 0.0)), 1);
    const std::size_t before = mem.cloud().size();
    const auto r = mem.filter_outliers();
    EXPECT_EQ(mem.cloud().size(), before - r.removed.size());
    EXPECT_EQ(mem.plan(), project_floor_plan(mem.cloud(), mem.plan().layout, mem.config().band));
}

TEST(Memory, ClearForgetsEverything) {
    const WorldScene s = two_object_scene();
    EnvironmentMemory mem(s.bounds);
    mem.integrate_frame(render(s, RobotState::at(1.6, 2.5, 0.0)), 1);
    mem.clear();
    EXPECT_TRUE(mem.language().empty());
    EXPECT_EQ(mem.cloud().size(), 0u);
    EXPECT_EQ(mem.plan().count(CellState::Occupied), 0u);
}
