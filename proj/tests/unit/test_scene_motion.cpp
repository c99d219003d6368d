#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "meia/error.hpp"
#include "meia/motion.hpp"
#include "meia/robot.hpp"
#include "support.hpp"

using namespace meia;

TEST(Scene, CategoryNamesRoundTrip) {
    EXPECT_EQ(all_categories().size(), kCategoryCount);
    for (Category c : all_categories()) {
        EXPECT_EQ(parse_category(category_name(c)), c);
        EXPECT_EQ(category_from_color(category_color(c)), c);
        EXPECT_NE(category_color(c), kFloorColor);
    }
    EXPECT_FALSE(parse_category("sofa"));
    EXPECT_EQ(category_phrase(Category::CoffeeMachine), "coffee machine");
}

TEST(Scene, FixtureRoundTripsThroughJson) {
    const WorldScene s = test::cafe_small();
    EXPECT_GE(s.objects.size(), 20u);
    const std::string text = dump_scene(s);
    EXPECT_EQ(dump_scene(load_scene(text)), text);
    EXPECT_NO_THROW(validate_scene(s));
}

TEST(Scene, MalformedJsonNamesTheField) {
    try {
        load_scene(R"({"bounds": [0, 0, 5, 5], "objects": [{"id": 1, "category": "sofa",
                       "position": [1, 1, 0], "half_extents": [1, 1, 1]}]})");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.path(), "$.objects[0].category");
    }
    EXPECT_THROW(load_scene("{"), ParseError);
    EXPECT_THROW(load_scene(R"({"bounds": [0, 0, 5], "objects": []})"), ParseError);
}

TEST(Scene, ValidationRejectsBrokenScenes) {
    WorldScene s;
    s.bounds = {0, 0, 5, 5};
    test::add_object(s, 1, Category::Table, {1, 1, 0.375}, {0.4, 0.4, 0.375});
    EXPECT_NO_THROW(validate_scene(s));

    WorldScene dup = s;
    test::add_object(dup, 1, Category::Chair, {3, 3, 0.45}, {0.2, 0.2, 0.45});
    EXPECT_THROW(validate_scene(dup), ValidationError);

    WorldScene outside = s;
    test::add_object(outside, 2, Category::Chair, {4.9, 3, 0.45}, {0.2, 0.2, 0.45});
    EXPECT_THROW(validate_scene(outside), ValidationError);

    WorldScene bad_surface = s;
    test::add_object(bad_surface, 2, Category::Chair, {3, 3, 0.45}, {0.2, 0.2, 0.45});
    test::add_object(bad_surface, 3, Category::Cup, {3, 3, 0.95}, {0.05, 0.05, 0.05}, 2);
    EXPECT_THROW(validate_scene(bad_surface), ValidationError);

    WorldScene bad_state = s;
    bad_state.objects[0].state["dirty"] = std::int64_t{3};
    EXPECT_THROW(validate_scene(bad_state), ValidationError);

    WorldScene overlap = s;
    test::add_object(overlap, 2, Category::Table, {1.5, 1, 0.375}, {0.4, 0.4, 0.375});
    EXPECT_THROW(validate_scene(overlap), ValidationError);
}

TEST(Render, IntersectBoxAnalytic) {
    const Box b{{2, 0, 0}, {0.5, 0.5, 0.5}};
    auto t = intersect_box({0, 0, 0}, {1, 0, 0}, b);
    ASSERT_TRUE(t);
    EXPECT_DOUBLE_EQ(*t, 1.5);
    t = intersect_box({0, 0, 0}, {1, 1, 0}, b);  // diagonal misses? enters at x=1.5,y=1.5 -> no
    EXPECT_FALSE(t);
    t = intersect_box({0, 0.25, 0.1}, {2, 0, 0}, b);  // unnormalised direction
    ASSERT_TRUE(t);
    EXPECT_DOUBLE_EQ(*t, 0.75);
    EXPECT_FALSE(intersect_box({0, 0, 0}, {-1, 0, 0}, b));
    t = intersect_box({2, 0, 0}, {0, 0, 1}, b);  // from inside: exit face
    ASSERT_TRUE(t);
    EXPECT_DOUBLE_EQ(*t, 0.5);
}

TEST(Render, FloorDepthMatchesAnalyticRay) {
    WorldScene s;
    s.bounds = {0, 0, 10, 10};
    const RobotState r = RobotState::at(5, 5, 0.3);
    const SensorFrame f = render(s, r);
    ASSERT_EQ(f.width, 128);
    ASSERT_EQ(f.height, 96);
    for (int j = 60; j < 96; j += 7) {
        for (int i = 0; i < 128; i += 13) {
            const double d = f.depth[f.index(i, j)];
            ASSERT_GT(d, 0.0);
            // The rendered point must sit on the floor plane.
            const Vec3 p = pixel_to_world(f.intr, f.extr, f.pose, {double(i), double(j), d});
            const PixelRay ray = pixel_ray(f.intr, f.extr, f.pose, i, j);
            const double exact = -ray.origin.z / ray.direction.z;
            EXPECT_NEAR(d, exact, kDepthQuantum / 2 + 1e-12);
            EXPECT_NEAR(p.z, 0.0, kDepthQuantum);
            EXPECT_EQ(f.segmentation[f.index(i, j)], 0);
            EXPECT_EQ(f.color(i, j), kFloorColor);
        }
    }
}

TEST(Render, ObjectPixelsCarryIdAndColour) {
    WorldScene s;
    s.bounds = {0, 0, 6, 5};
    test::add_object(s, 4, Category::Table, {3.0, 2.5, 0.375}, {0.4, 0.4, 0.375});
    const SensorFrame f = render(s, RobotState::at(1.5, 2.5, 0.0));
    std::size_t hits = 0;
    for (int j = 0; j < f.height; ++j)
        for (int i = 0; i < f.width; ++i)
            if (f.segmentation[f.index(i, j)] == 4) {
                ++hits;
                EXPECT_EQ(f.color(i, j), category_color(Category::Table));
            }
    EXPECT_GT(hits, 100u);
    EXPECT_TRUE(f == render(s, RobotState::at(1.5, 2.5, 0.0)));
}

TEST(Motion, StraightMoveStopsBeforeObstacle) {
    WorldScene s;
    s.bounds = {0, 0, 6, 4};
    test::add_object(s, 1, Category::Table, {3.0, 2.0, 0.375}, {0.4, 0.4, 0.375});
    RobotState r = RobotState::at(1.0, 2.0, 0.0);
    const MoveResult m = move_to(s, r, {5.0, 2.0, 0});
    EXPECT_FALSE(m.reached);
    EXPECT_LE(r.position().x, 3.0 - 0.4 - kRobotRadius + 1e-9);
    EXPECT_GT(r.position().x, 3.0 - 0.4 - kRobotRadius - 2 * kSweepStep);
    EXPECT_NEAR(m.path_length, r.position().x - 1.0, 1e-9);
    EXPECT_THROW(move_to(s, r, {7.0, 2.0, 0}), InvalidTarget);
}

TEST(Motion, NavigationGoesAroundObstacles) {
    WorldScene s;
    s.bounds = {0, 0, 6, 4};
    test::add_object(s, 1, Category::Table, {3.0, 2.0, 0.375}, {0.4, 0.4, 0.375});
    RobotState r = RobotState::at(1.0, 2.0, 0.0);
    const MoveResult m = navigate_to(s, r, {5.0, 2.0, 0});
    EXPECT_TRUE(m.reached);
    EXPECT_NEAR(r.position().x, 5.0, 0.05);
    EXPECT_GT(m.path_length, 4.0);
    EXPECT_FALSE(robot_collides(s, r.position()));
}

TEST(Motion, UnreachableTargetLeavesRobotInPlace) {
    WorldScene s;
    s.bounds = {0, 0, 6, 4};
    // A wall of bar counters splits the room.
    test::add_object(s, 1, Category::BarCounter, {3.0, 1.0, 0.55}, {0.3, 1.0, 0.55});
    test::add_object(s, 2, Category::BarCounter, {3.0, 3.0, 0.55}, {0.3, 1.0, 0.55});
    RobotState r = RobotState::at(1.0, 2.0, 0.0);
    const MoveResult m = navigate_to(s, r, {5.0, 2.0, 0});
    EXPECT_FALSE(m.reached);
    EXPECT_EQ(m.path_length, 0.0);
    EXPECT_EQ(r.position().x, 1.0);
}

TEST(Motion, GridDistancesAreEightConnected) {
    WorldScene s;
    s.bounds = {0, 0, 3, 3};
    const NavGrid g(s, 0.1);
    const std::size_t a = g.nearest_node({1.0, 1.0, 0}), b = g.nearest_node({1.5, 1.3, 0});
    const auto field = g.distance_field(a);
    // 3 diagonal steps and 2 straight ones.
    EXPECT_NEAR(field[b], 3 * 0.1 * std::numbers::sqrt2 + 0.2, 1e-9);
    const auto path = g.path(a, b);
    ASSERT_FALSE(path.empty());
    EXPECT_EQ(path.front(), a);
    EXPECT_EQ(path.back(), b);
}
