#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "meia/error.hpp"
#include "meia/geometry.hpp"
#include "meia/robot.hpp"
#include "oracles.hpp"

using namespace meia;

namespace {

RobotPose random_pose(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    RobotPose p;
    p.euler = {0.2 * u(rng), 0.2 * u(rng), std::numbers::pi * u(rng)};
    p.translation = {5 + 4 * u(rng), 4 + 3 * u(rng), 0.0};
    return p;
}

}  // namespace

TEST(Geometry, RotationIsOrthonormalWithUnitDeterminant) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
    for (int k = 0; k < 500; ++k) {
        const Mat3 r = euler_to_rotation(u(rng), u(rng), u(rng));
        EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
        EXPECT_LT(orthonormality_error(r), 1e-12);
        const Mat3 rt = r * r.transposed();
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) EXPECT_NEAR(rt(a, b), a == b ? 1.0 : 0.0, 1e-12);
    }
}

TEST(Geometry, HeadingOnlyRotationTurnsForwardAxis) {
    const Mat3 r = euler_to_rotation(0, 0, std::numbers::pi / 2);
    const Vec3 v = r * Vec3{1, 0, 0};
    EXPECT_NEAR(v.x, 0.0, 1e-15);
    EXPECT_NEAR(v.y, 1.0, 1e-15);
}

TEST(Geometry, AgentFrameIsMirroredInY) {
    RobotPose pose;
    pose.translation = {1, 2, 0};
    const Vec3 w = agent_to_world(pose, {1, 1, 0.5});
    EXPECT_DOUBLE_EQ(w.x, 2.0);
    EXPECT_DOUBLE_EQ(w.y, 1.0);  // agent +y (right) is world -y at heading 0
    EXPECT_DOUBLE_EQ(w.z, 0.5);
    const Vec3 back = world_to_agent(pose, w);
    EXPECT_NEAR(back.y, 1.0, 1e-15);
}

TEST(Geometry, PixelToWorldMatchesHandWrittenChain) {
    std::mt19937_64 rng(2);
    const CameraMount cam = RobotState::at(0, 0, 0).camera(Mount::Head);
    std::uniform_real_distribution<double> ui(0, cam.width - 1), uj(0, cam.height - 1), ud(0.2, 8.0);
    for (int k = 0; k < 500; ++k) {
        const RobotPose pose = random_pose(rng);
        const double i = ui(rng), j = uj(rng), d = ud(rng);
        const Vec3 got = pixel_to_world(cam.intr, cam.extr, pose, {i, j, d});
        const Vec3 want = oracle::pixel_to_world(cam.intr, cam.extr, pose, i, j, d);
        EXPECT_LT(distance(got, want), 1e-9);
    }
}

TEST(Geometry, ThousandRoundTripsContinuousAndQuantized) {
    std::mt19937_64 rng(3);
    const CameraMount cam = RobotState::at(0, 0, 0).camera(Mount::Head);
    std::uniform_real_distribution<double> ui(0, cam.width - 1), uj(0, cam.height - 1), ud(0.3, 7.5);
    for (int k = 0; k < 1000; ++k) {
        const RobotPose pose = random_pose(rng);
        const Vec3 p = pixel_to_world(cam.intr, cam.extr, pose, {ui(rng), uj(rng), ud(rng)});
        const auto px = world_to_pixel(cam.intr, cam.extr, pose, p);
        ASSERT_TRUE(px.has_value());
        EXPECT_LT(distance(pixel_to_world(cam.intr, cam.extr, pose, *px), p), 1e-9);

        // Depth rounded to the sensor quantum moves the point along its ray by
        // at most half a step of depth.
        PixelObservation q = *px;
        q.depth = std::round(q.depth / kDepthQuantum) * kDepthQuantum;
        const double ray_scale = std::hypot((q.i - cam.intr.cx) / cam.intr.fx, (q.j - cam.intr.cy) / cam.intr.fy, 1.0);
        EXPECT_LE(distance(pixel_to_world(cam.intr, cam.extr, pose, q), p), 0.5 * kDepthQuantum * ray_scale + 1e-12);
    }
}

TEST(Geometry, PointsBehindTheCameraHaveNoPixel) {
    const CameraIntrinsics k{100, 100, 64, 48};
    EXPECT_FALSE(camera_to_pixel(k, {0, 0, -1}).has_value());
    EXPECT_FALSE(camera_to_pixel(k, {0, 0, 0}).has_value());
    const auto px = camera_to_pixel(k, {0.5, -0.25, 2});
    ASSERT_TRUE(px);
    EXPECT_DOUBLE_EQ(px->i, 64 + 100 * 0.25);
    EXPECT_DOUBLE_EQ(px->j, 48 - 100 * 0.125);
}

TEST(Geometry, BadDepthIsRejected) {
    const CameraIntrinsics k{100, 100, 64, 48};
    EXPECT_THROW(pixel_to_camera(k, {1, 1, 0.0}), InvalidObservation);
    EXPECT_THROW(pixel_to_camera(k, {1, 1, -2.0}), InvalidObservation);
    EXPECT_THROW(pixel_to_camera(k, {1, 1, std::nan("")}), InvalidObservation);
}

TEST(Geometry, NormalizeAngleWrapsIntoHalfOpenRange) {
    EXPECT_NEAR(normalize_angle(3 * std::numbers::pi), -std::numbers::pi, 1e-12);  // [-pi, pi)
    EXPECT_NEAR(normalize_angle(-std::numbers::pi / 2 - 4 * std::numbers::pi), -std::numbers::pi / 2, 1e-12);
    EXPECT_DOUBLE_EQ(normalize_angle(0.25), 0.25);
}

TEST(Geometry, PrincipalPointIsImageCentre) {
    const CameraMount cam = RobotState::at(0, 0, 0).camera(Mount::Head);
    EXPECT_DOUBLE_EQ(cam.intr.cx, cam.width / 2.0);
    EXPECT_DOUBLE_EQ(cam.intr.cy, cam.height / 2.0);
    EXPECT_NEAR(2 * std::atan(cam.width / 2.0 / cam.intr.fx), 70.0 * std::numbers::pi / 180.0, 1e-12);
}
