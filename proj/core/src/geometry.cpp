#include "meia/geometry.hpp"

#include <algorithm>
#include <numbers>
#include <string>

#include "meia/error.hpp"

namespace meia {

namespace {

Vec3 mirror(const Vec3& p, AxisFlip flip) {
    return flip == AxisFlip::NegateY ? Vec3{p.x, -p.y, p.z} : Vec3{-p.x, p.y, p.z};
}

}  // namespace

double orthonormality_error(const Mat3& r) {
    const Mat3 p = r * r.transposed();
    double err = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) err = std::max(err, std::abs(p(i, j) - (i == j ? 1.0 : 0.0)));
    return err;
}

double normalize_angle(double radians) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double a = std::fmod(radians + std::numbers::pi, two_pi);
    if (a < 0.0) a += two_pi;
    return a - std::numbers::pi;
}

Vec3 pixel_to_camera(const CameraIntrinsics& intr, const PixelObservation& obs) {
    if (!(obs.depth > 0.0) || !std::isfinite(obs.depth)) {
        throw InvalidObservation("depth must be positive and finite, got " + std::to_string(obs.depth));
    }
    return {(obs.i - intr.cx) / intr.fx * obs.depth, (obs.j - intr.cy) / intr.fy * obs.depth, obs.depth};
}

Vec3 camera_to_agent(const CameraExtrinsics& extr, const Vec3& p_camera) {
    return extr.rotation * p_camera + extr.translation;
}

Mat3 euler_to_rotation(double alpha, double beta, double gamma) {
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    const double cb = std::cos(beta), sb = std::sin(beta);
    const double cg = std::cos(gamma), sg = std::sin(gamma);
    const Mat3 rx = Mat3::rows({1, 0, 0}, {0, ca, -sa}, {0, sa, ca});
    const Mat3 ry = Mat3::rows({cb, 0, sb}, {0, 1, 0}, {-sb, 0, cb});
    const Mat3 rz = Mat3::rows({cg, -sg, 0}, {sg, cg, 0}, {0, 0, 1});
    return rz * ry * rx;
}

Vec3 agent_to_world(const RobotPose& pose, const Vec3& p_agent, AxisFlip flip) {
    return euler_to_rotation(pose.euler) * mirror(p_agent, flip) + pose.translation;
}

Vec3 pixel_to_world(const CameraIntrinsics& intr, const CameraExtrinsics& extr, const RobotPose& pose,
                    const PixelObservation& obs, AxisFlip flip) {
    return agent_to_world(pose, camera_to_agent(extr, pixel_to_camera(intr, obs)), flip);
}

Vec3 world_to_agent(const RobotPose& pose, const Vec3& p_world, AxisFlip flip) {
    // The mirror is its own inverse.
    return mirror(euler_to_rotation(pose.euler).transposed() * (p_world - pose.translation), flip);
}

Vec3 agent_to_camera(const CameraExtrinsics& extr, const Vec3& p_agent) {
    return extr.rotation.transposed() * (p_agent - extr.translation);
}

std::optional<PixelObservation> camera_to_pixel(const CameraIntrinsics& intr, const Vec3& p_camera) {
    if (!(p_camera.z > 0.0)) return std::nullopt;
    return PixelObservation{p_camera.x / p_camera.z * intr.fx + intr.cx,
                            p_camera.y / p_camera.z * intr.fy + intr.cy, p_camera.z};
}

std::optional<PixelObservation> world_to_pixel(const CameraIntrinsics& intr, const CameraExtrinsics& extr,
                                               const RobotPose& pose, const Vec3& p_world, AxisFlip flip) {
    return camera_to_pixel(intr, agent_to_camera(extr, world_to_agent(pose, p_world, flip)));
}

PixelRay pixel_ray(const CameraIntrinsics& intr, const CameraExtrinsics& extr, const RobotPose& pose,
                   double i, double j, AxisFlip flip) {
    const Vec3 origin = agent_to_world(pose, extr.translation, flip);
    const Vec3 unit_depth = pixel_to_world(intr, extr, pose, {i, j, 1.0}, flip);
    return {origin, unit_depth - origin};
}

}  // namespace meia
