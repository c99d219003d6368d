#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "meia/geometry.hpp"
#include "meia/scene.hpp"

namespace meia {

enum class Mount : std::uint8_t { Head = 0, Chest = 1, Waist = 2 };

struct CameraMount {
    std::string name;
    int width = 128;
    int height = 96;
    CameraIntrinsics intr;
    CameraExtrinsics extr;  // camera -> agent
    double max_range = 8.0; // meters of camera-frame depth
};

// Pinhole camera of the given image size and horizontal field of view,
// mounted `height` meters above the floor, `forward` meters ahead of the
// body centre, pitched down by `tilt_down` radians.
CameraMount make_camera_mount(std::string name, double height, double forward, double tilt_down,
                              int width = 128, int image_height = 96, double hfov = 1.2217304763960306);

struct RobotState {
    RobotPose pose;  // planar: translation (x, y, 0), heading in euler.gamma
    std::array<CameraMount, 3> cameras;
    std::optional<std::string> held_item;

    // Robot at (x, y) facing `heading` with the default head/chest/waist rig.
    static RobotState at(double x, double y, double heading);

    Vec3 position() const { return pose.translation; }
    double heading() const { return pose.euler.gamma; }
    const CameraMount& camera(Mount m) const { return cameras[static_cast<std::size_t>(m)]; }
};

struct SensorFrame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;          // 3 bytes per pixel, row-major
    std::vector<double> depth;              // meters, 0 = no return
    std::vector<std::int32_t> segmentation; // object id, 0 = background / floor
    CameraIntrinsics intr;
    CameraExtrinsics extr;
    RobotPose pose;

    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(width) + static_cast<std::size_t>(i);
    }
    Rgb color(int i, int j) const {
        const std::size_t k = 3 * index(i, j);
        return {rgb[k], rgb[k + 1], rgb[k + 2]};
    }
    bool operator==(const SensorFrame& o) const;
};

// Depth is quantized to this step on output.
inline constexpr double kDepthQuantum = 0.001;

// Ray-casts every pixel against the object boxes and the floor rectangle.
SensorFrame render(const WorldScene& scene, const RobotState& robot, Mount mount = Mount::Head);

// Head-camera frames at headings g, g + pi/2, g + pi, g + 3pi/2.
std::array<SensorFrame, 4> observe_four_directions(const WorldScene& scene, const RobotState& robot);

// Parametric ray/box intersection; returns the entry distance t > t_min.
std::optional<double> intersect_box(const Vec3& origin, const Vec3& dir, const Box& box, double t_min = 1e-9);

}  // namespace meia
