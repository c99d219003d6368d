#include "meia/robot.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace meia {

CameraMount make_camera_mount(std::string name, double height, double forward, double tilt_down, int width,
                              int image_height, double hfov) {
    CameraMount m;
    m.name = std::move(name);
    m.width = width;
    m.height = image_height;
    const double f = (width / 2.0) / std::tan(hfov / 2.0);
    m.intr = {f, f, width / 2.0, image_height / 2.0};
    // Agent frame: x forward, y right, z up. Camera frame: x right, y down,
    // z along the optical axis.
    const Mat3 level = Mat3::rows({0, 0, 1}, {1, 0, 0}, {0, -1, 0});
    const double c = std::cos(tilt_down), s = std::sin(tilt_down);
    const Mat3 pitch = Mat3::rows({c, 0, s}, {0, 1, 0}, {-s, 0, c});
    m.extr.rotation = pitch * level;
    m.extr.translation = {forward, 0.0, height};
    return m;
}

RobotState RobotState::at(double x, double y, double heading) {
    RobotState r;
    r.pose.translation = {x, y, 0.0};
    r.pose.euler.gamma = normalize_angle(heading);
    const double deg = std::numbers::pi / 180.0;
    r.cameras = {make_camera_mount("head", 1.5, 0.10, 25.0 * deg),
                 make_camera_mount("chest", 1.1, 0.12, 35.0 * deg),
                 make_camera_mount("waist", 0.6, 0.15, 10.0 * deg)};
    return r;
}

bool SensorFrame::operator==(const SensorFrame& o) const {
    return width == o.width && height == o.height && rgb == o.rgb && depth == o.depth &&
           segmentation == o.segmentation && intr.fx == o.intr.fx && intr.fy == o.intr.fy &&
           intr.cx == o.intr.cx && intr.cy == o.intr.cy && extr.rotation == o.extr.rotation &&
           extr.translation == o.extr.translation && pose.translation == o.pose.translation &&
           pose.euler.alpha == o.pose.euler.alpha && pose.euler.beta == o.pose.euler.beta &&
           pose.euler.gamma == o.pose.euler.gamma;
}

std::optional<double> intersect_box(const Vec3& origin, const Vec3& dir, const Box& box, double t_min) {
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    const double o[3] = {origin.x, origin.y, origin.z};
    const double d[3] = {dir.x, dir.y, dir.z};
    const Vec3 lo = box.min(), hi = box.max();
    const double l[3] = {lo.x, lo.y, lo.z};
    const double h[3] = {hi.x, hi.y, hi.z};
    for (int a = 0; a < 3; ++a) {
        if (d[a] == 0.0) {
            if (o[a] < l[a] || o[a] > h[a]) return std::nullopt;
            continue;
        }
        double ta = (l[a] - o[a]) / d[a];
        double tb = (h[a] - o[a]) / d[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return std::nullopt;
    }
    if (t0 > t_min) return t0;
    // Origin inside the box: report the exit point.
    if (t1 > t_min) return t1;
    return std::nullopt;
}

SensorFrame render(const WorldScene& scene, const RobotState& robot, Mount mount) {
    const CameraMount& cam = robot.camera(mount);
    SensorFrame f;
    f.width = cam.width;
    f.height = cam.height;
    f.intr = cam.intr;
    f.extr = cam.extr;
    f.pose = robot.pose;
    const std::size_t n = static_cast<std::size_t>(cam.width) * static_cast<std::size_t>(cam.height);
    f.rgb.assign(3 * n, 0);
    f.depth.assign(n, 0.0);
    f.segmentation.assign(n, 0);

    const auto& b = scene.bounds;
    for (int j = 0; j < cam.height; ++j) {
        for (int i = 0; i < cam.width; ++i) {
            const PixelRay ray = pixel_ray(cam.intr, cam.extr, robot.pose, i, j);
            double best = std::numeric_limits<double>::infinity();
            int hit_id = 0;
            Rgb color = kBackgroundColor;
            for (const auto& o : scene.objects) {
                auto t = intersect_box(ray.origin, ray.direction, o.box());
                if (t && *t < best) {
                    best = *t;
                    hit_id = o.id;
                    color = category_color(o.category);
                }
            }
            if (ray.direction.z < 0.0) {
                const double t = -ray.origin.z / ray.direction.z;
                const Vec3 p = ray.origin + ray.direction * t;
                if (t > 0.0 && t < best && b.contains(p)) {
                    best = t;
                    hit_id = 0;
                    color = kFloorColor;
                }
            }
            if (!(best <= cam.max_range)) continue;
            const double q = std::round(best / kDepthQuantum) * kDepthQuantum;
            if (!(q > 0.0)) continue;
            const std::size_t k = f.index(i, j);
            f.depth[k] = q;
            f.segmentation[k] = hit_id;
            f.rgb[3 * k] = color.r;
            f.rgb[3 * k + 1] = color.g;
            f.rgb[3 * k + 2] = color.b;
        }
    }
    return f;
}

std::array<SensorFrame, 4> observe_four_directions(const WorldScene& scene, const RobotState& robot) {
    std::array<SensorFrame, 4> frames;
    RobotState probe = robot;
    for (int k = 0; k < 4; ++k) {
        probe.pose.euler.gamma = normalize_angle(robot.heading() + k * std::numbers::pi / 2.0);
        frames[static_cast<std::size_t>(k)] = render(scene, probe, Mount::Head);
    }
    return frames;
}

}  // namespace meia
