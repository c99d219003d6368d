#pragma once

#include <array>
#include <cmath>
#include <optional>

namespace meia {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr bool operator==(const Vec3&) const = default;

    constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }
inline double distance_xy(const Vec3& a, const Vec3& b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Row-major 3x3 matrix.
struct Mat3 {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    static constexpr Mat3 identity() { return {}; }
    static constexpr Mat3 rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
        return {{r0.x, r0.y, r0.z, r1.x, r1.y, r1.z, r2.x, r2.y, r2.z}};
    }

    constexpr double operator()(int r, int c) const { return m[static_cast<std::size_t>(r * 3 + c)]; }
    constexpr double& operator()(int r, int c) { return m[static_cast<std::size_t>(r * 3 + c)]; }

    constexpr Vec3 operator*(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }

    constexpr Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
                r(i, j) = s;
            }
        }
        return r;
    }

    constexpr Mat3 transposed() const {
        return {{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}};
    }

    constexpr double determinant() const {
        return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
               m[2] * (m[3] * m[7] - m[4] * m[6]);
    }

    constexpr bool operator==(const Mat3&) const = default;
};

// Max-norm of R * R^T - I.
double orthonormality_error(const Mat3& r);

struct CameraIntrinsics {
    double fx = 1.0;
    double fy = 1.0;
    double cx = 0.0;
    double cy = 0.0;

    bool valid() const { return fx > 0.0 && fy > 0.0 && std::isfinite(cx) && std::isfinite(cy); }
};

// Camera -> agent (robot body) transform.
struct CameraExtrinsics {
    Mat3 rotation;
    Vec3 translation;
};

struct EulerAngles {
    double alpha = 0.0;  // about x
    double beta = 0.0;   // about y
    double gamma = 0.0;  // about z (heading)
};

struct RobotPose {
    EulerAngles euler;
    Vec3 translation;
};

// Pixel coordinates are real-valued so that projections of arbitrary world
// points can be represented exactly; rendered pixels carry integer values.
// i is the column (x-axis), j the row (y-axis), origin top-left.
struct PixelObservation {
    double i = 0.0;
    double j = 0.0;
    double depth = 0.0;  // camera-frame z, meters
};

// The agent frame is mirrored against the world frame along one axis.
// The default negates y before rotating into the world frame.
enum class AxisFlip { NegateY, NegateX };

double normalize_angle(double radians);

// Back-projects a pixel with depth into the camera frame.
// Throws InvalidObservation on non-positive or non-finite depth.
Vec3 pixel_to_camera(const CameraIntrinsics& intr, const PixelObservation& obs);

Vec3 camera_to_agent(const CameraExtrinsics& extr, const Vec3& p_camera);

// R = Rz(gamma) * Ry(beta) * Rx(alpha).
Mat3 euler_to_rotation(double alpha, double beta, double gamma);
inline Mat3 euler_to_rotation(const EulerAngles& e) { return euler_to_rotation(e.alpha, e.beta, e.gamma); }

Vec3 agent_to_world(const RobotPose& pose, const Vec3& p_agent, AxisFlip flip = AxisFlip::NegateY);

Vec3 pixel_to_world(const CameraIntrinsics& intr, const CameraExtrinsics& extr, const RobotPose& pose,
                    const PixelObservation& obs, AxisFlip flip = AxisFlip::NegateY);

// Inverse chain. `world_to_pixel` returns nullopt for points at or behind the
// image plane (camera z <= 0).
Vec3 world_to_agent(const RobotPose& pose, const Vec3& p_world, AxisFlip flip = AxisFlip::NegateY);
Vec3 agent_to_camera(const CameraExtrinsics& extr, const Vec3& p_agent);
std::optional<PixelObservation> camera_to_pixel(const CameraIntrinsics& intr, const Vec3& p_camera);
std::optional<PixelObservation> world_to_pixel(const CameraIntrinsics& intr, const CameraExtrinsics& extr,
                                               const RobotPose& pose, const Vec3& p_world,
                                               AxisFlip flip = AxisFlip::NegateY);

// Affine ray for a pixel: world(depth) = origin + direction * depth, where
// depth is camera-frame z. Used by the renderer so that rendered depth and
// back-projection share one transform chain.
struct PixelRay {
    Vec3 origin;
    Vec3 direction;
};
PixelRay pixel_ray(const CameraIntrinsics& intr, const CameraExtrinsics& extr, const RobotPose& pose,
                   double i, double j, AxisFlip flip = AxisFlip::NegateY);

}  // namespace meia
