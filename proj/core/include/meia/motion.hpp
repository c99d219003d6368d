#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "meia/geometry.hpp"
#include "meia/robot.hpp"
#include "meia/scene.hpp"

namespace meia {

struct MoveResult {
    bool reached = false;
    Vec3 stopped_at;           // final robot position
    double path_length = 0.0;  // meters actually traveled
};

// True when a robot disk of `radius` centred at p leaves the scene bounds or
// overlaps an obstacle footprint.
bool robot_collides(const WorldScene& scene, const Vec3& p, double radius = kRobotRadius);

// Sweep step used by straight-line motion.
inline constexpr double kSweepStep = 0.01;

// True when every sweep sample along a->b (inclusive) is collision free.
bool segment_clear(const WorldScene& scene, const Vec3& a, const Vec3& b, double radius = kRobotRadius);

// Straight-line motion with a swept footprint check. On collision the robot
// stops at the last free sample. Throws InvalidTarget when the target lies
// outside the scene bounds. The robot turns to face its direction of travel.
MoveResult move_to(const WorldScene& scene, RobotState& robot, const Vec3& target);

// Lattice of candidate robot positions (spacing `resolution`) over the scene
// bounds. A node is free when the robot disk, inflated by a small margin,
// does not collide at that point, which keeps straight moves between
// adjacent free nodes collision free.
class NavGrid {
public:
    explicit NavGrid(const WorldScene& scene, double resolution = 0.05);

    int cols() const { return cols_; }
    int rows() const { return rows_; }
    double resolution() const { return resolution_; }
    std::size_t size() const { return free_.size(); }

    Vec3 position(std::size_t node) const;
    std::size_t nearest_node(const Vec3& p) const;
    bool is_free(std::size_t node) const { return free_[node] != 0; }

    // Shortest 8-connected path lengths from `start` to every node
    // (infinity when unreachable).
    std::vector<double> distance_field(std::size_t start) const;

    // Node path start..goal, empty when unreachable.
    std::vector<std::size_t> path(std::size_t start, std::size_t goal) const;

private:
    const WorldScene* scene_;
    double resolution_;
    int cols_ = 0;
    int rows_ = 0;
    std::vector<std::uint8_t> free_;
};

// Finds the free node the robot can enter from its current position with a
// clear straight move (its own node when possible).
std::optional<std::size_t> entry_node(const NavGrid& grid, const WorldScene& scene, const Vec3& from);

// Drives the robot to `target` along a smoothed grid path, issuing
// straight-line move_to calls for every leg. When no path exists the robot
// does not move and the result is not reached.
MoveResult navigate_to(const WorldScene& scene, RobotState& robot, const Vec3& target);
MoveResult navigate_to(const NavGrid& grid, const WorldScene& scene, RobotState& robot, const Vec3& target);

}  // namespace meia
