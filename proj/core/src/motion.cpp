#include "meia/motion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <utility>

#include "meia/error.hpp"

namespace meia {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Vec3> smooth(const WorldScene& scene, const std::vector<Vec3>& pts) {
    std::vector<Vec3> out;
    if (pts.empty()) return out;
    out.push_back(pts.front());
    std::size_t i = 0;
    while (i + 1 < pts.size()) {
        std::size_t j = i + 1;
        while (j + 1 < pts.size() && segment_clear(scene, pts[i], pts[j + 1])) ++j;
        out.push_back(pts[j]);
        i = j;
    }
    return out;
}

}  // namespace

bool robot_collides(const WorldScene& scene, const Vec3& p, double radius) {
    const auto& b = scene.bounds;
    if (p.x - radius < b.xmin || p.x + radius > b.xmax || p.y - radius < b.ymin || p.y + radius > b.ymax)
        return true;
    for (const auto& o : scene.objects)
        if (is_obstacle(o) && o.box().footprint_distance(p) < radius) return true;
    return false;
}

bool segment_clear(const WorldScene& scene, const Vec3& a, const Vec3& b, double radius) {
    const double len = distance_xy(a, b);
    const int n = std::max(1, static_cast<int>(std::ceil(len / kSweepStep)));
    for (int k = 0; k <= n; ++k) {
        const Vec3 p = k == n ? b : a + (b - a) * (static_cast<double>(k) / n);
        if (robot_collides(scene, p, radius)) return false;
    }
    return true;
}

MoveResult move_to(const WorldScene& scene, RobotState& robot, const Vec3& target) {
    if (!target.finite() || !scene.bounds.contains(target))
        throw InvalidTarget("target (" + std::to_string(target.x) + ", " + std::to_string(target.y) +
                            ") is outside the scene bounds");
    const Vec3 start = robot.position();
    const Vec3 goal{target.x, target.y, 0.0};
    const double len = distance_xy(start, goal);
    MoveResult result{true, start, 0.0};
    if (len == 0.0) return result;

    const int n = std::max(1, static_cast<int>(std::ceil(len / kSweepStep)));
    Vec3 last = start;
    for (int k = 1; k <= n; ++k) {
        const Vec3 p = k == n ? goal : start + (goal - start) * (static_cast<double>(k) / n);
        if (robot_collides(scene, p)) {
            result.reached = false;
            break;
        }
        last = p;
    }
    result.stopped_at = last;
    result.path_length = distance_xy(start, last);
    robot.pose.translation = last;
    if (result.path_length > 0.0) robot.pose.euler.gamma = std::atan2(goal.y - start.y, goal.x - start.x);
    return result;
}

NavGrid::NavGrid(const WorldScene& scene, double resolution) : scene_(&scene), resolution_(resolution) {
    const auto& b = scene.bounds;
    cols_ = static_cast<int>(std::floor(b.width() / resolution + 1e-9)) + 1;
    rows_ = static_cast<int>(std::floor(b.height() / resolution + 1e-9)) + 1;
    free_.assign(static_cast<std::size_t>(cols_) * static_cast<std::size_t>(rows_), 0);
    const double margin = 0.75 * resolution;
    for (std::size_t k = 0; k < free_.size(); ++k)
        free_[k] = robot_collides(scene, position(k), kRobotRadius + margin) ? 0 : 1;
}

Vec3 NavGrid::position(std::size_t node) const {
    const auto c = static_cast<int>(node % static_cast<std::size_t>(cols_));
    const auto r = static_cast<int>(node / static_cast<std::size_t>(cols_));
    return {scene_->bounds.xmin + c * resolution_, scene_->bounds.ymin + r * resolution_, 0.0};
}

std::size_t NavGrid::nearest_node(const Vec3& p) const {
    const int c = std::clamp(static_cast<int>(std::lround((p.x - scene_->bounds.xmin) / resolution_)), 0, cols_ - 1);
    const int r = std::clamp(static_cast<int>(std::lround((p.y - scene_->bounds.ymin) / resolution_)), 0, rows_ - 1);
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c);
}

std::vector<double> NavGrid::distance_field(std::size_t start) const {
    std::vector<double> dist(free_.size(), kInf);
    if (!is_free(start)) return dist;
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    dist[start] = 0.0;
    open.emplace(0.0, start);
    const double diag = resolution_ * std::sqrt(2.0);
    while (!open.empty()) {
        auto [d, u] = open.top();
        open.pop();
        if (d > dist[u]) continue;
        const int uc = static_cast<int>(u % static_cast<std::size_t>(cols_));
        const int ur = static_cast<int>(u / static_cast<std::size_t>(cols_));
        for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
                if (dr == 0 && dc == 0) continue;
                const int c = uc + dc, r = ur + dr;
                if (c < 0 || r < 0 || c >= cols_ || r >= rows_) continue;
                const std::size_t v = static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
                                      static_cast<std::size_t>(c);
                if (!is_free(v)) continue;
                const double nd = d + (dr != 0 && dc != 0 ? diag : resolution_);
                if (nd < dist[v]) {
                    dist[v] = nd;
                    open.emplace(nd, v);
                }
            }
        }
    }
    return dist;
}

std::vector<std::size_t> NavGrid::path(std::size_t start, std::size_t goal) const {
    if (!is_free(start) || !is_free(goal)) return {};
    // Dijkstra from the goal; walking downhill from the start yields a
    // shortest path with deterministic tie-breaking on node index.
    const auto dist = distance_field(goal);
    if (dist[start] == kInf) return {};
    std::vector<std::size_t> out{start};
    std::size_t u = start;
    const double diag = resolution_ * std::sqrt(2.0);
    while (u != goal) {
        const int uc = static_cast<int>(u % static_cast<std::size_t>(cols_));
        const int ur = static_cast<int>(u / static_cast<std::size_t>(cols_));
        std::size_t best = u;
        double best_d = dist[u];
        for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
                if (dr == 0 && dc == 0) continue;
                const int c = uc + dc, r = ur + dr;
                if (c < 0 || r < 0 || c >= cols_ || r >= rows_) continue;
                const std::size_t v = static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
                                      static_cast<std::size_t>(c);
                const double step = dr != 0 && dc != 0 ? diag : resolution_;
                if (dist[v] + step <= dist[u] + 1e-9 && dist[v] < best_d) {
                    best = v;
                    best_d = dist[v];
                }
            }
        }
        if (best == u) return {};
        out.push_back(best);
        u = best;
    }
    return out;
}

std::optional<std::size_t> entry_node(const NavGrid& grid, const WorldScene& scene, const Vec3& from) {
    const std::size_t own = grid.nearest_node(from);
    if (grid.is_free(own) && segment_clear(scene, from, grid.position(own))) return own;
    constexpr int kSearch = 4;
    const int oc = static_cast<int>(own % static_cast<std::size_t>(grid.cols()));
    const int orow = static_cast<int>(own / static_cast<std::size_t>(grid.cols()));
    std::vector<std::pair<double, std::size_t>> candidates;
    for (int dr = -kSearch; dr <= kSearch; ++dr) {
        for (int dc = -kSearch; dc <= kSearch; ++dc) {
            const int c = oc + dc, r = orow + dr;
            if (c < 0 || r < 0 || c >= grid.cols() || r >= grid.rows()) continue;
            const std::size_t v = static_cast<std::size_t>(r) * static_cast<std::size_t>(grid.cols()) +
                                  static_cast<std::size_t>(c);
            if (grid.is_free(v)) candidates.emplace_back(distance_xy(from, grid.position(v)), v);
        }
    }
    std::sort(candidates.begin(), candidates.end());
    for (const auto& [d, v] : candidates)
        if (segment_clear(scene, from, grid.position(v))) return v;
    return std::nullopt;
}

MoveResult navigate_to(const WorldScene& scene, RobotState& robot, const Vec3& target) {
    const NavGrid grid(scene);
    return navigate_to(grid, scene, robot, target);
}

MoveResult navigate_to(const NavGrid& grid, const WorldScene& scene, RobotState& robot, const Vec3& target) {
    if (!target.finite() || !scene.bounds.contains(target))
        throw InvalidTarget("target (" + std::to_string(target.x) + ", " + std::to_string(target.y) +
                            ") is outside the scene bounds");
    const Vec3 start = robot.position();
    const Vec3 goal{target.x, target.y, 0.0};
    MoveResult none{false, start, 0.0};
    if (robot_collides(scene, goal)) return none;
    if (segment_clear(scene, start, goal)) return move_to(scene, robot, goal);

    const auto s = entry_node(grid, scene, start);
    const auto g = entry_node(grid, scene, goal);
    if (!s || !g) return none;
    const auto nodes = grid.path(*s, *g);
    if (nodes.empty()) return none;

    std::vector<Vec3> pts{start};
    for (auto n : nodes) pts.push_back(grid.position(n));
    pts.push_back(goal);
    const auto legs = smooth(scene, pts);

    MoveResult total{true, start, 0.0};
    for (std::size_t k = 1; k < legs.size(); ++k) {
        const MoveResult leg = move_to(scene, robot, legs[k]);
        total.path_length += leg.path_length;
        total.stopped_at = leg.stopped_at;
        if (!leg.reached) {
            total.reached = false;
            return total;
        }
    }
    return total;
}

}  // namespace meia
