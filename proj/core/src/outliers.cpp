#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <unordered_map>

#include "meia/mem.hpp"

namespace meia {

namespace {

double coord(const Vec3& p, int axis) { return axis == 0 ? p.x : (axis == 1 ? p.y : p.z); }

double sq_distance(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

// Static k-d tree over point indices, median split on the widest axis.
class KdTree {
public:
    explicit KdTree(std::span<const Vec3> pts) : pts_(pts), index_(pts.size()) {
        std::iota(index_.begin(), index_.end(), std::size_t{0});
        if (!pts.empty()) build(0, pts.size());
    }

    // Squared distances to the k nearest points other than `self`.
    std::vector<double> knn_sq(std::size_t self, std::size_t k) const {
        std::priority_queue<double> heap;  // max-heap of the current best k
        search(0, pts_.size(), self, k, heap);
        std::vector<double> out;
        out.reserve(heap.size());
        while (!heap.empty()) {
            out.push_back(heap.top());
            heap.pop();
        }
        std::reverse(out.begin(), out.end());
        return out;
    }

private:
    struct Node {
        int axis;
        double split;
    };

    void build(std::size_t lo, std::size_t hi) {
        if (hi - lo <= kLeaf) return;
        Vec3 mn = pts_[index_[lo]], mx = mn;
        for (std::size_t k = lo; k < hi; ++k) {
            const Vec3& p = pts_[index_[k]];
            mn = {std::min(mn.x, p.x), std::min(mn.y, p.y), std::min(mn.z, p.z)};
            mx = {std::max(mx.x, p.x), std::max(mx.y, p.y), std::max(mx.z, p.z)};
        }
        const Vec3 ext = mx - mn;
        const int axis = ext.x >= ext.y && ext.x >= ext.z ? 0 : (ext.y >= ext.z ? 1 : 2);
        const std::size_t mid = lo + (hi - lo) / 2;
        std::nth_element(index_.begin() + static_cast<std::ptrdiff_t>(lo), index_.begin() + static_cast<std::ptrdiff_t>(mid),
                         index_.begin() + static_cast<std::ptrdiff_t>(hi), [&](std::size_t a, std::size_t b) {
                             return coord(pts_[a], axis) < coord(pts_[b], axis);
                         });
        nodes_[key(lo, hi)] = {axis, coord(pts_[index_[mid]], axis)};
        build(lo, mid);
        build(mid, hi);
    }

    static std::uint64_t key(std::size_t lo, std::size_t hi) { return (static_cast<std::uint64_t>(lo) << 32) | hi; }

    void search(std::size_t lo, std::size_t hi, std::size_t self, std::size_t k,
                std::priority_queue<double>& heap) const {
        if (hi - lo <= kLeaf) {
            for (std::size_t q = lo; q < hi; ++q) {
                const std::size_t idx = index_[q];
                if (idx == self) continue;
                const double d = sq_distance(pts_[self], pts_[idx]);
                if (heap.size() < k) {
                    heap.push(d);
                } else if (d < heap.top()) {
                    heap.pop();
                    heap.push(d);
                }
            }
            return;
        }
        const Node& node = nodes_.at(key(lo, hi));
        const std::size_t mid = lo + (hi - lo) / 2;
        const double delta = coord(pts_[self], node.axis) - node.split;
        // Every point on the far side is at least |delta| away.
        const bool left_first = delta < 0.0;
        if (left_first) {
            search(lo, mid, self, k, heap);
            if (heap.size() < k || delta * delta <= heap.top()) search(mid, hi, self, k, heap);
        } else {
            search(mid, hi, self, k, heap);
            if (heap.size() < k || delta * delta <= heap.top()) search(lo, mid, self, k, heap);
        }
    }

    static constexpr std::size_t kLeaf = 12;
    std::span<const Vec3> pts_;
    std::vector<std::size_t> index_;
    std::unordered_map<std::uint64_t, Node> nodes_;
};

}  // namespace

std::vector<double> mean_neighbor_distances(std::span<const Vec3> points, std::size_t n) {
    std::vector<double> means(points.size(), 0.0);
    if (points.size() <= n || n == 0) return means;
    const KdTree tree(points);
    for (std::size_t k = 0; k < points.size(); ++k) {
        double sum = 0.0;
        for (double d2 : tree.knn_sq(k, n)) sum += std::sqrt(d2);
        means[k] = sum / static_cast<double>(n);
    }
    return means;
}

OutlierResult remove_outliers(const ColoredPointCloud& cloud, const OutlierParams& params) {
    OutlierResult r;
    if (params.n == 0 || cloud.size() <= params.n) {
        r.cloud = cloud;
        r.too_small = true;
        return r;
    }
    std::vector<Vec3> pts;
    pts.reserve(cloud.size());
    for (const auto& p : cloud.points) pts.push_back(p.position);
    const auto means = mean_neighbor_distances(pts, params.n);

    double sum = 0.0;
    for (double m : means) sum += m;
    const double mean = sum / static_cast<double>(means.size());
    double var = 0.0;
    for (double m : means) var += (m - mean) * (m - mean);
    const double stddev = std::sqrt(var / static_cast<double>(means.size()));
    r.global_mean = mean;
    r.global_std = stddev;

    const double threshold = mean + params.std_r * stddev;
    r.cloud.points.reserve(cloud.size());
    for (std::size_t k = 0; k < cloud.size(); ++k) {
        if (means[k] > threshold)
            r.removed.push_back(k);
        else
            r.cloud.points.push_back(cloud.points[k]);
    }
    return r;
}

}  // namespace meia
