#pragma once

// Brute-force reference implementations shared by the unit and acceptance
// tests. Deliberately naive: no shared code with the library.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "meia/geometry.hpp"
#include "meia/mem.hpp"
#include "meia/scene.hpp"

namespace meia::oracle {

struct Pt {
    double i, j;
};

// Pixels whose centre lies inside the convex hull of poly.
inline std::vector<Pixel> rasterise_hull(std::vector<Pt> poly) {
    std::vector<Pt> hull;
    std::sort(poly.begin(), poly.end(), [](Pt a, Pt b) { return a.i < b.i || (a.i == b.i && a.j < b.j); });
    const auto cross = [](Pt o, Pt a, Pt b) { return (a.i - o.i) * (b.j - o.j) - (a.j - o.j) * (b.i - o.i); };
    for (int pass = 0; pass < 2; ++pass) {
        const std::size_t base = hull.size();
        for (const Pt& p : poly) {
            while (hull.size() >= base + 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0) hull.pop_back();
            hull.push_back(p);
        }
        hull.pop_back();
        std::reverse(poly.begin(), poly.end());
    }
    double lo_i = 1e9, hi_i = -1e9, lo_j = 1e9, hi_j = -1e9;
    for (const Pt& p : hull) {
        lo_i = std::min(lo_i, p.i), hi_i = std::max(hi_i, p.i);
        lo_j = std::min(lo_j, p.j), hi_j = std::max(hi_j, p.j);
    }
    std::vector<Pixel> out;
    for (int j = static_cast<int>(std::floor(lo_j)); j <= static_cast<int>(std::ceil(hi_j)); ++j) {
        for (int i = static_cast<int>(std::floor(lo_i)); i <= static_cast<int>(std::ceil(hi_i)); ++i) {
            bool inside = hull.size() >= 3;
            for (std::size_t k = 0; k < hull.size() && inside; ++k)
                inside = cross(hull[k], hull[(k + 1) % hull.size()], {double(i), double(j)}) >= 0;
            if (inside) out.push_back({i, j});
        }
    }
    return out;
}

// Convex blob: hull of 7 random points around (ci, cj).
inline std::vector<Pixel> convex_blob(std::mt19937_64& rng, double ci, double cj, double radius) {
    std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi), rad(0.6, 1.0);
    std::vector<double> angles(7);
    for (auto& a : angles) a = ang(rng);
    std::sort(angles.begin(), angles.end());
    std::vector<Pt> poly;
    for (double a : angles) {
        const double r = radius * rad(rng);
        poly.push_back({ci + r * std::cos(a), cj + r * std::sin(a)});
    }
    return rasterise_hull(std::move(poly));
}

inline std::vector<Pixel> disc(double ci, double cj, double r) {
    std::vector<Pixel> out;
    for (int j = static_cast<int>(cj - r - 1); j <= static_cast<int>(cj + r + 1); ++j)
        for (int i = static_cast<int>(ci - r - 1); i <= static_cast<int>(ci + r + 1); ++i)
            if (std::hypot(i - ci, j - cj) <= r) out.push_back({i, j});
    return out;
}

struct Partition {
    std::vector<int> labels;
    Pt c[2];
    std::size_t n[2];
    double sse;
};

// Brute force: Lloyd iterations from every pair of pixels as seeds, keeping
// the partition with the smallest within-cluster sum of squares.
inline Partition brute_force_two_means(const std::vector<Pixel>& px) {
    Partition best;
    best.sse = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < px.size(); ++a) {
        for (std::size_t b = a + 1; b < px.size(); b += 3) {
            Pt c[2] = {{double(px[a].i), double(px[a].j)}, {double(px[b].i), double(px[b].j)}};
            std::vector<int> lab(px.size(), 0);
            for (int it = 0; it < 100; ++it) {
                bool changed = false;
                for (std::size_t k = 0; k < px.size(); ++k) {
                    const double d0 = std::hypot(px[k].i - c[0].i, px[k].j - c[0].j);
                    const double d1 = std::hypot(px[k].i - c[1].i, px[k].j - c[1].j);
                    const int l = d1 < d0 ? 1 : 0;
                    changed = changed || l != lab[k];
                    lab[k] = l;
                }
                double s[2][2] = {{0, 0}, {0, 0}};
                std::size_t n[2] = {0, 0};
                for (std::size_t k = 0; k < px.size(); ++k) {
                    s[lab[k]][0] += px[k].i;
                    s[lab[k]][1] += px[k].j;
                    ++n[lab[k]];
                }
                if (n[0] == 0 || n[1] == 0) break;
                for (int q = 0; q < 2; ++q) c[q] = {s[q][0] / n[q], s[q][1] / n[q]};
                if (!changed && it > 0) break;
            }
            Partition p;
            p.labels = lab;
            p.n[0] = p.n[1] = 0;
            double s[2][2] = {{0, 0}, {0, 0}};
            for (std::size_t k = 0; k < px.size(); ++k) {
                s[lab[k]][0] += px[k].i;
                s[lab[k]][1] += px[k].j;
                ++p.n[lab[k]];
            }
            if (p.n[0] == 0 || p.n[1] == 0) continue;
            for (int q = 0; q < 2; ++q) p.c[q] = {s[q][0] / p.n[q], s[q][1] / p.n[q]};
            p.sse = 0;
            for (std::size_t k = 0; k < px.size(); ++k)
                p.sse += std::pow(px[k].i - p.c[lab[k]].i, 2) + std::pow(px[k].j - p.c[lab[k]].j, 2);
            if (p.sse < best.sse - 1e-9) best = p;
        }
    }
    return best;
}

// O(n^2) reference: mean distance to the n nearest other points, then the
// global mean and population standard deviation of those values.
inline std::vector<std::size_t> brute_force_outliers(const std::vector<Vec3>& pts, std::size_t n, double std_r) {
    std::vector<double> mean_d(pts.size());
    for (std::size_t a = 0; a < pts.size(); ++a) {
        std::vector<double> d;
        for (std::size_t b = 0; b < pts.size(); ++b)
            if (a != b) d.push_back(distance(pts[a], pts[b]));
        std::sort(d.begin(), d.end());
        double s = 0;
        for (std::size_t k = 0; k < n; ++k) s += d[k];
        mean_d[a] = s / static_cast<double>(n);
    }
    double g = 0;
    for (double v : mean_d) g += v;
    g /= static_cast<double>(pts.size());
    double var = 0;
    for (double v : mean_d) var += (v - g) * (v - g);
    const double sd = std::sqrt(var / static_cast<double>(pts.size()));
    std::vector<std::size_t> out;
    for (std::size_t a = 0; a < pts.size(); ++a)
        if (mean_d[a] > g + std_r * sd) out.push_back(a);
    return out;
}

// World point of pixel (i, j) at camera depth d, written out by hand:
// pinhole back-projection, camera mount, y mirrored, then Rz * Ry * Rx.
inline Vec3 pixel_to_world(const CameraIntrinsics& k, const CameraExtrinsics& e, const RobotPose& pose, double i,
                           double j, double d) {
    const double xc = (i - k.cx) * d / k.fx, yc = (j - k.cy) * d / k.fy, zc = d;
    double a[3];
    for (int r = 0; r < 3; ++r) a[r] = e.rotation(r, 0) * xc + e.rotation(r, 1) * yc + e.rotation(r, 2) * zc;
    const double ax = a[0] + e.translation.x, ay = -(a[1] + e.translation.y), az = a[2] + e.translation.z;
    const double ca = std::cos(pose.euler.alpha), sa = std::sin(pose.euler.alpha);
    const double cb = std::cos(pose.euler.beta), sb = std::sin(pose.euler.beta);
    const double cg = std::cos(pose.euler.gamma), sg = std::sin(pose.euler.gamma);
    const double x1 = ax, y1 = ca * ay - sa * az, z1 = sa * ay + ca * az;
    const double x2 = cb * x1 + sb * z1, y2 = y1, z2 = -sb * x1 + cb * z1;
    const double x3 = cg * x2 - sg * y2, y3 = sg * x2 + cg * y2, z3 = z2;
    return {x3 + pose.translation.x, y3 + pose.translation.y, z3 + pose.translation.z};
}

// Slab test; smallest t >= 0 where origin + t * dir enters the box.
inline std::optional<double> ray_box(const Vec3& o, const Vec3& d, const Vec3& lo, const Vec3& hi) {
    double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
    const double os[3] = {o.x, o.y, o.z}, ds[3] = {d.x, d.y, d.z}, ls[3] = {lo.x, lo.y, lo.z}, hs[3] = {hi.x, hi.y, hi.z};
    for (int a = 0; a < 3; ++a) {
        if (ds[a] == 0.0) {
            if (os[a] < ls[a] || os[a] > hs[a]) return std::nullopt;
            continue;
        }
        double ta = (ls[a] - os[a]) / ds[a], tb = (hs[a] - os[a]) / ds[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    if (t0 > t1) return std::nullopt;
    return t0;
}

}  // namespace meia::oracle
