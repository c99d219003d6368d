#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "meia/mem.hpp"
#include "oracles.hpp"

using namespace meia;
using meia::oracle::brute_force_outliers;

namespace {

ColoredPointCloud random_cloud(std::mt19937_64& rng, std::size_t size) {
    std::normal_distribution<double> core(0.0, 0.3);
    std::uniform_real_distribution<double> wide(-4.0, 4.0), u(0, 1);
    ColoredPointCloud c;
    for (std::size_t k = 0; k < size; ++k) {
        const bool stray = u(rng) < 0.05;
        const Vec3 p = stray ? Vec3{wide(rng), wide(rng), wide(rng)} : Vec3{core(rng), core(rng), 1 + core(rng)};
        c.points.push_back({p, {static_cast<std::uint8_t>(k % 256), 10, 20}});
    }
    return c;
}

}  // namespace

TEST(Outliers, MatchesBruteForceOnHundredRandomClouds) {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<std::size_t> size(40, 500), nn(2, 24);
    std::uniform_real_distribution<double> sr(0.5, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto cloud = random_cloud(rng, size(rng));
        OutlierParams params;
        params.n = std::min<std::size_t>(nn(rng), cloud.size() - 1);
        params.std_r = sr(rng);
        std::vector<Vec3> pts;
        for (const auto& p : cloud.points) pts.push_back(p.position);
        const auto want = brute_force_outliers(pts, params.n, params.std_r);
        const auto got = remove_outliers(cloud, params);
        ASSERT_EQ(got.removed, want) << "trial " << trial;
        ASSERT_EQ(got.cloud.size(), cloud.size() - want.size());
        std::size_t w = 0;
        for (std::size_t k = 0; k < cloud.size(); ++k) {
            if (std::binary_search(want.begin(), want.end(), k)) continue;
            ASSERT_EQ(got.cloud.points[w++], cloud.points[k]);
        }
    }
}

TEST(Outliers, NeighbourMeansAgreeWithBruteForce) {
    std::mt19937_64 rng(29);
    const auto cloud = random_cloud(rng, 120);
    std::vector<Vec3> pts;
    for (const auto& p : cloud.points) pts.push_back(p.position);
    const auto got = mean_neighbor_distances(pts, 5);
    for (std::size_t a = 0; a < pts.size(); ++a) {
        std::vector<double> d;
        for (std::size_t b = 0; b < pts.size(); ++b)
            if (a != b) d.push_back(distance(pts[a], pts[b]));
        std::sort(d.begin(), d.end());
        EXPECT_NEAR(got[a], (d[0] + d[1] + d[2] + d[3] + d[4]) / 5, 1e-12);
    }
}

TEST(Outliers, SmallCloudIsReturnedUnchanged) {
    std::mt19937_64 rng(31);
    const auto cloud = random_cloud(rng, 10);
    OutlierParams p;
    p.n = 10;
    const auto r = remove_outliers(cloud, p);
    EXPECT_TRUE(r.too_small);
    EXPECT_EQ(r.cloud, cloud);
    EXPECT_TRUE(r.removed.empty());
}

TEST(Outliers, IsolatedPointIsDropped) {
    ColoredPointCloud c;
    for (int x = 0; x < 6; ++x)
        for (int y = 0; y < 6; ++y) c.points.push_back({{x * 0.01, y * 0.01, 0}, {}});
    c.points.push_back({{3, 3, 3}, {}});
    OutlierParams p;
    p.n = 4;
    p.std_r = 1.0;
    const auto r = remove_outliers(c, p);
    ASSERT_EQ(r.removed.size(), 1u);
    EXPECT_EQ(r.removed[0], 36u);
}

TEST(Outliers, GridLosesOnlyItsCorners) {
    // 8x8 lattice, 4 neighbours: interior and edge means sit at one spacing,
    // corners at (2 + 2 sqrt 2)/4 spacings, which is past mean + 3 std.
    ColoredPointCloud c;
    for (int x = 0; x < 8; ++x)
        for (int y = 0; y < 8; ++y) c.points.push_back({{x * 0.05, y * 0.05, 0}, {}});
    const auto r = remove_outliers(c, {4, 3.0});
    EXPECT_EQ(r.removed, (std::vector<std::size_t>{0, 7, 56, 63}));
    EXPECT_TRUE(remove_outliers(c, {4, 4.0}).removed.empty());
}
