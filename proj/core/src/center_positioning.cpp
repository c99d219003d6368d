#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "meia/error.hpp"
#include "meia/mem.hpp"

namespace meia {

namespace {

double sq_dist(const Pixel& p, const PixelCenter& c) {
    const double di = p.i - c.i, dj = p.j - c.j;
    return di * di + dj * dj;
}

}  // namespace

TwoMeansResult two_means(std::span<const Pixel> pixels, int max_iterations, double epsilon) {
    if (pixels.empty()) throw NoObservation("two_means on an empty pixel set");
    const auto [lo, hi] = std::minmax_element(pixels.begin(), pixels.end());
    TwoMeansResult r;
    r.centroids = {PixelCenter{static_cast<double>(lo->i), static_cast<double>(lo->j)},
                   PixelCenter{static_cast<double>(hi->i), static_cast<double>(hi->j)}};
    r.labels.assign(pixels.size(), 0);

    for (int it = 0; it < max_iterations; ++it) {
        double sum_i[2] = {0, 0}, sum_j[2] = {0, 0};
        std::size_t count[2] = {0, 0};
        for (std::size_t k = 0; k < pixels.size(); ++k) {
            const std::uint8_t label = sq_dist(pixels[k], r.centroids[1]) < sq_dist(pixels[k], r.centroids[0]) ? 1 : 0;
            r.labels[k] = label;
            sum_i[label] += pixels[k].i;
            sum_j[label] += pixels[k].j;
            ++count[label];
        }
        double shift = 0.0;
        for (int c = 0; c < 2; ++c) {
            r.sizes[static_cast<std::size_t>(c)] = count[c];
            if (count[c] == 0) continue;  // empty cluster keeps its centre
            const PixelCenter next{sum_i[c] / static_cast<double>(count[c]), sum_j[c] / static_cast<double>(count[c])};
            auto& cur = r.centroids[static_cast<std::size_t>(c)];
            shift = std::max(shift, std::hypot(next.i - cur.i, next.j - cur.j));
            cur = next;
        }
        r.iterations = it + 1;
        if (shift <= epsilon) break;
    }
    return r;
}

PixelCenter locate_pixel_center(std::span<const Pixel> pixels, double zeta) {
    if (pixels.empty()) throw NoObservation("no pixels for center positioning");
    const TwoMeansResult km = two_means(pixels);
    const auto& c0 = km.centroids[0];
    const auto& c1 = km.centroids[1];
    const double d = std::hypot(c0.i - c1.i, c0.j - c1.j);
    if (d > zeta) {
        // Far apart: keep the larger cluster (ties -> lower mean row).
        if (km.sizes[0] != km.sizes[1]) return km.sizes[0] > km.sizes[1] ? c0 : c1;
        return c1.j < c0.j ? c1 : c0;
    }
    return {(c0.i + c1.i) / 2.0, (c0.j + c1.j) / 2.0};
}

std::vector<ObjectObservation> extract_object_observations(const SensorFrame& frame, double zeta, AxisFlip flip) {
    std::map<int, std::vector<Pixel>> groups;
    for (int j = 0; j < frame.height; ++j)
        for (int i = 0; i < frame.width; ++i)
            if (const int id = frame.segmentation[frame.index(i, j)]; id != 0) groups[id].push_back({i, j});

    std::vector<ObjectObservation> out;
    out.reserve(groups.size());
    for (const auto& [id, pixels] : groups) {
        const PixelCenter c = locate_pixel_center(pixels, zeta);
        // The centre may fall outside the mask; sample the nearest mask pixel.
        const Pixel* best = &pixels.front();
        double best_d = std::numeric_limits<double>::infinity();
        for (const auto& p : pixels) {
            const double d = sq_dist(p, c);
            if (d < best_d) {
                best_d = d;
                best = &p;
            }
        }
        const double depth = frame.depth[frame.index(best->i, best->j)];
        if (!(depth > 0.0)) continue;
        ObjectObservation obs;
        obs.object_id = id;
        obs.category = category_from_color(frame.color(best->i, best->j));
        obs.pixel = *best;
        obs.depth = depth;
        obs.pixel_count = pixels.size();
        obs.world_pos = pixel_to_world(frame.intr, frame.extr, frame.pose,
                                       {static_cast<double>(best->i), static_cast<double>(best->j), depth}, flip);
        out.push_back(obs);
    }
    return out;
}

}  // namespace meia
