#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "meia/geometry.hpp"
#include "meia/robot.hpp"
#include "meia/scene.hpp"

namespace meia {

// ---------------------------------------------------------------------------
// Object centre positioning on segmentation masks.

struct Pixel {
    int i = 0;  // column
    int j = 0;  // row
    auto operator<=>(const Pixel&) const = default;
};

struct PixelCenter {
    double i = 0.0;
    double j = 0.0;
};

struct TwoMeansResult {
    std::array<PixelCenter, 2> centroids;
    std::array<std::size_t, 2> sizes{};
    std::vector<std::uint8_t> labels;  // per input pixel, 0 or 1
    int iterations = 0;
};

// Deterministic 2-means (Lloyd) over pixel coordinates. Initial centres are
// the lexicographically smallest and largest (i, j) pixels; stops after
// `max_iterations` or when no centre moves more than `epsilon`.
TwoMeansResult two_means(std::span<const Pixel> pixels, int max_iterations = 20, double epsilon = 1e-6);

inline constexpr double kDefaultZeta = 25.0;

// Splits the pixel set into two clusters. When the centres are more than
// `zeta` pixels apart the centroid of the larger cluster is returned (ties:
// lower mean row); otherwise the midpoint of the two centres.
// Throws NoObservation for an empty set.
PixelCenter locate_pixel_center(std::span<const Pixel> pixels, double zeta = kDefaultZeta);

struct ObjectObservation {
    int object_id = 0;
    std::optional<Category> category;  // decoded from the pixel colour
    Vec3 world_pos;
    Pixel pixel;        // pixel actually sampled (centre snapped onto the mask)
    double depth = 0.0;
    std::size_t pixel_count = 0;
};

// Groups non-background pixels by id, positions each group's centre, snaps
// it to the nearest pixel carrying that id, and back-projects it with the
// depth read there. Sorted by object id.
std::vector<ObjectObservation> extract_object_observations(const SensorFrame& frame, double zeta = kDefaultZeta,
                                                           AxisFlip flip = AxisFlip::NegateY);

// ---------------------------------------------------------------------------
// Point clouds and floor plans.

struct ColoredPoint {
    Vec3 position;
    Rgb color;
    bool operator==(const ColoredPoint&) const = default;
};

struct ColoredPointCloud {
    std::vector<ColoredPoint> points;
    std::size_t size() const { return points.size(); }
    bool operator==(const ColoredPointCloud&) const = default;
};

struct OutlierParams {
    std::size_t n = 16;   // neighbours per point
    double std_r = 2.0;   // standard-deviation multiple
};

struct OutlierResult {
    ColoredPointCloud cloud;
    std::vector<std::size_t> removed;  // indices into the input, ascending
    bool too_small = false;            // input had <= n points; returned unchanged
    double global_mean = 0.0;
    double global_std = 0.0;
};

// Mean distance from every point to its n nearest other points (k-d tree).
std::vector<double> mean_neighbor_distances(std::span<const Vec3> points, std::size_t n);

// Drops points whose mean neighbour distance exceeds mean + std_r * std of
// those per-point means (population standard deviation).
OutlierResult remove_outliers(const ColoredPointCloud& cloud, const OutlierParams& params = {});

struct ZBand {
    double lo = 0.02;
    double hi = 1.8;
};

struct FloorPlanLayout {
    Vec3 origin;            // world position of the corner of cell (0, 0)
    double cell_size = 0.1;
    int cols = 0;
    int rows = 0;

    static FloorPlanLayout covering(const Bounds2& bounds, double cell_size);
    std::optional<std::pair<int, int>> cell_of(const Vec3& p) const;
    Vec3 cell_center(int col, int row) const;
};

enum class CellState : std::uint8_t { Unknown, Free, Occupied };

struct FloorCell {
    CellState state = CellState::Unknown;
    Rgb color;
    double lowest_z = 0.0;
    bool operator==(const FloorCell&) const = default;
};

struct FloorPlan {
    FloorPlanLayout layout;
    std::vector<FloorCell> cells;  // row-major, row 0 at origin.y

    const FloorCell& at(int col, int row) const {
        return cells[static_cast<std::size_t>(row) * static_cast<std::size_t>(layout.cols) +
                     static_cast<std::size_t>(col)];
    }
    std::size_t count(CellState s) const;
    bool operator==(const FloorPlan& o) const { return cells == o.cells; }
};

FloorPlan empty_floor_plan(const FloorPlanLayout& layout);

// Adds one point to a plan: points inside the band occupy their cell (the
// colour of the lowest such point wins); points below the band are floor
// returns and mark the cell free unless it is occupied; points above the
// band are ignored.
void accumulate_point(FloorPlan& plan, const ColoredPoint& p, const ZBand& band);

FloorPlan project_floor_plan(const ColoredPointCloud& cloud, const FloorPlanLayout& layout, const ZBand& band = {});

// Binary PGM (P5, maxval 255): unknown 0, free 128, occupied 255. The first
// image row is the plan's highest-y row.
std::string floor_plan_pgm(const FloorPlan& plan);
// RGB PNG: occupied cells in their colour, free white, unknown black.
std::vector<std::uint8_t> floor_plan_png(const FloorPlan& plan);

// ---------------------------------------------------------------------------
// Multimodal environment memory.

struct LanguageMemoryEntry {
    int object_id = 0;
    Category category = Category::Table;
    Vec3 world_pos;
    std::int64_t last_seen = 0;
    bool operator==(const LanguageMemoryEntry&) const = default;
};

struct MemoryFlags {
    bool language_memory = true;
    bool image_memory = true;
    bool operator==(const MemoryFlags&) const = default;
};

struct MemoryConfig {
    double zeta = kDefaultZeta;
    double voxel_size = 0.05;  // fusion grid: at most one stored point per voxel
    double cell_size = 0.10;
    ZBand band;
    double bounds_slack = 1.0;
    AxisFlip flip = AxisFlip::NegateY;
};

// Language memory (object id -> category + world position) plus image
// memory (fused coloured cloud and its floor plan). A plain value type:
// copies are independent snapshots.
class EnvironmentMemory {
public:
    explicit EnvironmentMemory(Bounds2 bounds = {0, 0, 1, 1}, MemoryConfig config = {}, MemoryFlags flags = {});

    // Upserts observed objects (latest wins) when language memory is
    // enabled; back-projects every pixel with depth into the fused cloud and
    // refreshes the floor plan when image memory is enabled.
    void integrate_frame(const SensorFrame& frame, std::int64_t step);

    // Applies statistical outlier removal to the cloud and re-derives the plan.
    OutlierResult filter_outliers(const OutlierParams& params = {});

    void clear();

    const std::map<int, LanguageMemoryEntry>& language() const { return language_; }
    const ColoredPointCloud& cloud() const { return cloud_; }
    const FloorPlan& plan() const { return plan_; }
    const MemoryFlags& flags() const { return flags_; }
    void set_flags(MemoryFlags f) { flags_ = f; }
    const MemoryConfig& config() const { return config_; }
    const Bounds2& bounds() const { return bounds_; }

    // Entries of a category sorted by distance to `from`, then id.
    std::vector<LanguageMemoryEntry> entries_of(Category c, const Vec3& from) const;

    bool operator==(const EnvironmentMemory& o) const;

    friend EnvironmentMemory deserialize_memory(std::string_view text);

private:
    void rebuild_derived();
    bool add_point(const ColoredPoint& p);

    Bounds2 bounds_;
    MemoryConfig config_;
    MemoryFlags flags_;
    std::map<int, LanguageMemoryEntry> language_;
    ColoredPointCloud cloud_;
    FloorPlan plan_;
    std::unordered_set<std::uint64_t> voxels_;
};

std::string serialize_memory(const EnvironmentMemory& mem);
// Throws ParseError on malformed input.
EnvironmentMemory deserialize_memory(std::string_view text);

}  // namespace meia
