#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <png.h>

#include "meia/mem.hpp"

namespace meia {

FloorPlanLayout FloorPlanLayout::covering(const Bounds2& bounds, double cell_size) {
    FloorPlanLayout l;
    l.origin = {bounds.xmin, bounds.ymin, 0.0};
    l.cell_size = cell_size;
    l.cols = std::max(1, static_cast<int>(std::ceil(bounds.width() / cell_size - 1e-9)));
    l.rows = std::max(1, static_cast<int>(std::ceil(bounds.height() / cell_size - 1e-9)));
    return l;
}

std::optional<std::pair<int, int>> FloorPlanLayout::cell_of(const Vec3& p) const {
    const double fc = std::floor((p.x - origin.x) / cell_size);
    const double fr = std::floor((p.y - origin.y) / cell_size);
    if (fc < 0 || fr < 0 || fc >= cols || fr >= rows) return std::nullopt;
    return std::pair{static_cast<int>(fc), static_cast<int>(fr)};
}

Vec3 FloorPlanLayout::cell_center(int col, int row) const {
    return {origin.x + (col + 0.5) * cell_size, origin.y + (row + 0.5) * cell_size, 0.0};
}

std::size_t FloorPlan::count(CellState s) const {
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(), [s](const FloorCell& c) { return c.state == s; }));
}

FloorPlan empty_floor_plan(const FloorPlanLayout& layout) {
    FloorPlan plan;
    plan.layout = layout;
    plan.cells.assign(static_cast<std::size_t>(layout.cols) * static_cast<std::size_t>(layout.rows), FloorCell{});
    return plan;
}

void accumulate_point(FloorPlan& plan, const ColoredPoint& p, const ZBand& band) {
    const double z = p.position.z;
    if (z > band.hi) return;
    const auto cell = plan.layout.cell_of(p.position);
    if (!cell) return;
    auto& c = plan.cells[static_cast<std::size_t>(cell->second) * static_cast<std::size_t>(plan.layout.cols) +
                         static_cast<std::size_t>(cell->first)];
    if (z < band.lo) {
        if (c.state == CellState::Unknown) c.state = CellState::Free;
        return;
    }
    if (c.state != CellState::Occupied || z < c.lowest_z) {
        c.state = CellState::Occupied;
        c.color = p.color;
        c.lowest_z = z;
    }
}

FloorPlan project_floor_plan(const ColoredPointCloud& cloud, const FloorPlanLayout& layout, const ZBand& band) {
    if (!(layout.cell_size > 0.0)) throw std::invalid_argument("cell_size must be positive");
    FloorPlan plan = empty_floor_plan(layout);
    for (const auto& p : cloud.points) accumulate_point(plan, p, band);
    return plan;
}

std::string floor_plan_pgm(const FloorPlan& plan) {
    const auto& l = plan.layout;
    std::string out = "P5\n" + std::to_string(l.cols) + " " + std::to_string(l.rows) + "\n255\n";
    out.reserve(out.size() + plan.cells.size());
    for (int row = l.rows - 1; row >= 0; --row) {
        for (int col = 0; col < l.cols; ++col) {
            switch (plan.at(col, row).state) {
                case CellState::Unknown: out.push_back(static_cast<char>(0)); break;
                case CellState::Free: out.push_back(static_cast<char>(128)); break;
                case CellState::Occupied: out.push_back(static_cast<char>(255)); break;
            }
        }
    }
    return out;
}

namespace {

void png_append(png_structp png, png_bytep data, png_size_t length) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + length);
}

void png_flush_noop(png_structp) {}

}  // namespace

std::vector<std::uint8_t> floor_plan_png(const FloorPlan& plan) {
    const auto& l = plan.layout;
    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(l.cols) * static_cast<std::size_t>(l.rows) * 3, 0);
    std::size_t k = 0;
    for (int row = l.rows - 1; row >= 0; --row) {
        for (int col = 0; col < l.cols; ++col) {
            const FloorCell& c = plan.at(col, row);
            Rgb rgb = kBackgroundColor;
            if (c.state == CellState::Free) rgb = {255, 255, 255};
            if (c.state == CellState::Occupied) rgb = c.color;
            pixels[k++] = rgb.r;
            pixels[k++] = rgb.g;
            pixels[k++] = rgb.b;
        }
    }

    std::vector<std::uint8_t> out;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png == nullptr) throw std::runtime_error("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (info == nullptr || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("PNG encoding failed");
    }
    png_set_write_fn(png, &out, png_append, png_flush_noop);
    png_set_IHDR(png, info, static_cast<png_uint_32>(l.cols), static_cast<png_uint_32>(l.rows), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int row = 0; row < l.rows; ++row)
        png_write_row(png, pixels.data() + static_cast<std::size_t>(row) * static_cast<std::size_t>(l.cols) * 3);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

}  // namespace meia
