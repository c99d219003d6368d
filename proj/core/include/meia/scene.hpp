#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "meia/geometry.hpp"

namespace meia {

// The thirteen object categories of the desk-scale cafe.
enum class Category : std::uint8_t {
    Table,
    Chair,
    BarCounter,
    CoffeeMachine,
    Kettle,
    Cup,
    Bread,
    Towel,
    Mop,
    AirConditioner,
    LightSwitch,
    Curtain,
    Spill,
};

inline constexpr std::size_t kCategoryCount = 13;

std::span<const Category> all_categories();
std::string_view category_name(Category c);
std::optional<Category> parse_category(std::string_view name);
// Human-readable form used in question text ("coffee machine").
std::string category_phrase(Category c);

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    constexpr bool operator==(const Rgb&) const = default;
};

// Fixed category colour table used by the renderer. Floor and background
// have their own colours, distinct from every category.
Rgb category_color(Category c);
std::optional<Category> category_from_color(Rgb color);
inline constexpr Rgb kFloorColor{200, 200, 200};
inline constexpr Rgb kBackgroundColor{0, 0, 0};

// Tables and the bar counter: objects other items can stand on.
bool is_surface(Category c);

using StateValue = std::variant<bool, std::int64_t, std::string>;
using ObjectState = std::map<std::string, StateValue, std::less<>>;

struct StateKey {
    std::string_view key;
    StateValue default_value;
};

// Declared state keys (with defaults) for a category.
std::span<const StateKey> state_schema(Category c);

struct Box {
    Vec3 center;
    Vec3 half_extents;

    Vec3 min() const { return center - half_extents; }
    Vec3 max() const { return center + half_extents; }
    // 2-D distance from a point to the footprint rectangle (0 inside).
    double footprint_distance(const Vec3& p) const;
    bool footprint_contains(const Vec3& p, double slack = 0.0) const;
};

struct ObjectInstance {
    int id = 0;
    Category category = Category::Table;
    Vec3 position;
    Vec3 half_extents{0.1, 0.1, 0.1};
    std::optional<int> surface_of;
    ObjectState state;

    Box box() const { return {position, half_extents}; }
};

struct Bounds2 {
    double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    bool contains(const Vec3& p, double slack = 0.0) const {
        return p.x >= xmin - slack && p.x <= xmax + slack && p.y >= ymin - slack && p.y <= ymax + slack;
    }
};

// Robot body radius used for every collision check.
inline constexpr double kRobotRadius = 0.25;

// Floor-standing objects that block robot motion.
bool is_obstacle(const ObjectInstance& o);

struct WalkableMask {
    double resolution = 0.1;
    Vec3 origin;
    int cols = 0;
    int rows = 0;
    std::vector<std::uint8_t> free;  // row-major, 1 = walkable

    std::size_t free_count() const;
};

struct WorldScene {
    Bounds2 bounds;
    std::vector<ObjectInstance> objects;

    const ObjectInstance* find(int id) const;
    ObjectInstance* find(int id);
    // Cells whose centre is outside every obstacle footprint.
    WalkableMask walkable_mask(double resolution = 0.1) const;
};

// Parses and validates scene JSON. Throws ParseError (with line and field
// path) for malformed input and ValidationError naming the offending object.
WorldScene load_scene(std::string_view json_text);
WorldScene scene_from_json(const nlohmann::json& j);
nlohmann::json scene_to_json(const WorldScene& scene);
std::string dump_scene(const WorldScene& scene);
void validate_scene(const WorldScene& scene);

nlohmann::json state_value_to_json(const StateValue& v);
std::string state_value_to_string(const StateValue& v);

}  // namespace meia
