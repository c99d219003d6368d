#include "meia/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "meia/error.hpp"

namespace meia {

using nlohmann::json;

namespace {

struct CategoryInfo {
    Category category;
    std::string_view name;
    Rgb color;
};

constexpr std::array<CategoryInfo, kCategoryCount> kCategories{{
    {Category::Table, "table", {139, 90, 43}},
    {Category::Chair, "chair", {70, 130, 180}},
    {Category::BarCounter, "bar_counter", {128, 0, 64}},
    {Category::CoffeeMachine, "coffee_machine", {40, 40, 40}},
    {Category::Kettle, "kettle", {192, 192, 0}},
    {Category::Cup, "cup", {255, 255, 255}},
    {Category::Bread, "bread", {222, 184, 135}},
    {Category::Towel, "towel", {0, 160, 160}},
    {Category::Mop, "mop", {0, 100, 0}},
    {Category::AirConditioner, "air_conditioner", {230, 230, 250}},
    {Category::LightSwitch, "light_switch", {255, 215, 0}},
    {Category::Curtain, "curtain", {178, 34, 34}},
    {Category::Spill, "spill", {95, 60, 20}},
}};

constexpr std::array<Category, kCategoryCount> kAll{
    Category::Table, Category::Chair, Category::BarCounter, Category::CoffeeMachine, Category::Kettle,
    Category::Cup, Category::Bread, Category::Towel, Category::Mop, Category::AirConditioner,
    Category::LightSwitch, Category::Curtain, Category::Spill};

const StateKey kTableState[] = {{"dirty", false}};
const StateKey kBarState[] = {{"dirty", false}, {"milk_served", std::int64_t{0}}};
const StateKey kChairState[] = {{"aligned", true}};
const StateKey kCoffeeState[] = {{"cups_made", std::int64_t{0}}};
const StateKey kKettleState[] = {{"pours", std::int64_t{0}}};
const StateKey kBreadState[] = {{"taken", false}};
const StateKey kAcState[] = {{"power", true}, {"setpoint", std::int64_t{24}}};
const StateKey kLightState[] = {{"on", false}};
const StateKey kCurtainState[] = {{"open", true}};
const StateKey kSpillState[] = {{"dirty", true}};

int line_of_offset(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

const json& require(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError("missing field", 0, path + "." + key);
    return *it;
}

double read_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ParseError("expected number", 0, path);
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError("non-finite number", 0, path);
    return v;
}

Vec3 read_vec3(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 3) throw ParseError("expected array of 3 numbers", 0, path);
    return {read_number(j[0], path + "[0]"), read_number(j[1], path + "[1]"), read_number(j[2], path + "[2]")};
}

StateValue read_state_value(const json& j, const std::string& path) {
    if (j.is_boolean()) return j.get<bool>();
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_string()) return j.get<std::string>();
    throw ParseError("state values must be bool, integer or string", 0, path);
}

std::string describe(const ObjectInstance& o) {
    return "object " + std::to_string(o.id) + " (" + std::string(category_name(o.category)) + ")";
}

}  // namespace

std::span<const Category> all_categories() { return kAll; }

std::string_view category_name(Category c) { return kCategories[static_cast<std::size_t>(c)].name; }

std::optional<Category> parse_category(std::string_view name) {
    for (const auto& info : kCategories)
        if (info.name == name) return info.category;
    return std::nullopt;
}

std::string category_phrase(Category c) {
    std::string s(category_name(c));
    std::replace(s.begin(), s.end(), '_', ' ');
    return s;
}

Rgb category_color(Category c) { return kCategories[static_cast<std::size_t>(c)].color; }

std::optional<Category> category_from_color(Rgb color) {
    for (const auto& info : kCategories)
        if (info.color == color) return info.category;
    return std::nullopt;
}

bool is_surface(Category c) { return c == Category::Table || c == Category::BarCounter; }

std::span<const StateKey> state_schema(Category c) {
    switch (c) {
        case Category::Table: return kTableState;
        case Category::BarCounter: return kBarState;
        case Category::Chair: return kChairState;
        case Category::CoffeeMachine: return kCoffeeState;
        case Category::Kettle: return kKettleState;
        case Category::Bread: return kBreadState;
        case Category::AirConditioner: return kAcState;
        case Category::LightSwitch: return kLightState;
        case Category::Curtain: return kCurtainState;
        case Category::Spill: return kSpillState;
        default: return {};
    }
}

double Box::footprint_distance(const Vec3& p) const {
    const double dx = std::max(std::abs(p.x - center.x) - half_extents.x, 0.0);
    const double dy = std::max(std::abs(p.y - center.y) - half_extents.y, 0.0);
    return std::hypot(dx, dy);
}

bool Box::footprint_contains(const Vec3& p, double slack) const {
    return std::abs(p.x - center.x) <= half_extents.x + slack && std::abs(p.y - center.y) <= half_extents.y + slack;
}

bool is_obstacle(const ObjectInstance& o) {
    if (o.surface_of || o.category == Category::Spill) return false;
    return o.position.z - o.half_extents.z < 0.3;
}

std::size_t WalkableMask::free_count() const {
    return static_cast<std::size_t>(std::count(free.begin(), free.end(), std::uint8_t{1}));
}

const ObjectInstance* WorldScene::find(int id) const {
    auto it = std::find_if(objects.begin(), objects.end(), [id](const auto& o) { return o.id == id; });
    return it == objects.end() ? nullptr : &*it;
}

ObjectInstance* WorldScene::find(int id) {
    auto it = std::find_if(objects.begin(), objects.end(), [id](const auto& o) { return o.id == id; });
    return it == objects.end() ? nullptr : &*it;
}

WalkableMask WorldScene::walkable_mask(double resolution) const {
    WalkableMask mask;
    mask.resolution = resolution;
    mask.origin = {bounds.xmin, bounds.ymin, 0.0};
    mask.cols = std::max(1, static_cast<int>(std::ceil(bounds.width() / resolution - 1e-9)));
    mask.rows = std::max(1, static_cast<int>(std::ceil(bounds.height() / resolution - 1e-9)));
    mask.free.assign(static_cast<std::size_t>(mask.cols) * static_cast<std::size_t>(mask.rows), 1);
    for (int r = 0; r < mask.rows; ++r) {
        for (int c = 0; c < mask.cols; ++c) {
            const Vec3 centre{bounds.xmin + (c + 0.5) * resolution, bounds.ymin + (r + 0.5) * resolution, 0.0};
            for (const auto& o : objects) {
                if (is_obstacle(o) && o.box().footprint_contains(centre)) {
                    mask.free[static_cast<std::size_t>(r * mask.cols + c)] = 0;
                    break;
                }
            }
        }
    }
    return mask;
}

void validate_scene(const WorldScene& scene) {
    const auto& b = scene.bounds;
    if (!(b.xmax > b.xmin) || !(b.ymax > b.ymin)) throw ValidationError("bounds must have positive area");
    std::set<int> ids;
    constexpr double eps = 1e-9;
    for (const auto& o : scene.objects) {
        if (o.id <= 0) throw ValidationError(describe(o) + ": id must be positive");
        if (!ids.insert(o.id).second) throw ValidationError(describe(o) + ": duplicate id");
        const auto& h = o.half_extents;
        if (!(h.x > 0 && h.y > 0 && h.z > 0)) throw ValidationError(describe(o) + ": half extents must be > 0");
        if (!o.position.finite() || !h.finite()) throw ValidationError(describe(o) + ": non-finite geometry");
        const Vec3 lo = o.box().min(), hi = o.box().max();
        if (lo.x < b.xmin - eps || lo.y < b.ymin - eps || hi.x > b.xmax + eps || hi.y > b.ymax + eps)
            throw ValidationError(describe(o) + ": outside scene bounds");
        if (lo.z < -eps) throw ValidationError(describe(o) + ": below the floor");
        const auto schema = state_schema(o.category);
        for (const auto& [key, value] : o.state) {
            auto it = std::find_if(schema.begin(), schema.end(), [&](const StateKey& k) { return k.key == key; });
            if (it == schema.end()) throw ValidationError(describe(o) + ": undeclared state key '" + key + "'");
            if (it->default_value.index() != value.index())
                throw ValidationError(describe(o) + ": wrong type for state key '" + key + "'");
        }
    }
    for (const auto& o : scene.objects) {
        if (!o.surface_of) continue;
        const auto* s = scene.find(*o.surface_of);
        if (s == nullptr || !is_surface(s->category))
            throw ValidationError(describe(o) + ": surface_of must reference a table or bar counter");
    }
    for (std::size_t a = 0; a < scene.objects.size(); ++a) {
        const auto& oa = scene.objects[a];
        if (!is_surface(oa.category)) continue;
        for (std::size_t c = a + 1; c < scene.objects.size(); ++c) {
            const auto& oc = scene.objects[c];
            if (!is_surface(oc.category)) continue;
            const bool overlap = std::abs(oa.position.x - oc.position.x) < oa.half_extents.x + oc.half_extents.x - eps &&
                                 std::abs(oa.position.y - oc.position.y) < oa.half_extents.y + oc.half_extents.y - eps;
            if (overlap) throw ValidationError(describe(oc) + ": overlaps " + describe(oa));
        }
    }
}

WorldScene scene_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("scene must be a JSON object", 0, "$");
    WorldScene scene;
    const json& bounds = require(j, "bounds", "$");
    if (!bounds.is_array() || bounds.size() != 4) throw ParseError("expected [xmin,ymin,xmax,ymax]", 0, "$.bounds");
    scene.bounds = {read_number(bounds[0], "$.bounds[0]"), read_number(bounds[1], "$.bounds[1]"),
                    read_number(bounds[2], "$.bounds[2]"), read_number(bounds[3], "$.bounds[3]")};
    const json& objects = require(j, "objects", "$");
    if (!objects.is_array()) throw ParseError("expected array", 0, "$.objects");
    for (std::size_t k = 0; k < objects.size(); ++k) {
        const std::string path = "$.objects[" + std::to_string(k) + "]";
        const json& jo = objects[k];
        if (!jo.is_object()) throw ParseError("expected object", 0, path);
        ObjectInstance o;
        const json& id = require(jo, "id", path);
        if (!id.is_number_integer()) throw ParseError("expected integer", 0, path + ".id");
        o.id = id.get<int>();
        const json& cat = require(jo, "category", path);
        if (!cat.is_string()) throw ParseError("expected string", 0, path + ".category");
        auto parsed = parse_category(cat.get<std::string>());
        if (!parsed) throw ParseError("unknown category '" + cat.get<std::string>() + "'", 0, path + ".category");
        o.category = *parsed;
        o.position = read_vec3(require(jo, "position", path), path + ".position");
        o.half_extents = read_vec3(require(jo, "half_extents", path), path + ".half_extents");
        if (auto it = jo.find("surface_of"); it != jo.end() && !it->is_null()) {
            if (!it->is_number_integer()) throw ParseError("expected integer or null", 0, path + ".surface_of");
            o.surface_of = it->get<int>();
        }
        for (const auto& key : state_schema(o.category)) o.state.emplace(std::string(key.key), key.default_value);
        if (auto it = jo.find("state"); it != jo.end() && !it->is_null()) {
            if (!it->is_object()) throw ParseError("expected object", 0, path + ".state");
            for (const auto& [key, value] : it->items())
                o.state[key] = read_state_value(value, path + ".state." + key);
        }
        scene.objects.push_back(std::move(o));
    }
    validate_scene(scene);
    return scene;
}

WorldScene load_scene(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text.begin(), json_text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), line_of_offset(json_text, e.byte), "$");
    }
    return scene_from_json(j);
}

json state_value_to_json(const StateValue& v) {
    return std::visit([](const auto& x) { return json(x); }, v);
}

std::string state_value_to_string(const StateValue& v) {
    return state_value_to_json(v).dump();
}

json scene_to_json(const WorldScene& scene) {
    json objects = json::array();
    for (const auto& o : scene.objects) {
        json state = json::object();
        for (const auto& [k, v] : o.state) state[k] = state_value_to_json(v);
        objects.push_back({{"id", o.id},
                           {"category", category_name(o.category)},
                           {"position", {o.position.x, o.position.y, o.position.z}},
                           {"half_extents", {o.half_extents.x, o.half_extents.y, o.half_extents.z}},
                           {"surface_of", o.surface_of ? json(*o.surface_of) : json(nullptr)},
                           {"state", state}});
    }
    const auto& b = scene.bounds;
    return {{"bounds", {b.xmin, b.ymin, b.xmax, b.ymax}}, {"objects", objects}};
}

std::string dump_scene(const WorldScene& scene) { return scene_to_json(scene).dump(2) + "\n"; }

}  // namespace meia
