#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "meia/scene.hpp"

namespace meia::test {

inline std::string fixture_path(const std::string& name) { return std::string(MEIA_FIXTURE_DIR) + "/" + name; }

inline std::string read_fixture(const std::string& name) {
    std::ifstream in(fixture_path(name), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline WorldScene cafe_small() { return load_scene(read_fixture("cafe_small.json")); }

// Adds an object with the category's default state.
inline ObjectInstance& add_object(WorldScene& s, int id, Category c, Vec3 pos, Vec3 half,
                                  std::optional<int> surface = std::nullopt) {
    ObjectInstance o;
    o.id = id;
    o.category = c;
    o.position = pos;
    o.half_extents = half;
    o.surface_of = surface;
    for (const auto& k : state_schema(c)) o.state.emplace(std::string(k.key), k.default_value);
    s.objects.push_back(o);
    return s.objects.back();
}

}  // namespace meia::test
