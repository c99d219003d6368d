#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "meia/error.hpp"
#include "meia/mem.hpp"

namespace meia {

using nlohmann::json;

EnvironmentMemory::EnvironmentMemory(Bounds2 bounds, MemoryConfig config, MemoryFlags flags)
    : bounds_(bounds), config_(config), flags_(flags) {
    plan_ = empty_floor_plan(FloorPlanLayout::covering(bounds_, config_.cell_size));
}

void EnvironmentMemory::clear() {
    language_.clear();
    cloud_.points.clear();
    voxels_.clear();
    plan_ = empty_floor_plan(plan_.layout);
}

bool EnvironmentMemory::add_point(const ColoredPoint& p) {
    const Vec3& w = p.position;
    if (!w.finite() || !bounds_.contains(w, config_.bounds_slack) || w.z < -config_.bounds_slack) return false;
    // 21 bits per axis, offset so that the slack region stays non-negative.
    const auto q = [&](double v, double lo) {
        return static_cast<std::uint64_t>(std::floor((v - lo) / config_.voxel_size)) & 0x1FFFFFu;
    };
    const double lo = -config_.bounds_slack;
    const std::uint64_t key = (q(w.x, bounds_.xmin + lo) << 42) | (q(w.y, bounds_.ymin + lo) << 21) | q(w.z, lo);
    if (!voxels_.insert(key).second) return false;
    cloud_.points.push_back(p);
    accumulate_point(plan_, p, config_.band);
    return true;
}

void EnvironmentMemory::integrate_frame(const SensorFrame& frame, std::int64_t step) {
    if (flags_.language_memory) {
        for (const auto& obs : extract_object_observations(frame, config_.zeta, config_.flip)) {
            if (!obs.category) continue;
            language_[obs.object_id] = {obs.object_id, *obs.category, obs.world_pos, step};
        }
    }
    if (flags_.image_memory) {
        for (int j = 0; j < frame.height; ++j) {
            for (int i = 0; i < frame.width; ++i) {
                const double d = frame.depth[frame.index(i, j)];
                if (!(d > 0.0)) continue;
                const Vec3 w = pixel_to_world(frame.intr, frame.extr, frame.pose,
                                              {static_cast<double>(i), static_cast<double>(j), d}, config_.flip);
                add_point({w, frame.color(i, j)});
            }
        }
    }
}

void EnvironmentMemory::rebuild_derived() {
    auto points = std::move(cloud_.points);
    cloud_.points.clear();
    voxels_.clear();
    plan_ = empty_floor_plan(FloorPlanLayout::covering(bounds_, config_.cell_size));
    for (const auto& p : points) add_point(p);
}

OutlierResult EnvironmentMemory::filter_outliers(const OutlierParams& params) {
    OutlierResult r = remove_outliers(cloud_, params);
    if (!r.too_small) {
        cloud_ = r.cloud;
        rebuild_derived();
    }
    return r;
}

std::vector<LanguageMemoryEntry> EnvironmentMemory::entries_of(Category c, const Vec3& from) const {
    std::vector<LanguageMemoryEntry> out;
    for (const auto& [id, e] : language_)
        if (e.category == c) out.push_back(e);
    std::stable_sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
        const double da = distance(a.world_pos, from), db = distance(b.world_pos, from);
        if (da != db) return da < db;
        return a.object_id < b.object_id;
    });
    return out;
}

bool EnvironmentMemory::operator==(const EnvironmentMemory& o) const {
    return language_ == o.language_ && cloud_ == o.cloud_ && plan_ == o.plan_ && flags_ == o.flags_;
}

std::string serialize_memory(const EnvironmentMemory& mem) {
    const auto& c = mem.config();
    const auto& b = mem.bounds();
    json language = json::array();
    for (const auto& [id, e] : mem.language())
        language.push_back({{"id", e.object_id},
                            {"category", category_name(e.category)},
                            {"position", {e.world_pos.x, e.world_pos.y, e.world_pos.z}},
                            {"last_seen", e.last_seen}});
    json cloud = json::array();
    for (const auto& p : mem.cloud().points)
        cloud.push_back({p.position.x, p.position.y, p.position.z, p.color.r, p.color.g, p.color.b});
    json j = {{"format", "meia-memory"},
              {"version", 1},
              {"bounds", {b.xmin, b.ymin, b.xmax, b.ymax}},
              {"config",
               {{"zeta", c.zeta},
                {"voxel_size", c.voxel_size},
                {"cell_size", c.cell_size},
                {"z_band", {c.band.lo, c.band.hi}},
                {"bounds_slack", c.bounds_slack},
                {"axis_flip", c.flip == AxisFlip::NegateY ? "negate_y" : "negate_x"}}},
              {"flags",
               {{"language_memory", mem.flags().language_memory}, {"image_memory", mem.flags().image_memory}}},
              {"language", language},
              {"cloud", cloud}};
    return j.dump() + "\n";
}

EnvironmentMemory deserialize_memory(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), 0, "$");
    }
    try {
        if (j.at("format") != "meia-memory") throw ParseError("not a memory document", 0, "$.format");
        const auto& jb = j.at("bounds");
        const Bounds2 bounds{jb.at(0).get<double>(), jb.at(1).get<double>(), jb.at(2).get<double>(),
                             jb.at(3).get<double>()};
        const auto& jc = j.at("config");
        MemoryConfig config;
        config.zeta = jc.at("zeta").get<double>();
        config.voxel_size = jc.at("voxel_size").get<double>();
        config.cell_size = jc.at("cell_size").get<double>();
        config.band = {jc.at("z_band").at(0).get<double>(), jc.at("z_band").at(1).get<double>()};
        config.bounds_slack = jc.at("bounds_slack").get<double>();
        config.flip = jc.at("axis_flip").get<std::string>() == "negate_x" ? AxisFlip::NegateX : AxisFlip::NegateY;
        if (!(config.cell_size > 0.0) || !(config.voxel_size > 0.0))
            throw ParseError("cell_size and voxel_size must be positive", 0, "$.config");
        const auto& jf = j.at("flags");
        const MemoryFlags flags{jf.at("language_memory").get<bool>(), jf.at("image_memory").get<bool>()};

        EnvironmentMemory mem(bounds, config, flags);
        for (const auto& je : j.at("language")) {
            LanguageMemoryEntry e;
            e.object_id = je.at("id").get<int>();
            const auto cat = parse_category(je.at("category").get<std::string>());
            if (!cat) throw ParseError("unknown category", 0, "$.language");
            e.category = *cat;
            const auto& p = je.at("position");
            e.world_pos = {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()};
            e.last_seen = je.at("last_seen").get<std::int64_t>();
            mem.language_[e.object_id] = e;
        }
        for (const auto& jp : j.at("cloud")) {
            if (!jp.is_array() || jp.size() != 6) throw ParseError("cloud points are [x,y,z,r,g,b]", 0, "$.cloud");
            mem.cloud_.points.push_back({{jp[0].get<double>(), jp[1].get<double>(), jp[2].get<double>()},
                                         {jp[3].get<std::uint8_t>(), jp[4].get<std::uint8_t>(),
                                          jp[5].get<std::uint8_t>()}});
        }
        mem.rebuild_derived();
        return mem;
    } catch (const json::exception& e) {
        throw ParseError(e.what(), 0, "$");
    }
}

}  // namespace meia
