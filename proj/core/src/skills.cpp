#include "meia/skills.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <memory>

#include "meia/effects.hpp"

namespace meia {

namespace {

const std::vector<SkillSignature>& signatures() {
    static const std::vector<SkillSignature> sigs = {
        {SkillKind::MoveTo, "move_to", {{"target", {}}},
         "move next to the named item using environment memory; target is a category (coffee_machine) or "
         "category_id (table_7)",
         "target present in language memory; a collision-free path exists", "robot position", false},
        {SkillKind::ProduceAndGrabMilk, "produce_and_grab_milk", {},
         "produce a glass of milk on the bar counter and grab it", "within 0.8 m of a bar_counter",
         "bar_counter.milk_served += 1; robot holds milk", false},
        {SkillKind::MakeCoffee, "make_coffee", {}, "operate the coffee machine to make coffee",
         "within 0.8 m of a coffee_machine", "coffee_machine.cups_made += 1", false},
        {SkillKind::PourWater, "pour_water", {}, "operate the kettle to pour water", "within 0.8 m of a kettle",
         "kettle.pours += 1", false},
        {SkillKind::GrabBread, "grab_bread", {}, "grab the bread", "within 0.8 m of a bread",
         "bread.taken = true; robot holds bread", false},
        {SkillKind::ControlAc, "control_ac", {{"command", {"raise", "lower", "on", "off"}}},
         "control the air conditioner: switch it on/off or raise/lower the setpoint by one degree",
         "within 0.8 m of an air_conditioner; raise/lower need power on",
         "air_conditioner.power or air_conditioner.setpoint", false},
        {SkillKind::MopFloor, "mop_floor", {}, "mop the spill next to the robot", "within 0.8 m of a spill",
         "spill.dirty = false", false},
        {SkillKind::WipeTable, "wipe_table", {}, "wipe the table next to the robot with a towel",
         "holding towel; within 0.8 m of a table or bar_counter", "table.dirty = false", false},
        {SkillKind::ControlCurtains, "control_curtains", {{"command", {"open", "close"}}},
         "open or close the curtain next to the robot", "within 0.8 m of a curtain", "curtain.open", false},
        {SkillKind::ControlLighting, "control_lighting", {{"command", {"on", "off"}}},
         "turn the lights on or off at the light switch", "within 0.8 m of a light_switch", "light_switch.on",
         false},
        {SkillKind::StraightenChair, "straighten_chair", {}, "straighten the misplaced chair next to the robot",
         "within 0.8 m of a chair", "chair.aligned = true", false},
        {SkillKind::TakeTowel, "take_towel", {}, "take a clean towel from the robot's supply", "none",
         "robot holds towel", true},
    };
    return sigs;
}

SkillOutcome fail(FailureReason reason, std::string detail, double traveled = 0.0) {
    return {false, reason, std::move(detail), false, traveled};
}

SkillOutcome from_effect(const EffectResult& r) {
    if (r.status == EffectResult::Status::PreconditionFailed) return fail(FailureReason::PreconditionFailed, r.detail);
    return {true, std::nullopt, {}, r.status == EffectResult::Status::NoOp, 0.0};
}

// Nearest object of the category by footprint distance (ties: lowest id),
// provided it is within reach.
ObjectInstance* reachable_object(WorldScene& scene, const RobotState& robot, Category c, bool (*also)(Category) = nullptr) {
    ObjectInstance* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (auto& o : scene.objects) {
        if (o.category != c && !(also != nullptr && also(o.category))) continue;
        const double d = o.box().footprint_distance(robot.position());
        if (d < best_d || (d == best_d && best != nullptr && o.id < best->id)) {
            best_d = d;
            best = &o;
        }
    }
    return best_d <= kManipulationReach ? best : nullptr;
}

std::int64_t int_state(const ObjectInstance& o, const std::string& key) {
    auto it = o.state.find(key);
    if (it == o.state.end()) return 0;
    if (const auto* v = std::get_if<std::int64_t>(&it->second)) return *v;
    return 0;
}

bool bool_state(const ObjectInstance& o, const std::string& key) {
    auto it = o.state.find(key);
    if (it == o.state.end()) return false;
    if (const auto* v = std::get_if<bool>(&it->second)) return *v;
    return false;
}

SkillOutcome manipulate(WorldScene& scene, RobotState& robot, Category c, const std::string& key,
                        auto&& value_of, std::optional<std::string> require_held = std::nullopt,
                        std::optional<std::string> set_held = std::nullopt, bool (*also)(Category) = nullptr) {
    ObjectInstance* o = reachable_object(scene, robot, c, also);
    if (o == nullptr)
        return fail(FailureReason::PreconditionFailed,
                    "no " + std::string(category_name(c)) + " within " + std::to_string(kManipulationReach).substr(0, 3) +
                        " m");
    Effect e;
    e.change = StateChange{o->id, key, value_of(*o)};
    e.require_held = std::move(require_held);
    e.set_held = std::move(set_held);
    return from_effect(apply_effect(scene, robot, e));
}

SkillOutcome do_move(const SkillAction& action, WorldScene& scene, RobotState& robot, const EnvironmentMemory& mem,
                     const NavGrid* shared_grid) {
    const auto target = parse_target_name(action.args.front());
    if (!target) return fail(FailureReason::TargetUnknown, "'" + action.args.front() + "' is not a known item name");
    auto entries = mem.entries_of(target->category, robot.position());
    if (target->id)
        std::erase_if(entries, [&](const LanguageMemoryEntry& e) { return e.object_id != *target->id; });
    if (entries.empty())
        return fail(FailureReason::TargetUnknown, "'" + action.args.front() + "' is not in environment memory");
    const Vec3 goal = entries.front().world_pos;

    std::unique_ptr<NavGrid> own;
    if (shared_grid == nullptr) own = std::make_unique<NavGrid>(scene);
    const NavGrid& grid = shared_grid != nullptr ? *shared_grid : *own;

    const auto start = entry_node(grid, scene, robot.position());
    if (!start) return fail(FailureReason::Unreachable, "robot cannot enter the navigation grid");
    const auto field = grid.distance_field(*start);

    // Closest reachable free node to the target (5 cm buckets), then the
    // shortest path, then the lowest node index.
    std::optional<std::size_t> best;
    double best_bucket = 0.0, best_path = 0.0;
    const int span = static_cast<int>(std::ceil(kApproachSearchRadius / grid.resolution()));
    const std::size_t centre = grid.nearest_node(goal);
    const int cc = static_cast<int>(centre % static_cast<std::size_t>(grid.cols()));
    const int cr = static_cast<int>(centre / static_cast<std::size_t>(grid.cols()));
    for (int r = std::max(0, cr - span); r <= std::min(grid.rows() - 1, cr + span); ++r) {
        for (int c = std::max(0, cc - span); c <= std::min(grid.cols() - 1, cc + span); ++c) {
            const std::size_t n = static_cast<std::size_t>(r) * static_cast<std::size_t>(grid.cols()) +
                                  static_cast<std::size_t>(c);
            if (!grid.is_free(n) || !std::isfinite(field[n])) continue;
            const double d = distance_xy(grid.position(n), goal);
            if (d > kApproachSearchRadius) continue;
            const double bucket = std::floor(d / 0.05);
            if (!best || bucket < best_bucket || (bucket == best_bucket && field[n] < best_path)) {
                best = n;
                best_bucket = bucket;
                best_path = field[n];
            }
        }
    }
    if (!best) return fail(FailureReason::Unreachable, "no reachable position near '" + action.args.front() + "'");

    const MoveResult m = navigate_to(grid, scene, robot, grid.position(*best));
    if (!m.reached)
        return fail(FailureReason::Unreachable, "path to '" + action.args.front() + "' is blocked", m.path_length);
    const Vec3 here = robot.position();
    if (distance_xy(here, goal) > 1e-9) robot.pose.euler.gamma = std::atan2(goal.y - here.y, goal.x - here.x);
    return {true, std::nullopt, {}, m.path_length == 0.0, m.path_length};
}

}  // namespace

std::span<const SkillSignature> catalog() { return signatures(); }

const SkillSignature& signature(SkillKind kind) { return signatures()[static_cast<std::size_t>(kind)]; }

std::optional<SkillKind> parse_skill_name(std::string_view name) {
    for (const auto& s : signatures())
        if (s.name == name) return s.kind;
    return std::nullopt;
}

std::string render_catalog() {
    std::string out = "# skill catalog v1\n";
    for (const auto& s : signatures()) {
        out += s.name;
        out += '(';
        for (std::size_t a = 0; a < s.args.size(); ++a) {
            if (a > 0) out += ", ";
            out += s.args[a].name;
            if (!s.args[a].choices.empty()) {
                out += ": ";
                for (std::size_t c = 0; c < s.args[a].choices.size(); ++c) {
                    if (c > 0) out += '|';
                    out += s.args[a].choices[c];
                }
            }
        }
        out += ") | ";
        out += s.description;
        out += " | pre: ";
        out += s.preconditions;
        out += " | effect: ";
        out += s.effect;
        if (s.derived) out += " | derived";
        out += '\n';
    }
    return out;
}

std::string to_string(const SkillAction& action) {
    std::string out(signature(action.kind).name);
    out += '(';
    for (std::size_t a = 0; a < action.args.size(); ++a) {
        if (a > 0) out += ", ";
        out += action.args[a];
    }
    out += ')';
    return out;
}

std::string check_arity(const SkillAction& action) {
    const auto& sig = signature(action.kind);
    if (action.args.size() != sig.args.size())
        return std::string(sig.name) + " takes " + std::to_string(sig.args.size()) + " argument(s), got " +
               std::to_string(action.args.size());
    for (std::size_t a = 0; a < sig.args.size(); ++a) {
        const auto& choices = sig.args[a].choices;
        if (action.args[a].empty()) return "empty argument";
        if (!choices.empty() && std::find(choices.begin(), choices.end(), action.args[a]) == choices.end())
            return "invalid " + std::string(sig.args[a].name) + " '" + action.args[a] + "' for " + std::string(sig.name);
    }
    return {};
}

std::optional<TargetName> parse_target_name(std::string_view name) {
    if (auto c = parse_category(name)) return TargetName{*c, std::nullopt};
    const auto us = name.rfind('_');
    if (us == std::string_view::npos || us + 1 >= name.size()) return std::nullopt;
    int id = 0;
    const auto digits = name.substr(us + 1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;
    if (auto c = parse_category(name.substr(0, us))) return TargetName{*c, id};
    return std::nullopt;
}

std::string_view to_string(FailureReason r) {
    switch (r) {
        case FailureReason::TargetUnknown: return "target_unknown";
        case FailureReason::Unreachable: return "unreachable";
        case FailureReason::PreconditionFailed: return "precondition_failed";
    }
    return "unknown";
}

SkillOutcome execute(const SkillAction& action, WorldScene& scene, RobotState& robot, const EnvironmentMemory& mem,
                     const NavGrid* grid) {
    if (const auto bad = check_arity(action); !bad.empty())
        return fail(FailureReason::PreconditionFailed, "invalid action: " + bad);
    const std::string arg = action.args.empty() ? std::string{} : action.args.front();

    switch (action.kind) {
        case SkillKind::MoveTo: return do_move(action, scene, robot, mem, grid);
        case SkillKind::ProduceAndGrabMilk:
            return manipulate(scene, robot, Category::BarCounter, "milk_served",
                              [](const ObjectInstance& o) { return StateValue{int_state(o, "milk_served") + 1}; },
                              std::nullopt, "milk");
        case SkillKind::MakeCoffee:
            return manipulate(scene, robot, Category::CoffeeMachine, "cups_made",
                              [](const ObjectInstance& o) { return StateValue{int_state(o, "cups_made") + 1}; });
        case SkillKind::PourWater:
            return manipulate(scene, robot, Category::Kettle, "pours",
                              [](const ObjectInstance& o) { return StateValue{int_state(o, "pours") + 1}; });
        case SkillKind::GrabBread:
            return manipulate(scene, robot, Category::Bread, "taken", [](const ObjectInstance&) { return StateValue{true}; },
                              std::nullopt, "bread");
        case SkillKind::ControlAc: {
            if (arg == "on" || arg == "off") {
                const bool on = arg == "on";
                return manipulate(scene, robot, Category::AirConditioner, "power",
                                  [on](const ObjectInstance&) { return StateValue{on}; });
            }
            ObjectInstance* ac = reachable_object(scene, robot, Category::AirConditioner);
            if (ac == nullptr) return fail(FailureReason::PreconditionFailed, "no air_conditioner within 0.8 m");
            if (!bool_state(*ac, "power")) return fail(FailureReason::PreconditionFailed, "air conditioner is off");
            const std::int64_t delta = arg == "raise" ? 1 : -1;
            const std::int64_t next = std::clamp<std::int64_t>(int_state(*ac, "setpoint") + delta, 16, 30);
            return manipulate(scene, robot, Category::AirConditioner, "setpoint",
                              [next](const ObjectInstance&) { return StateValue{next}; });
        }
        case SkillKind::MopFloor:
            return manipulate(scene, robot, Category::Spill, "dirty", [](const ObjectInstance&) { return StateValue{false}; });
        case SkillKind::WipeTable:
            return manipulate(
                scene, robot, Category::Table, "dirty", [](const ObjectInstance&) { return StateValue{false}; }, "towel",
                std::nullopt, [](Category c) { return c == Category::BarCounter; });
        case SkillKind::ControlCurtains: {
            const bool open = arg == "open";
            return manipulate(scene, robot, Category::Curtain, "open",
                              [open](const ObjectInstance&) { return StateValue{open}; });
        }
        case SkillKind::ControlLighting: {
            const bool on = arg == "on";
            return manipulate(scene, robot, Category::LightSwitch, "on",
                              [on](const ObjectInstance&) { return StateValue{on}; });
        }
        case SkillKind::StraightenChair:
            return manipulate(scene, robot, Category::Chair, "aligned", [](const ObjectInstance&) { return StateValue{true}; });
        case SkillKind::TakeTowel: {
            Effect e;
            e.set_held = "towel";
            return from_effect(apply_effect(scene, robot, e));
        }
    }
    return fail(FailureReason::PreconditionFailed, "unsupported skill");
}

}  // namespace meia
