#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "meia/mem.hpp"
#include "meia/motion.hpp"
#include "meia/robot.hpp"
#include "meia/scene.hpp"

namespace meia {

enum class SkillKind : std::uint8_t {
    MoveTo,
    ProduceAndGrabMilk,
    MakeCoffee,
    PourWater,
    GrabBread,
    ControlAc,
    MopFloor,
    WipeTable,
    ControlCurtains,
    ControlLighting,
    StraightenChair,
    TakeTowel,
};

struct SkillAction {
    SkillKind kind = SkillKind::MoveTo;
    std::vector<std::string> args;

    bool operator==(const SkillAction&) const = default;
};

struct ArgSpec {
    std::string_view name;
    std::vector<std::string_view> choices;  // empty: any identifier
};

struct SkillSignature {
    SkillKind kind;
    std::string_view name;
    std::vector<ArgSpec> args;
    std::string_view description;
    std::string_view preconditions;
    std::string_view effect;
    bool derived = false;  // not part of the original robot interface
};

std::span<const SkillSignature> catalog();
const SkillSignature& signature(SkillKind kind);
std::optional<SkillKind> parse_skill_name(std::string_view name);

// Stable, line-oriented catalog text given to planners as the robot's
// capabilities. One skill per line:
//   name(arg: a|b) | description | pre: ... | effect: ...
std::string render_catalog();

// "move_to(coffee_machine)"
std::string to_string(const SkillAction& action);
// Empty string when the action matches its signature; otherwise the reason.
std::string check_arity(const SkillAction& action);

// A move target names a category ("table") or one instance ("table_7").
struct TargetName {
    Category category;
    std::optional<int> id;
};
std::optional<TargetName> parse_target_name(std::string_view name);

enum class FailureReason : std::uint8_t { TargetUnknown, Unreachable, PreconditionFailed };
std::string_view to_string(FailureReason r);

struct SkillOutcome {
    bool success = false;
    std::optional<FailureReason> reason;  // set iff !success
    std::string detail;
    bool no_op = false;  // succeeded without changing the world
    double distance_traveled = 0.0;
};

// Maximum 2-D distance from the robot to an object's footprint for any
// manipulation skill.
inline constexpr double kManipulationReach = 0.8;
// Approach points are searched within this radius of the target position.
inline constexpr double kApproachSearchRadius = 1.2;

// Executes one skill. Total: every action yields an outcome. `grid` may be
// supplied to reuse a navigation grid built for this scene.
SkillOutcome execute(const SkillAction& action, WorldScene& scene, RobotState& robot, const EnvironmentMemory& mem,
                     const NavGrid* grid = nullptr);

}  // namespace meia
