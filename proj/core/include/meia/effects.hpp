#pragma once

#include <optional>
#include <string>

#include "meia/robot.hpp"
#include "meia/scene.hpp"

namespace meia {

struct StateChange {
    int object_id = 0;
    std::string key;
    StateValue value;
};

// A declared world transition: an optional object state change and/or a
// change of the item held by the robot, guarded by an optional held-item
// requirement.
struct Effect {
    std::optional<StateChange> change;
    std::optional<std::string> require_held;
    std::optional<std::string> set_held;
};

struct EffectResult {
    enum class Status { Applied, NoOp, PreconditionFailed };
    Status status = Status::Applied;
    std::string detail;

    bool ok() const { return status != Status::PreconditionFailed; }
};

// Validates the whole effect first, then applies it; a failed effect leaves
// scene and robot untouched.
EffectResult apply_effect(WorldScene& scene, RobotState& robot, const Effect& effect);

}  // namespace meia
