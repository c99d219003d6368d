#include "meia/effects.hpp"

#include <algorithm>

namespace meia {

EffectResult apply_effect(WorldScene& scene, RobotState& robot, const Effect& effect) {
    using Status = EffectResult::Status;
    if (effect.require_held && robot.held_item != effect.require_held) {
        return {Status::PreconditionFailed,
                "requires holding " + *effect.require_held + " (holding " + robot.held_item.value_or("nothing") + ")"};
    }
    ObjectInstance* target = nullptr;
    if (effect.change) {
        target = scene.find(effect.change->object_id);
        if (target == nullptr)
            return {Status::PreconditionFailed, "no object with id " + std::to_string(effect.change->object_id)};
        const auto schema = state_schema(target->category);
        auto it = std::find_if(schema.begin(), schema.end(),
                               [&](const StateKey& k) { return k.key == effect.change->key; });
        if (it == schema.end() || it->default_value.index() != effect.change->value.index())
            return {Status::PreconditionFailed, "'" + effect.change->key + "' is not a declared state of " +
                                                    std::string(category_name(target->category))};
    }

    bool changed = false;
    if (target != nullptr) {
        auto& slot = target->state[effect.change->key];
        if (slot != effect.change->value) {
            slot = effect.change->value;
            changed = true;
        }
    }
    if (effect.set_held && robot.held_item != effect.set_held) {
        robot.held_item = effect.set_held;
        changed = true;
    }
    return {changed ? Status::Applied : Status::NoOp, {}};
}

}  // namespace meia
