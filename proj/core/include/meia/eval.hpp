#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "meia/eqa.hpp"
#include "meia/mem.hpp"
#include "meia/motion.hpp"
#include "meia/planner.hpp"
#include "meia/robot.hpp"
#include "meia/scene.hpp"
#include "meia/vocabulary.hpp"

namespace meia {

// ---- phase 1: exploration tour ----------------------------------------------

// Free node nearest the inset bottom-left corner, facing +x.
RobotState start_pose(const WorldScene& scene, const NavGrid& grid);

// `count` points evenly spaced along the rectangle inset from the bounds,
// counter-clockwise from the bottom-left corner.
std::vector<Vec3> tour_waypoints(const Bounds2& bounds, int count = 10, double inset = 1.2);

struct TourStep {
    Vec3 waypoint;   // nominal
    Vec3 position;   // where the robot observed from
    bool reached = false;
    double distance = 0.0;
    std::size_t occupied_cells = 0;  // after integrating this stop
};

// Visits every waypoint (snapped to the nearest reachable free node) and
// integrates a four-direction observation at each. `on_frame` sees every
// frame right after it is integrated.
std::vector<TourStep> explore_tour(const WorldScene& scene, RobotState& robot, EnvironmentMemory& mem,
                                   const NavGrid& grid, int waypoints = 10,
                                   const std::function<void(const SensorFrame&)>& on_frame = {});

// A scene with the memory its tour produced, ready for instruction episodes.
struct EvalWorld {
    std::uint64_t scene_seed = 0;
    WorldScene scene;
    EnvironmentMemory memory;
    RobotState start;
    std::vector<TourStep> tour;
};

EvalWorld build_world(const WorldScene& scene, std::uint64_t scene_seed = 0);
EvalWorld build_world(std::uint64_t scene_seed);  // complete randomized cafe

// ---- instructions ------------------------------------------------------------

enum class InstructionLength : std::uint8_t { Short, Long };
std::string_view to_string(InstructionLength l);

struct Subtask {
    SubtaskKind kind;
    std::optional<Category> landmark;
    std::optional<int> target_id;  // instance the goal is checked on

    bool operator==(const Subtask&) const = default;
};

struct InstructionCase {
    std::string id;
    std::string text;
    Plan grounding_plan;
    std::vector<Subtask> subtasks;

    int n_subtasks() const { return static_cast<int>(subtasks.size()); }
};

// Short: 2-3 subtasks, long: 3-5. Every case is checked by executing its
// grounding plan on the world before it is accepted.
std::vector<InstructionCase> generate_instructions(std::uint64_t seed, InstructionLength length, int count,
                                                   const EvalWorld& world);

nlohmann::json cases_to_json(const std::vector<InstructionCase>& cases, std::uint64_t scene_seed);
// Returns the cases and the scene seed they were generated for.
std::pair<std::vector<InstructionCase>, std::uint64_t> cases_from_json(const nlohmann::json& j);

// Was the subtask's goal reached between `before` and `after`?
bool goal_met(const Subtask& t, const WorldScene& before, const WorldScene& after);

// ---- metrics -------------------------------------------------------------------

double esr(int n_e, int n);

struct PlanScore {
    int s = 0;    // 1 iff the generated plan executed and met the goals
    int l_g = 0;  // grounding plan length
    int l_p = 0;  // generated plan length
    int l_c = 0;  // correct steps (LCS)
};

double ssl(std::span<const PlanScore> scores);

// Longest common subsequence; move_to targets compare by category.
int correct_steps(const std::vector<SkillAction>& generated, const std::vector<SkillAction>& grounding);

// ---- evaluation runs -----------------------------------------------------------

struct Ablation {
    bool no_language = false;  // language memory withheld from the planner
    bool no_image = false;     // floor plan withheld from the planner
};

struct InstructionEvalOptions {
    Ablation ablation;
    int jobs = 1;
};

struct EqaEvalOptions {
    bool multi_round = false;
    EqaCaps caps;
    MemoryFlags memory;  // which memory halves the robot keeps
    int jobs = 1;
};

// Per-case records plus aggregates; aggregates are a pure function of the
// records (see recompute_*).
struct EvalReport {
    nlohmann::json config;
    nlohmann::json cases = nlohmann::json::array();
    nlohmann::json aggregates;

    nlohmann::json to_json() const;
    std::string dump() const;  // canonical, newline-terminated
};

EvalReport run_instruction_eval(const std::vector<InstructionCase>& cases, Backend& backend, const EvalWorld& world,
                                const InstructionEvalOptions& options);
nlohmann::json recompute_instruction_aggregates(const nlohmann::json& cases);

EvalReport run_eqa_eval(const std::vector<QAItem>& dataset, Backend& backend, const EqaEvalOptions& options);
nlohmann::json recompute_eqa_aggregates(const nlohmann::json& cases);

// Items of `count` scenes drawn with `seed`, in dataset order.
std::vector<QAItem> select_scenes(const std::vector<QAItem>& dataset, int count, std::uint64_t seed);

std::string summary_table(const EvalReport& report);

struct Thresholds {
    std::optional<double> min_esr_instruction;
    std::optional<double> min_ssl;
    std::optional<double> min_acc;
};
// Human-readable list of missed thresholds (empty when all are met).
std::vector<std::string> missed_thresholds(const EvalReport& report, const Thresholds& t);

}  // namespace meia
