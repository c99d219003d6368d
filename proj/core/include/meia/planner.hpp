#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "meia/mem.hpp"
#include "meia/motion.hpp"
#include "meia/robot.hpp"
#include "meia/scene.hpp"
#include "meia/skills.hpp"

namespace meia {

// ---- plan grammar ----------------------------------------------------------

struct Plan {
    std::vector<SkillAction> steps;
    std::string raw_text;
};

// One `skill_name(arg, ...)` call per line. Blank lines, `#` comments and
// markdown code fences are skipped; a leading "- ", "* ", "1." or "1)" list
// marker is tolerated. Arguments are identifiers, optionally quoted.
// Throws PlanParseError(line, reason).
Plan parse_plan(std::string_view text);
std::string render_plan(const std::vector<SkillAction>& steps);

// ---- requests ----------------------------------------------------------------

struct FailedPlan {
    std::string plan_text;
    std::string reason;
};

struct PlannerRequest {
    std::string instruction;
    std::string catalog;                       // render_catalog()
    std::vector<LanguageMemoryEntry> memory;   // empty when withheld
    std::string floor_plan_summary;            // empty when withheld
    const FloorPlan* floor_plan = nullptr;     // raster; never part of the request hash
    std::vector<FailedPlan> failed_plans;      // oldest first
};

// "id, category, (x, y, z)" per line, ordered by id.
std::string render_memory(const std::vector<LanguageMemoryEntry>& entries);
std::vector<LanguageMemoryEntry> memory_entries(const EnvironmentMemory& mem);
// Cell counts, occupied/free/unknown fractions and bounds.
std::string summarize_floor_plan(const FloorPlan& plan);

struct FailedTarget {
    std::string target;  // "x, y" or item name
    std::string reason;
};

struct EqaRequest {
    std::string question;
    Vec3 robot_position;
    std::array<std::string, 4> observations;  // front, left, back, right
    std::vector<LanguageMemoryEntry> memory;
    std::string floor_plan_summary;
    const FloorPlan* floor_plan = nullptr;
    std::vector<Vec3> visited;
    std::vector<FailedTarget> failures;  // oldest first
    int explorations_left = 0;
    bool force_answer = false;
};

// ---- backends ------------------------------------------------------------------

struct ChatMessage {
    std::string role;  // system | user | assistant
    std::string content;
};

enum class BackendTask : std::uint8_t { Plan, Eqa };

// What a backend receives: the rendered chat and, for backends that reason
// over structure instead of text, the request it was rendered from.
struct BackendCall {
    BackendTask task = BackendTask::Plan;
    std::vector<ChatMessage> messages;
    const PlannerRequest* plan = nullptr;
    const EqaRequest* eqa = nullptr;
    const FloorPlan* floor_plan = nullptr;
};

// Canonical JSON of a call: task and messages. Raster bytes are excluded.
nlohmann::json canonical_request(const BackendCall& call);
std::string request_hash(const BackendCall& call);  // hex SHA-256
std::string sha256_hex(std::string_view data);

// Implementations must tolerate concurrent complete() calls.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string name() const = 0;
    virtual std::string complete(const BackendCall& call) = 0;
};

// Deterministic rule table over the instruction and question vocabulary.
class ScriptedBackend final : public Backend {
public:
    std::string name() const override { return "scripted"; }
    std::string complete(const BackendCall& call) override;
};

struct RemoteConfig {
    std::string endpoint;  // http(s)://host[:port]/path
    std::string api_key;
    std::string model = "gpt-4";
    int timeout_seconds = 60;
    bool send_floor_plan_image = false;

    // PLANNER_ENDPOINT / PLANNER_API_KEY / PLANNER_MODEL.
    static RemoteConfig from_env();
};

// Generic chat-completion client.
class RemoteBackend final : public Backend {
public:
    explicit RemoteBackend(RemoteConfig config);
    std::string name() const override { return "remote"; }
    std::string complete(const BackendCall& call) override;

    // Request body for a call (exposed for tests).
    nlohmann::json request_body(const BackendCall& call) const;

private:
    RemoteConfig config_;
};

// Replays stored transcripts: <dir>/<request hash>.json holding
// {"hash", "request", "response"}.
class RecordedBackend final : public Backend {
public:
    explicit RecordedBackend(std::filesystem::path dir);
    std::string name() const override { return "recorded"; }
    std::string complete(const BackendCall& call) override;

private:
    std::filesystem::path dir_;
};

// Forwards to `inner` and stores every exchange in the transcript format.
class RecordingBackend final : public Backend {
public:
    RecordingBackend(std::shared_ptr<Backend> inner, std::filesystem::path dir);
    std::string name() const override { return "recording(" + inner_->name() + ")"; }
    std::string complete(const BackendCall& call) override;

private:
    std::shared_ptr<Backend> inner_;
    std::filesystem::path dir_;
    std::mutex mutex_;
};

void write_transcript(const std::filesystem::path& dir, const BackendCall& call, const std::string& response);

// "scripted", "remote", "recorded:<dir>", "record:<dir>" (scripted, recorded).
std::shared_ptr<Backend> make_backend(std::string_view spec);

// ---- planning ------------------------------------------------------------------

std::vector<ChatMessage> plan_messages(const PlannerRequest& req);

struct PlanAttempt {
    std::string raw_text;
    std::string error;  // empty when it parsed
};

// Asks the backend for a plan; on a parse failure asks once more with the
// error appended, then throws PlanParseError.
Plan plan(const PlannerRequest& req, Backend& backend, std::vector<PlanAttempt>* attempts = nullptr);

PlannerRequest make_planner_request(std::string instruction, const EnvironmentMemory& mem, bool include_language,
                                    bool include_image);

// ---- embodied question answering -------------------------------------------------

struct EqaAnswer {
    std::string text;
};
struct EqaExplore {
    std::variant<Vec3, std::string> target;  // floor point or item name
};

struct EqaTurn {
    std::string question;
    std::variant<EqaAnswer, EqaExplore> verdict;
    std::string raw_text;
};

// "ANSWER: ..." / "EXPLORE: x, y" / "EXPLORE: name". Throws ParseError.
std::variant<EqaAnswer, EqaExplore> parse_verdict(std::string_view text);
std::string render_target(const std::variant<Vec3, std::string>& target);

std::vector<ChatMessage> eqa_messages(const EqaRequest& req);
EqaTurn eqa_step(const EqaRequest& req, Backend& backend);

// Object ids visible in a frame, most pixels first, as "category_id" names.
std::string describe_view(const SensorFrame& frame, std::size_t min_pixels = 12);

struct EqaCaps {
    int max_explorations = 10;
};

// Carried across the questions of a scene in multi-round mode.
struct EqaContext {
    std::vector<Vec3> visited;
    std::vector<FailedTarget> failures;
    std::int64_t step = 0;  // memory integration counter
};

struct EqaStepRecord {
    std::string raw_text;
    std::string target;  // empty for the answering turn
    bool reached = false;
    double distance = 0.0;
};

struct EqaEpisodeResult {
    std::string answer;
    int ec = 0;   // exploration moves that reached their target
    int upc = 0;  // exploration targets that could not be reached
    double pl = 0.0;  // meters
    bool forced = false;
    std::vector<EqaStepRecord> turns;
};

// Observe four directions, integrate, ask; move on explore verdicts until the
// backend answers or the cap is spent, after which an answer is forced.
EqaEpisodeResult run_eqa_episode(const std::string& question, const WorldScene& scene, RobotState& robot,
                                 EnvironmentMemory& mem, Backend& backend, const EqaCaps& caps, EqaContext& ctx,
                                 const NavGrid* grid = nullptr);

}  // namespace meia
