#include "meia/planner.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "meia/error.hpp"
#include "meia/eqa.hpp"
#include "meia/vocabulary.hpp"
#include "meia_prompts.hpp"

namespace meia {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool is_identifier(std::string_view s, bool allow_leading_digit) {
    if (s.empty()) return false;
    if (!allow_leading_digit && std::isdigit(static_cast<unsigned char>(s.front()))) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

std::string_view strip_list_marker(std::string_view t) {
    if (t.starts_with("- ") || t.starts_with("* ")) return trim(t.substr(2));
    std::size_t k = 0;
    while (k < t.size() && std::isdigit(static_cast<unsigned char>(t[k]))) ++k;
    if (k > 0 && k + 1 < t.size() && (t[k] == '.' || t[k] == ')') && std::isspace(static_cast<unsigned char>(t[k + 1])))
        return trim(t.substr(k + 1));
    return t;
}

std::string fmt(double v, int precision = 2) {
    if (std::abs(v) < 0.5 * std::pow(10.0, -precision)) v = 0.0;  // no "-0.00"
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

std::string fill(std::string_view tpl, const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(tpl.size());
    std::size_t pos = 0;
    while (pos < tpl.size()) {
        const auto open = tpl.find("{{", pos);
        if (open == std::string_view::npos) break;
        const auto close = tpl.find("}}", open);
        if (close == std::string_view::npos) break;
        out.append(tpl.substr(pos, open - pos));
        const std::string key(tpl.substr(open + 2, close - open - 2));
        auto it = values.find(key);
        out += it != values.end() ? it->second : std::string{};
        pos = close + 2;
    }
    out.append(tpl.substr(pos));
    return out;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw BackendError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---- scripted planning ----

std::string scripted_plan(const PlannerRequest& req) {
    const auto mentions = find_subtasks(req.instruction);
    if (mentions.empty()) return "# no known task in the instruction\n";

    std::vector<std::vector<std::optional<int>>> options;
    for (const auto& m : mentions) {
        std::vector<std::optional<int>> o;
        if (needs_landmark(m.kind) && m.landmark)
            for (int id : ground_landmark(m.kind, *m.landmark, req.memory)) o.emplace_back(id);
        if (o.empty()) o.emplace_back(std::nullopt);
        options.push_back(std::move(o));
    }

    std::set<std::string> failed;
    for (const auto& f : req.failed_plans) failed.insert(std::string(trim(f.plan_text)));

    // Enumerate grounding choices best-first (odometer order) and skip any
    // plan that already failed.
    std::vector<std::size_t> pick(options.size(), 0);
    for (int tries = 0; tries < 256; ++tries) {
        std::vector<SkillAction> steps;
        for (std::size_t k = 0; k < mentions.size(); ++k) {
            auto s = subtask_steps(mentions[k].kind, options[k][pick[k]]);
            steps.insert(steps.end(), s.begin(), s.end());
        }
        const std::string text = render_plan(steps);
        if (!failed.contains(std::string(trim(text)))) return text;
        std::size_t d = options.size();
        while (d > 0) {
            --d;
            if (++pick[d] < options[d].size()) break;
            pick[d] = 0;
            if (d == 0) return "# every grounded alternative has failed\n";
        }
    }
    return "# every grounded alternative has failed\n";
}

// ---- scripted question answering ----

std::optional<LanguageMemoryEntry> first_of(const std::vector<LanguageMemoryEntry>& mem, Category c) {
    std::optional<LanguageMemoryEntry> best;
    for (const auto& e : mem)
        if (e.category == c && (!best || e.object_id < best->object_id)) best = e;
    return best;
}

// Nearest remembered surface to an item, by horizontal distance.
std::optional<int> surface_of(const std::vector<LanguageMemoryEntry>& mem, const LanguageMemoryEntry& item) {
    std::optional<int> best;
    double best_d = 1.3;
    for (const auto& e : mem) {
        if (!is_surface(e.category)) continue;
        const double d = distance_xy(e.world_pos, item.world_pos);
        if (d < best_d) {
            best_d = d;
            best = e.object_id;
        }
    }
    return best;
}

bool is_item(Category c) { return !is_surface(c) && c != Category::Chair; }

std::optional<Vec3> parse_point(std::string_view s) {
    static const std::regex re(R"(^\s*(-?[0-9]+(?:\.[0-9]+)?)\s*,\s*(-?[0-9]+(?:\.[0-9]+)?)\s*$)");
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_match(s.begin(), s.end(), m, re)) return std::nullopt;
    return Vec3{std::stod(m[1].str()), std::stod(m[2].str()), 0.0};
}

// Frontier choice on a 1.5 m lattice: most unknown cells within 2.5 m,
// skipping occupied cells, visited places and failed targets.
std::optional<Vec3> pick_exploration(const EqaRequest& req) {
    if (req.floor_plan == nullptr) return std::nullopt;
    const FloorPlan& plan = *req.floor_plan;
    const auto& l = plan.layout;
    const double spacing = 1.5, radius = 2.5;
    const double width = l.cols * l.cell_size, height = l.rows * l.cell_size;
    std::vector<Vec3> failed;
    for (const auto& f : req.failures)
        if (auto p = parse_point(f.target)) failed.push_back(*p);

    const int span = static_cast<int>(std::ceil(radius / l.cell_size));
    const std::size_t min_score = static_cast<std::size_t>(0.05 * std::numbers::pi * radius * radius /
                                                           (l.cell_size * l.cell_size));
    std::optional<Vec3> best;
    std::size_t best_score = 0;
    double best_dist = 0.0;
    for (double y = l.origin.y + spacing / 2; y < l.origin.y + height; y += spacing) {
        for (double x = l.origin.x + spacing / 2; x < l.origin.x + width; x += spacing) {
            const Vec3 c{x, y, 0.0};
            const auto cell = l.cell_of(c);
            if (!cell || plan.at(cell->first, cell->second).state == CellState::Occupied) continue;
            if (std::any_of(req.visited.begin(), req.visited.end(), [&](const Vec3& v) { return distance_xy(v, c) < 1.0; }))
                continue;
            if (std::any_of(failed.begin(), failed.end(), [&](const Vec3& v) { return distance_xy(v, c) < 0.75; }))
                continue;
            std::size_t score = 0;
            for (int r = std::max(0, cell->second - span); r <= std::min(l.rows - 1, cell->second + span); ++r)
                for (int q = std::max(0, cell->first - span); q <= std::min(l.cols - 1, cell->first + span); ++q)
                    if (plan.at(q, r).state == CellState::Unknown && distance_xy(l.cell_center(q, r), c) <= radius)
                        ++score;
            if (score < min_score) continue;
            const double d = distance_xy(c, req.robot_position);
            if (!best || score > best_score || (score == best_score && d < best_dist)) {
                best = c;
                best_score = score;
                best_dist = d;
            }
        }
    }
    return best;
}

std::string scripted_answer(const EqaRequest& req) {
    const auto q = parse_question(req.question);
    const auto explore_or = [&](const std::string& fallback) -> std::string {
        if (!req.force_answer) {
            if (auto p = pick_exploration(req)) return "EXPLORE: " + fmt(p->x) + ", " + fmt(p->y);
        }
        return "ANSWER: " + fallback;
    };
    if (!q) return "ANSWER: I don't know";
    const auto& mem = req.memory;

    switch (q->template_id) {
        case 1: {
            const auto x = first_of(mem, q->categories.at(0));
            if (!x) return explore_or("nothing");
            const auto s = surface_of(mem, *x);
            std::vector<std::string> names;
            if (s) {
                for (const auto& e : mem)
                    if (is_item(e.category) && e.object_id != x->object_id && surface_of(mem, e) == s)
                        names.push_back(category_phrase(e.category));
            }
            if (names.empty()) return explore_or("nothing");
            std::sort(names.begin(), names.end());
            names.erase(std::unique(names.begin(), names.end()), names.end());
            std::string out;
            for (std::size_t k = 0; k < names.size(); ++k) out += (k ? " and " : "") + names[k];
            return "ANSWER: " + out;
        }
        case 2: {
            const auto a = first_of(mem, q->categories.at(0)), b = first_of(mem, q->categories.at(1));
            if (!a || !b) return explore_or("No");
            const auto sa = surface_of(mem, *a), sb = surface_of(mem, *b);
            return std::string("ANSWER: ") + (sa && sa == sb ? "Yes" : "No");
        }
        case 3: {
            const auto a = first_of(mem, q->categories.at(0)), b = first_of(mem, q->categories.at(1)),
                       c = first_of(mem, q->categories.at(2));
            if (!a || !b || !c) return explore_or("No");
            return std::string("ANSWER: ") + (distance(a->world_pos, b->world_pos) < distance(a->world_pos, c->world_pos) ? "Yes" : "No");
        }
        case 4:
            if (first_of(mem, q->categories.at(0))) return "ANSWER: Yes";
            return explore_or("No");
        case 5: {
            const auto* a = find_affordance(q->activity);
            if (a != nullptr)
                for (Category c : a->categories)
                    if (first_of(mem, c)) return "ANSWER: Yes";
            return explore_or("No");
        }
        default: return "ANSWER: I don't know";
    }
}

const char* direction_name(std::size_t k) {
    static const char* names[] = {"front", "left", "back", "right"};
    return names[k];
}

}  // namespace

// ---- grammar ----

Plan parse_plan(std::string_view text) {
    Plan plan;
    plan.raw_text = std::string(text);
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        std::string_view t = trim(line);
        if (t.empty() || t.starts_with('#') || t.starts_with("```")) {
            if (nl == text.size()) break;
            continue;
        }
        t = strip_list_marker(t);
        const auto open = t.find('(');
        if (open == std::string_view::npos) throw PlanParseError(line_no, "expected '(' after skill name");
        const std::string_view name = trim(t.substr(0, open));
        if (!is_identifier(name, false)) throw PlanParseError(line_no, "invalid skill name");
        if (t.back() != ')') throw PlanParseError(line_no, "expected ')' at end of line");
        const std::string_view inner = trim(t.substr(open + 1, t.size() - open - 2));
        if (inner.find_first_of("()") != std::string_view::npos) throw PlanParseError(line_no, "unbalanced parentheses");

        SkillAction action;
        const auto kind = parse_skill_name(name);
        if (!kind) throw PlanParseError(line_no, "unknown skill '" + std::string(name) + "'");
        action.kind = *kind;
        if (!inner.empty()) {
            std::size_t a = 0;
            while (a <= inner.size()) {
                auto comma = inner.find(',', a);
                if (comma == std::string_view::npos) comma = inner.size();
                std::string_view arg = trim(inner.substr(a, comma - a));
                if (arg.size() >= 2 && (arg.front() == '"' || arg.front() == '\'') && arg.back() == arg.front())
                    arg = trim(arg.substr(1, arg.size() - 2));
                if (!is_identifier(arg, true)) throw PlanParseError(line_no, "invalid argument '" + std::string(arg) + "'");
                action.args.emplace_back(arg);
                a = comma + 1;
                if (comma == inner.size()) break;
            }
        }
        if (const auto bad = check_arity(action); !bad.empty()) throw PlanParseError(line_no, bad);
        plan.steps.push_back(std::move(action));
        if (nl == text.size()) break;
    }
    return plan;
}

std::string render_plan(const std::vector<SkillAction>& steps) {
    std::string out;
    for (const auto& s : steps) out += to_string(s) + "\n";
    return out;
}

// ---- request rendering ----

std::string render_memory(const std::vector<LanguageMemoryEntry>& entries) {
    auto sorted = entries;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.object_id < b.object_id; });
    std::string out;
    for (const auto& e : sorted)
        out += std::to_string(e.object_id) + ", " + std::string(category_name(e.category)) + ", (" +
               fmt(e.world_pos.x) + ", " + fmt(e.world_pos.y) + ", " + fmt(e.world_pos.z) + ")\n";
    return out.empty() ? "(empty)\n" : out;
}

std::vector<LanguageMemoryEntry> memory_entries(const EnvironmentMemory& mem) {
    std::vector<LanguageMemoryEntry> out;
    for (const auto& [id, e] : mem.language()) out.push_back(e);
    return out;
}

std::string summarize_floor_plan(const FloorPlan& plan) {
    const auto& l = plan.layout;
    const double n = static_cast<double>(plan.cells.size());
    const auto pct = [&](CellState s) { return fmt(100.0 * static_cast<double>(plan.count(s)) / n, 1) + "%"; };
    return std::to_string(l.cols) + "x" + std::to_string(l.rows) + " cells of " + fmt(l.cell_size) +
           " m covering x [" + fmt(l.origin.x) + ", " + fmt(l.origin.x + l.cols * l.cell_size) + "], y [" +
           fmt(l.origin.y) + ", " + fmt(l.origin.y + l.rows * l.cell_size) + "]; occupied " +
           pct(CellState::Occupied) + ", free " + pct(CellState::Free) + ", unknown " + pct(CellState::Unknown);
}

json canonical_request(const BackendCall& call) {
    json msgs = json::array();
    for (const auto& m : call.messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    return {{"task", call.task == BackendTask::Plan ? "plan" : "eqa"}, {"messages", msgs}};
}

std::string request_hash(const BackendCall& call) { return sha256_hex(canonical_request(call).dump()); }

std::string sha256_hex(std::string_view text) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int k = 0; k < len; ++k) {
        out += hex[digest[k] >> 4];
        out += hex[digest[k] & 15];
    }
    return out;
}

// ---- backends ----

std::string ScriptedBackend::complete(const BackendCall& call) {
    if (call.task == BackendTask::Plan) {
        if (call.plan == nullptr) throw BackendError("scripted backend needs the planner request");
        return scripted_plan(*call.plan);
    }
    if (call.eqa == nullptr) throw BackendError("scripted backend needs the question request");
    return scripted_answer(*call.eqa);
}

RecordedBackend::RecordedBackend(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!std::filesystem::is_directory(dir_)) throw BackendError("transcript directory not found: " + dir_.string());
}

std::string RecordedBackend::complete(const BackendCall& call) {
    const std::string hash = request_hash(call);
    const auto path = dir_ / (hash + ".json");
    if (!std::filesystem::exists(path)) throw BackendError("no recorded response for request " + hash);
    try {
        return json::parse(read_file(path)).at("response").get<std::string>();
    } catch (const json::exception& e) {
        throw BackendError("bad transcript " + path.string() + ": " + e.what());
    }
}

void write_transcript(const std::filesystem::path& dir, const BackendCall& call, const std::string& response) {
    std::filesystem::create_directories(dir);
    const std::string hash = request_hash(call);
    std::ofstream out(dir / (hash + ".json"), std::ios::binary);
    out << json{{"hash", hash}, {"request", canonical_request(call)}, {"response", response}}.dump(2) << "\n";
    if (!out) throw BackendError("cannot write transcript to " + dir.string());
}

RecordingBackend::RecordingBackend(std::shared_ptr<Backend> inner, std::filesystem::path dir)
    : inner_(std::move(inner)), dir_(std::move(dir)) {}

std::string RecordingBackend::complete(const BackendCall& call) {
    std::string response = inner_->complete(call);
    std::lock_guard lock(mutex_);
    write_transcript(dir_, call, response);
    return response;
}

std::shared_ptr<Backend> make_backend(std::string_view spec) {
    if (spec == "scripted") return std::make_shared<ScriptedBackend>();
    if (spec == "remote") return std::make_shared<RemoteBackend>(RemoteConfig::from_env());
    if (spec.starts_with("recorded:")) return std::make_shared<RecordedBackend>(std::string(spec.substr(9)));
    if (spec.starts_with("record:"))
        return std::make_shared<RecordingBackend>(std::make_shared<ScriptedBackend>(), std::string(spec.substr(7)));
    if (spec.starts_with("record-remote:"))
        return std::make_shared<RecordingBackend>(std::make_shared<RemoteBackend>(RemoteConfig::from_env()),
                                                  std::string(spec.substr(14)));
    throw BackendError("unknown backend '" + std::string(spec) +
                       "' (scripted, remote, recorded:DIR, record:DIR, record-remote:DIR)");
}

// ---- planning ----

std::vector<ChatMessage> plan_messages(const PlannerRequest& req) {
    std::string failures;
    for (std::size_t k = 0; k < req.failed_plans.size(); ++k)
        failures += "attempt " + std::to_string(k + 1) + " failed (" + req.failed_plans[k].reason + "):\n" +
                    req.failed_plans[k].plan_text + (req.failed_plans[k].plan_text.ends_with('\n') ? "" : "\n");
    if (failures.empty()) failures = "(none)\n";
    return {
        {"system", fill(prompts::plan_system, {{"catalog", req.catalog}})},
        {"user", fill(prompts::plan_user,
                      {{"instruction", req.instruction},
                       {"memory", req.memory.empty() ? std::string("(not available)\n") : render_memory(req.memory)},
                       {"floor_plan", req.floor_plan_summary.empty() ? "(not available)" : req.floor_plan_summary},
                       {"failures", failures}})},
    };
}

Plan plan(const PlannerRequest& req, Backend& backend, std::vector<PlanAttempt>* attempts) {
    auto messages = plan_messages(req);
    for (int attempt = 0;; ++attempt) {
        BackendCall call{BackendTask::Plan, messages, &req, nullptr, req.floor_plan};
        const std::string raw = backend.complete(call);
        try {
            Plan p = parse_plan(raw);
            if (attempts) attempts->push_back({raw, {}});
            return p;
        } catch (const PlanParseError& e) {
            if (attempts) attempts->push_back({raw, e.what()});
            if (attempt >= 1) throw;
            messages.push_back({"assistant", raw});
            messages.push_back({"user", fill(prompts::plan_retry, {{"line", std::to_string(e.line())}, {"reason", e.reason()}})});
        }
    }
}

PlannerRequest make_planner_request(std::string instruction, const EnvironmentMemory& mem, bool include_language,
                                    bool include_image) {
    PlannerRequest req;
    req.instruction = std::move(instruction);
    req.catalog = render_catalog();
    if (include_language) req.memory = memory_entries(mem);
    if (include_image) {
        req.floor_plan_summary = summarize_floor_plan(mem.plan());
        req.floor_plan = &mem.plan();
    }
    return req;
}

// ---- question answering ----

std::variant<EqaAnswer, EqaExplore> parse_verdict(std::string_view text) {
    std::string_view line;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const auto t = trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        if (!t.empty()) {
            line = t;
            break;
        }
    }
    const auto upper_prefix = [&](std::string_view p) {
        if (line.size() < p.size()) return false;
        for (std::size_t k = 0; k < p.size(); ++k)
            if (std::toupper(static_cast<unsigned char>(line[k])) != p[k]) return false;
        return true;
    };
    if (upper_prefix("ANSWER:")) return EqaAnswer{std::string(trim(line.substr(7)))};
    if (upper_prefix("EXPLORE:")) {
        const auto rest = trim(line.substr(8));
        if (auto p = parse_point(rest)) return EqaExplore{*p};
        if (is_identifier(rest, false)) return EqaExplore{std::string(rest)};
        throw ParseError("EXPLORE needs 'x, y' or an item name, got '" + std::string(rest) + "'");
    }
    throw ParseError("expected 'ANSWER: ...' or 'EXPLORE: ...'");
}

std::string render_target(const std::variant<Vec3, std::string>& target) {
    if (const auto* p = std::get_if<Vec3>(&target)) return fmt(p->x) + ", " + fmt(p->y);
    return std::get<std::string>(target);
}

std::vector<ChatMessage> eqa_messages(const EqaRequest& req) {
    std::string obs;
    for (std::size_t k = 0; k < 4; ++k) obs += std::string(direction_name(k)) + ": " + req.observations[k] + "\n";
    std::string visited;
    for (const auto& v : req.visited) visited += "(" + fmt(v.x) + ", " + fmt(v.y) + ")\n";
    std::string failures;
    for (const auto& f : req.failures) failures += f.target + ": " + f.reason + "\n";
    const std::string mode = req.force_answer ? "No more exploration is possible: answer now."
                                              : "You may explore " + std::to_string(req.explorations_left) +
                                                    " more time(s).";
    return {
        {"system", std::string(prompts::eqa_system)},
        {"user", fill(prompts::eqa_user,
                      {{"question", req.question},
                       {"position", "(" + fmt(req.robot_position.x) + ", " + fmt(req.robot_position.y) + ")"},
                       {"observations", obs},
                       {"memory", req.memory.empty() ? std::string("(not available)\n") : render_memory(req.memory)},
                       {"floor_plan", req.floor_plan_summary.empty() ? "(not available)" : req.floor_plan_summary},
                       {"visited", visited.empty() ? "(none)\n" : visited},
                       {"failures", failures.empty() ? "(none)\n" : failures},
                       {"mode", mode}})},
    };
}

EqaTurn eqa_step(const EqaRequest& req, Backend& backend) {
    BackendCall call{BackendTask::Eqa, eqa_messages(req), nullptr, &req, req.floor_plan};
    EqaTurn turn;
    turn.question = req.question;
    turn.raw_text = backend.complete(call);
    turn.verdict = parse_verdict(turn.raw_text);
    return turn;
}

std::string describe_view(const SensorFrame& frame, std::size_t min_pixels) {
    std::map<int, std::pair<std::size_t, std::size_t>> seen;  // id -> (count, first pixel)
    for (std::size_t k = 0; k < frame.segmentation.size(); ++k) {
        const int id = frame.segmentation[k];
        if (id == 0) continue;
        auto [it, fresh] = seen.try_emplace(id, 0, k);
        ++it->second.first;
    }
    std::vector<std::pair<std::size_t, int>> order;
    for (const auto& [id, cf] : seen)
        if (cf.first >= min_pixels) order.emplace_back(cf.first, id);
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::string out;
    for (const auto& [count, id] : order) {
        const std::size_t k = seen[id].second;
        const Rgb c{frame.rgb[3 * k], frame.rgb[3 * k + 1], frame.rgb[3 * k + 2]};
        const auto cat = category_from_color(c);
        if (!out.empty()) out += ", ";
        out += (cat ? std::string(category_name(*cat)) : std::string("object")) + "_" + std::to_string(id);
    }
    return out.empty() ? "nothing" : out;
}

EqaEpisodeResult run_eqa_episode(const std::string& question, const WorldScene& scene, RobotState& robot,
                                 EnvironmentMemory& mem, Backend& backend, const EqaCaps& caps, EqaContext& ctx,
                                 const NavGrid* grid) {
    std::unique_ptr<NavGrid> own;
    if (grid == nullptr) {
        own = std::make_unique<NavGrid>(scene);
        grid = own.get();
    }
    EqaEpisodeResult result;
    std::array<std::string, 4> views;
    const auto observe = [&] {
        const auto frames = observe_four_directions(scene, robot);
        for (std::size_t k = 0; k < 4; ++k) {
            mem.integrate_frame(frames[k], ++ctx.step);
            views[k] = describe_view(frames[k]);
        }
        ctx.visited.push_back(robot.position());
    };
    observe();

    const int cap = std::max(0, caps.max_explorations);
    int explorations = 0;
    while (true) {
        EqaRequest req;
        req.question = question;
        req.robot_position = robot.position();
        req.observations = views;
        if (mem.flags().language_memory) req.memory = memory_entries(mem);
        if (mem.flags().image_memory) {
            req.floor_plan_summary = summarize_floor_plan(mem.plan());
            req.floor_plan = &mem.plan();
        }
        req.visited = ctx.visited;
        req.failures = ctx.failures;
        req.explorations_left = cap - explorations;
        req.force_answer = explorations >= cap;

        EqaTurn turn;
        try {
            turn = eqa_step(req, backend);
        } catch (const ParseError& e) {
            result.turns.push_back({e.what(), {}, false, 0.0});
            ctx.failures.push_back({"(unparseable reply)", e.what()});
            if (req.force_answer) {
                result.forced = true;
                break;
            }
            ++explorations;
            continue;
        }
        if (const auto* a = std::get_if<EqaAnswer>(&turn.verdict)) {
            result.answer = a->text;
            result.forced = req.force_answer;
            result.turns.push_back({turn.raw_text, {}, false, 0.0});
            break;
        }
        if (req.force_answer) {
            result.forced = true;
            result.turns.push_back({turn.raw_text, {}, false, 0.0});
            break;
        }
        ++explorations;
        const auto& target = std::get<EqaExplore>(turn.verdict).target;
        EqaStepRecord rec{turn.raw_text, render_target(target), false, 0.0};
        std::string failure;
        if (const auto* p = std::get_if<Vec3>(&target)) {
            if (!scene.bounds.contains(*p)) {
                failure = "outside the cafe";
            } else {
                const MoveResult m = navigate_to(*grid, scene, robot, {p->x, p->y, 0.0});
                rec.reached = m.reached;
                rec.distance = m.path_length;
                if (!m.reached) failure = "unreachable";
            }
        } else {
            WorldScene scratch = scene;  // move_to never changes object state
            const auto out = execute({SkillKind::MoveTo, {std::get<std::string>(target)}}, scratch, robot, mem, grid);
            rec.reached = out.success;
            rec.distance = out.distance_traveled;
            if (!out.success) failure = std::string(to_string(*out.reason));
        }
        result.pl += rec.distance;
        result.turns.push_back(rec);
        if (rec.reached) {
            ++result.ec;
            observe();
        } else {
            ++result.upc;
            ctx.failures.push_back({rec.target, failure});
        }
    }
    return result;
}

// ---- remote ----

RemoteConfig RemoteConfig::from_env() {
    RemoteConfig c;
    if (const char* e = std::getenv("PLANNER_ENDPOINT")) c.endpoint = e;
    if (const char* k = std::getenv("PLANNER_API_KEY")) c.api_key = k;
    if (const char* m = std::getenv("PLANNER_MODEL")) c.model = m;
    return c;
}

}  // namespace meia
