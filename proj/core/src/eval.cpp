#include "meia/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "meia/error.hpp"
#include "meia/skills.hpp"
#include "rng.hpp"

namespace meia {

using nlohmann::json;

namespace {

// Runs fn(0..n-1) on up to `jobs` threads; the first exception is rethrown
// after every worker has stopped.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    const std::size_t lanes = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
    if (lanes <= 1) {
        for (std::size_t k = 0; k < n; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex m;
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < lanes; ++w) {
        workers.emplace_back([&] {
            for (std::size_t k = next++; k < n; k = next++) {
                try {
                    fn(k);
                } catch (...) {
                    std::lock_guard lock(m);
                    if (!failure) failure = std::current_exception();
                    next = n;
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::int64_t int_state(const ObjectInstance& o, const char* key) {
    auto it = o.state.find(key);
    if (it == o.state.end()) return 0;
    const auto* v = std::get_if<std::int64_t>(&it->second);
    return v ? *v : 0;
}

bool bool_state(const ObjectInstance& o, const char* key) {
    auto it = o.state.find(key);
    if (it == o.state.end()) return false;
    const auto* v = std::get_if<bool>(&it->second);
    return v && *v;
}

const ObjectInstance* unique_of(const WorldScene& s, Category c) {
    const ObjectInstance* found = nullptr;
    for (const auto& o : s.objects) {
        if (o.category != c) continue;
        if (found) return nullptr;
        found = &o;
    }
    return found;
}

// Nearest object among `ids` to p, plus the margin to the runner-up.
std::pair<const ObjectInstance*, double> nearest_with_margin(const WorldScene& s, Category c, const Vec3& p,
                                                              int exclude = 0) {
    const ObjectInstance* best = nullptr;
    double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
    for (const auto& o : s.objects) {
        if (o.category != c || o.id == exclude) continue;
        const double d = distance_xy(o.position, p);
        if (d < d1) {
            d2 = d1;
            d1 = d;
            best = &o;
        } else if (d < d2) {
            d2 = d;
        }
    }
    return {best, d2 - d1};
}

std::optional<Category> simple_target(SubtaskKind k) {
    switch (k) {
        case SubtaskKind::Coffee: return Category::CoffeeMachine;
        case SubtaskKind::Milk: return Category::BarCounter;
        case SubtaskKind::Water: return Category::Kettle;
        case SubtaskKind::Bread: return Category::Bread;
        case SubtaskKind::AcLower:
        case SubtaskKind::AcRaise:
        case SubtaskKind::AcOff: return Category::AirConditioner;
        case SubtaskKind::Lights: return Category::LightSwitch;
        case SubtaskKind::Curtains: return Category::Curtain;
        default: return std::nullopt;
    }
}

bool is_ac(SubtaskKind k) { return k == SubtaskKind::AcLower || k == SubtaskKind::AcRaise || k == SubtaskKind::AcOff; }

std::string capitalized(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

json outcome_json(const std::string& action, const SkillOutcome& o) {
    return {{"action", action},
            {"success", o.success},
            {"reason", o.reason ? json(std::string(to_string(*o.reason))) : json(nullptr)},
            {"detail", o.detail},
            {"no_op", o.no_op},
            {"distance", o.distance_traveled}};
}

json plan_lines(const std::vector<SkillAction>& steps) {
    json out = json::array();
    for (const auto& s : steps) out.push_back(to_string(s));
    return out;
}

double mean(const json& cases, const char* key) {
    if (cases.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& c : cases) sum += c.at(key).get<double>();
    return sum / static_cast<double>(cases.size());
}

}  // namespace

// ---- tour ----

RobotState start_pose(const WorldScene& scene, const NavGrid& grid) {
    const Vec3 nominal{scene.bounds.xmin + 1.2, scene.bounds.ymin + 1.2, 0.0};
    std::optional<std::size_t> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < grid.size(); ++n) {
        if (!grid.is_free(n)) continue;
        const double d = distance_xy(grid.position(n), nominal);
        if (d < best_d) {
            best_d = d;
            best = n;
        }
    }
    if (!best) throw InvalidTarget("scene has no free floor for the robot");
    const Vec3 p = grid.position(*best);
    return RobotState::at(p.x, p.y, 0.0);
}

std::vector<Vec3> tour_waypoints(const Bounds2& b, int count, double inset) {
    const double x0 = b.xmin + inset, x1 = b.xmax - inset, y0 = b.ymin + inset, y1 = b.ymax - inset;
    const double w = std::max(0.0, x1 - x0), h = std::max(0.0, y1 - y0);
    const double perimeter = 2 * (w + h);
    std::vector<Vec3> out;
    for (int k = 0; k < count; ++k) {
        double s = perimeter * k / count;
        if (s < w) { out.push_back({x0 + s, y0, 0}); continue; }
        s -= w;
        if (s < h) { out.push_back({x1, y0 + s, 0}); continue; }
        s -= h;
        if (s < w) { out.push_back({x1 - s, y1, 0}); continue; }
        s -= w;
        out.push_back({x0, y1 - s, 0});
    }
    return out;
}

std::vector<TourStep> explore_tour(const WorldScene& scene, RobotState& robot, EnvironmentMemory& mem,
                                   const NavGrid& grid, int waypoints,
                                   const std::function<void(const SensorFrame&)>& on_frame) {
    std::vector<TourStep> steps;
    const auto entry = entry_node(grid, scene, robot.position());
    if (!entry) throw InvalidTarget("robot start is not on free floor");
    const auto field = grid.distance_field(*entry);
    std::int64_t step = 0;
    for (const Vec3& w : tour_waypoints(scene.bounds, waypoints)) {
        std::optional<std::size_t> best;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t n = 0; n < grid.size(); ++n) {
            if (!grid.is_free(n) || !std::isfinite(field[n])) continue;
            const double d = distance_xy(grid.position(n), w);
            if (d < best_d) {
                best_d = d;
                best = n;
            }
        }
        TourStep ts;
        ts.waypoint = w;
        if (best) {
            const MoveResult m = navigate_to(grid, scene, robot, grid.position(*best));
            ts.reached = m.reached;
            ts.distance = m.path_length;
        }
        ts.position = robot.position();
        for (const auto& f : observe_four_directions(scene, robot)) {
            mem.integrate_frame(f, ++step);
            if (on_frame) on_frame(f);
        }
        ts.occupied_cells = mem.plan().count(CellState::Occupied);
        steps.push_back(ts);
    }
    return steps;
}

EvalWorld build_world(const WorldScene& scene, std::uint64_t scene_seed) {
    EvalWorld w;
    w.scene_seed = scene_seed;
    w.scene = scene;
    const NavGrid grid(w.scene);
    w.start = start_pose(w.scene, grid);
    w.memory = EnvironmentMemory(w.scene.bounds);
    RobotState robot = w.start;
    w.tour = explore_tour(w.scene, robot, w.memory, grid);
    return w;
}

EvalWorld build_world(std::uint64_t scene_seed) {
    SceneOptions opt;
    opt.complete = true;
    return build_world(randomize_scene(scene_seed, opt), scene_seed);
}

// ---- instructions ----

std::string_view to_string(InstructionLength l) { return l == InstructionLength::Short ? "short" : "long"; }

bool goal_met(const Subtask& t, const WorldScene& before, const WorldScene& after) {
    if (!t.target_id) return false;
    const ObjectInstance* b = before.find(*t.target_id);
    const ObjectInstance* a = after.find(*t.target_id);
    if (b == nullptr || a == nullptr) return false;
    switch (t.kind) {
        case SubtaskKind::Coffee: return int_state(*a, "cups_made") > int_state(*b, "cups_made");
        case SubtaskKind::Milk: return int_state(*a, "milk_served") > int_state(*b, "milk_served");
        case SubtaskKind::Water: return int_state(*a, "pours") > int_state(*b, "pours");
        case SubtaskKind::Bread: return bool_state(*a, "taken");
        case SubtaskKind::AcLower: return bool_state(*a, "power") && int_state(*a, "setpoint") < int_state(*b, "setpoint");
        case SubtaskKind::AcRaise: return bool_state(*a, "power") && int_state(*a, "setpoint") > int_state(*b, "setpoint");
        case SubtaskKind::AcOff: return !bool_state(*a, "power");
        case SubtaskKind::Lights: return bool_state(*a, "on");
        case SubtaskKind::Curtains: return !bool_state(*a, "open");
        case SubtaskKind::WipeTable: return !bool_state(*a, "dirty");
        case SubtaskKind::StraightenChair: return bool_state(*a, "aligned");
        case SubtaskKind::MopSpill: return !bool_state(*a, "dirty");
    }
    return false;
}

std::vector<InstructionCase> generate_instructions(std::uint64_t seed, InstructionLength length, int count,
                                                   const EvalWorld& world) {
    if (count <= 0) throw InvalidCase("count must be positive");
    const WorldScene& scene = world.scene;
    detail::Rng rng(seed * 0x2545f4914f6cdd1dull + (length == InstructionLength::Short ? 1 : 2));

    // Landmark bindings that point at one instance with a clear margin.
    std::vector<std::pair<Category, int>> wipe, chair, spill;
    for (const auto& o : scene.objects) {
        if (!o.surface_of || unique_of(scene, o.category) == nullptr) continue;
        const ObjectInstance* t = scene.find(*o.surface_of);
        if (t == nullptr || t->category != Category::Table) continue;
        const auto [near_t, mt] = nearest_with_margin(scene, Category::Table, o.position);
        if (near_t != t || mt < 0.5) continue;
        wipe.emplace_back(o.category, t->id);
        const auto [near_c, mc] = nearest_with_margin(scene, Category::Chair, t->position);
        if (near_c != nullptr && mc >= 0.5) chair.emplace_back(o.category, near_c->id);
    }
    for (const auto& s : scene.objects) {
        if (s.category != Category::Spill) continue;
        const ObjectInstance* mark = nullptr;
        double best = 3.0;
        for (const auto& o : scene.objects) {
            if (o.category == Category::Table || o.category == Category::Chair || o.category == Category::Spill) continue;
            if (unique_of(scene, o.category) == nullptr) continue;
            const double d = distance_xy(o.position, s.position);
            if (d < best) {
                best = d;
                mark = &o;
            }
        }
        if (mark == nullptr) continue;
        const auto [near_s, ms] = nearest_with_margin(scene, Category::Spill, mark->position);
        if (near_s == &s && ms >= 0.75) spill.emplace_back(mark->category, s.id);
    }

    struct Option {
        SubtaskKind kind;
        double weight;
    };
    std::vector<Option> pool;
    for (SubtaskKind k : all_subtask_kinds()) {
        if (auto c = simple_target(k)) {
            if (unique_of(scene, *c) != nullptr) pool.push_back({k, 1.0});
        } else if ((k == SubtaskKind::WipeTable && !wipe.empty()) ||
                   (k == SubtaskKind::StraightenChair && !chair.empty()) ||
                   (k == SubtaskKind::MopSpill && !spill.empty())) {
            pool.push_back({k, 2.0});
        }
    }
    if (pool.size() < 2) throw ValidationError("scene supports fewer than two kinds of subtask");

    const NavGrid grid(scene);
    std::vector<InstructionCase> out;
    for (int i = 0; i < count; ++i) {
        bool accepted = false;
        for (int attempt = 0; attempt < 200 && !accepted; ++attempt) {
            int n = length == InstructionLength::Short ? rng.integer(2, 3) : rng.integer(3, 5);
            std::vector<Option> avail = pool;
            std::vector<Subtask> subtasks;
            while (static_cast<int>(subtasks.size()) < n && !avail.empty()) {
                double total = 0.0;
                for (const auto& o : avail) total += o.weight;
                double r = rng.uniform() * total;
                std::size_t pick = 0;
                while (pick + 1 < avail.size() && r >= avail[pick].weight) r -= avail[pick++].weight;
                const SubtaskKind k = avail[pick].kind;
                std::erase_if(avail, [&](const Option& o) { return o.kind == k || (is_ac(k) && is_ac(o.kind)); });
                Subtask t{k, std::nullopt, std::nullopt};
                if (auto c = simple_target(k)) {
                    t.target_id = unique_of(scene, *c)->id;
                } else {
                    const auto& binds = k == SubtaskKind::WipeTable ? wipe : (k == SubtaskKind::StraightenChair ? chair : spill);
                    const auto& [mark, id] = rng.pick(binds);
                    t.landmark = mark;
                    t.target_id = id;
                }
                subtasks.push_back(t);
            }
            if (static_cast<int>(subtasks.size()) < n) continue;

            InstructionCase c;
            char id[32];
            std::snprintf(id, sizeof id, "%s_%03d", std::string(to_string(length)).c_str(), i);
            c.id = id;
            for (std::size_t k = 0; k < subtasks.size(); ++k) {
                const auto forms = phrases(subtasks[k].kind);
                const std::string part = fill_phrase(forms[static_cast<std::size_t>(rng.integer(0, static_cast<int>(forms.size()) - 1))],
                                                     subtasks[k].landmark);
                if (k == 0) c.text = capitalized(part);
                else if (k + 1 < subtasks.size()) c.text += ", then " + part;
                else c.text += (subtasks.size() == 2 ? ", and " : ", and finally ") + part;
                const auto steps = subtask_steps(subtasks[k].kind, needs_landmark(subtasks[k].kind)
                                                                       ? subtasks[k].target_id
                                                                       : std::nullopt);
                c.grounding_plan.steps.insert(c.grounding_plan.steps.end(), steps.begin(), steps.end());
            }
            c.text += ".";
            for (std::size_t at = c.text.find(" i"); at != std::string::npos; at = c.text.find(" i", at + 1)) {
                const char next = at + 2 < c.text.size() ? c.text[at + 2] : ' ';
                if (next == ' ' || next == '\'') c.text[at + 1] = 'I';
            }
            c.grounding_plan.raw_text = render_plan(c.grounding_plan.steps);
            c.subtasks = subtasks;

            // The phrases must read back unambiguously.
            const auto mentions = find_subtasks(c.text);
            if (mentions.size() != subtasks.size()) continue;
            bool same = true;
            for (std::size_t k = 0; k < mentions.size(); ++k)
                same = same && mentions[k].kind == subtasks[k].kind && mentions[k].landmark == subtasks[k].landmark;
            if (!same) continue;

            // ...and the reference plan must work.
            WorldScene trial = scene;
            RobotState robot = world.start;
            bool ok = true;
            for (const auto& s : c.grounding_plan.steps) {
                if (!execute(s, trial, robot, world.memory, &grid).success) {
                    ok = false;
                    break;
                }
            }
            for (const auto& t : subtasks) ok = ok && goal_met(t, scene, trial);
            if (!ok) continue;
            out.push_back(std::move(c));
            accepted = true;
        }
        if (!accepted) throw ValidationError("could not generate an executable instruction for case " + std::to_string(i));
    }
    return out;
}

json cases_to_json(const std::vector<InstructionCase>& cases, std::uint64_t scene_seed) {
    json arr = json::array();
    for (const auto& c : cases) {
        json subs = json::array();
        for (const auto& t : c.subtasks)
            subs.push_back({{"kind", subtask_name(t.kind)},
                            {"landmark", t.landmark ? json(category_name(*t.landmark)) : json(nullptr)},
                            {"target", t.target_id ? json(*t.target_id) : json(nullptr)}});
        arr.push_back({{"id", c.id},
                       {"text", c.text},
                       {"n_subtasks", c.n_subtasks()},
                       {"subtasks", subs},
                       {"grounding_plan", c.grounding_plan.raw_text}});
    }
    return {{"scene_seed", scene_seed}, {"cases", arr}};
}

std::pair<std::vector<InstructionCase>, std::uint64_t> cases_from_json(const json& j) {
    try {
        std::vector<InstructionCase> out;
        for (const auto& jc : j.at("cases")) {
            InstructionCase c;
            c.id = jc.at("id").get<std::string>();
            c.text = jc.at("text").get<std::string>();
            c.grounding_plan = parse_plan(jc.at("grounding_plan").get<std::string>());
            for (const auto& js : jc.at("subtasks")) {
                const auto kind = parse_subtask_name(js.at("kind").get<std::string>());
                if (!kind) throw ParseError("unknown subtask kind", 0, "$.cases[].subtasks[].kind");
                Subtask t{*kind, std::nullopt, std::nullopt};
                if (!js.at("landmark").is_null()) t.landmark = parse_category(js.at("landmark").get<std::string>());
                if (!js.at("target").is_null()) t.target_id = js.at("target").get<int>();
                c.subtasks.push_back(t);
            }
            if (c.subtasks.empty()) throw InvalidCase("case " + c.id + " has no subtasks");
            out.push_back(std::move(c));
        }
        return {std::move(out), j.at("scene_seed").get<std::uint64_t>()};
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(e.what(), 0, "$.cases");
    }
}

// ---- metrics ----

double esr(int n_e, int n) {
    if (n <= 0) throw InvalidCase("ESR needs at least one task");
    if (n_e < 0 || n_e > n) throw InvalidCase("successful executions must lie in [0, N]");
    return static_cast<double>(n_e) / static_cast<double>(n);
}

double ssl(std::span<const PlanScore> scores) {
    if (scores.empty()) throw InvalidCase("SSL needs at least one task");
    double sum = 0.0;
    for (const auto& s : scores) {
        if (s.l_g <= 0) throw InvalidCase("grounding plan length must be positive");
        if (s.l_c < 0 || s.l_p < 0 || s.l_c > std::min(s.l_g, s.l_p)) throw InvalidCase("inconsistent step counts");
        sum += s.s * static_cast<double>(s.l_c) / static_cast<double>(std::max(s.l_g, s.l_p));
    }
    return sum / static_cast<double>(scores.size());
}

int correct_steps(const std::vector<SkillAction>& gen, const std::vector<SkillAction>& ref) {
    const auto same = [](const SkillAction& a, const SkillAction& b) {
        if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
        if (a.kind == SkillKind::MoveTo && !a.args.empty()) {
            const auto ta = parse_target_name(a.args[0]), tb = parse_target_name(b.args[0]);
            if (ta && tb) return ta->category == tb->category;
        }
        return a.args == b.args;
    };
    std::vector<std::vector<int>> dp(gen.size() + 1, std::vector<int>(ref.size() + 1, 0));
    for (std::size_t i = 1; i <= gen.size(); ++i)
        for (std::size_t j = 1; j <= ref.size(); ++j)
            dp[i][j] = same(gen[i - 1], ref[j - 1]) ? dp[i - 1][j - 1] + 1 : std::max(dp[i - 1][j], dp[i][j - 1]);
    return dp[gen.size()][ref.size()];
}

// ---- reports ----

json EvalReport::to_json() const {
    json j = {{"config", config}, {"config_hash", sha256_hex(config.dump())}, {"aggregates", aggregates}, {"cases", cases}};
    return j;
}

std::string EvalReport::dump() const { return to_json().dump(2) + "\n"; }

EvalReport run_instruction_eval(const std::vector<InstructionCase>& cases, Backend& backend, const EvalWorld& world,
                                const InstructionEvalOptions& options) {
    const NavGrid grid(world.scene);
    std::vector<json> records(cases.size());
    parallel_for(cases.size(), options.jobs, [&](std::size_t k) {
        const InstructionCase& c = cases[k];
        json rec = {{"id", c.id}, {"instruction", c.text}, {"n_subtasks", c.n_subtasks()},
                    {"grounding_plan", plan_lines(c.grounding_plan.steps)}};
        const PlannerRequest req = make_planner_request(c.text, world.memory, !options.ablation.no_language,
                                                        !options.ablation.no_image);
        std::vector<PlanAttempt> attempts;
        Plan generated;
        std::string error;
        try {
            generated = plan(req, backend, &attempts);
        } catch (const Error& e) {
            error = e.kind() + ": " + e.what();
        }
        json jattempts = json::array();
        for (const auto& a : attempts) jattempts.push_back({{"raw", a.raw_text}, {"error", a.error}});
        rec["attempts"] = jattempts;
        rec["generated_plan"] = plan_lines(generated.steps);
        rec["error"] = error;

        WorldScene scene = world.scene;
        RobotState robot = world.start;
        bool executed = error.empty() && !generated.steps.empty();
        json steps = json::array();
        for (const auto& s : generated.steps) {
            if (!executed) break;
            const SkillOutcome o = execute(s, scene, robot, world.memory, &grid);
            steps.push_back(outcome_json(to_string(s), o));
            executed = o.success;
        }
        rec["steps"] = steps;
        json subs = json::array();
        bool goals = true;
        for (const auto& t : c.subtasks) {
            const bool met = goal_met(t, world.scene, scene);
            goals = goals && met;
            subs.push_back({{"kind", subtask_name(t.kind)}, {"target", t.target_id ? json(*t.target_id) : json(nullptr)},
                            {"goal_met", met}});
        }
        rec["subtasks"] = subs;
        const PlanScore score{executed && goals ? 1 : 0, static_cast<int>(c.grounding_plan.steps.size()),
                              static_cast<int>(generated.steps.size()),
                              correct_steps(generated.steps, c.grounding_plan.steps)};
        rec["score"] = {{"s", score.s}, {"l_g", score.l_g}, {"l_p", score.l_p}, {"l_c", score.l_c}};
        records[k] = std::move(rec);
    });

    EvalReport r;
    for (auto& rec : records) r.cases.push_back(std::move(rec));
    json ids = json::array();
    for (const auto& c : cases) ids.push_back(c.id + "|" + c.text);
    r.config = {{"kind", "instruction"},
                {"scene_seed", world.scene_seed},
                {"backend", backend.name()},
                {"ablation", {{"no_language", options.ablation.no_language}, {"no_image", options.ablation.no_image}}},
                {"n_cases", cases.size()},
                {"cases_hash", sha256_hex(ids.dump())}};
    r.aggregates = recompute_instruction_aggregates(r.cases);
    return r;
}

json recompute_instruction_aggregates(const json& cases) {
    const int n = static_cast<int>(cases.size());
    if (n == 0) return {{"N", 0}};
    std::vector<PlanScore> scores;
    int n_e = 0, met_total = 0, sub_total = 0;
    double frac_sum = 0.0;
    for (const auto& c : cases) {
        const auto& s = c.at("score");
        scores.push_back({s.at("s").get<int>(), s.at("l_g").get<int>(), s.at("l_p").get<int>(), s.at("l_c").get<int>()});
        n_e += scores.back().s;
        int met = 0, total = 0;
        for (const auto& t : c.at("subtasks")) {
            ++total;
            met += t.at("goal_met").get<bool>() ? 1 : 0;
        }
        met_total += met;
        sub_total += total;
        frac_sum += total > 0 ? static_cast<double>(met) / total : 0.0;
    }
    const double a = esr(n_e, n);
    const double b = frac_sum / n;
    const double s = ssl(scores);
    return {{"N", n},
            {"n_e", n_e},
            {"ESR_instruction", a},
            {"ESR_subtask", b},
            {"ESR_subtask_pooled", sub_total > 0 ? static_cast<double>(met_total) / sub_total : 0.0},
            {"SSL", s},
            {"chain_holds", s <= a && a <= b && b <= 1.0}};
}

std::vector<QAItem> select_scenes(const std::vector<QAItem>& dataset, int count, std::uint64_t seed) {
    std::vector<std::string> ids;
    for (const auto& it : dataset)
        if (std::find(ids.begin(), ids.end(), it.scene_id) == ids.end()) ids.push_back(it.scene_id);
    detail::Rng rng(seed);
    rng.shuffle(ids);
    ids.resize(std::min(ids.size(), static_cast<std::size_t>(std::max(0, count))));
    const std::set<std::string> chosen(ids.begin(), ids.end());
    std::vector<QAItem> out;
    for (const auto& it : dataset)
        if (chosen.contains(it.scene_id)) out.push_back(it);
    return out;
}

EvalReport run_eqa_eval(const std::vector<QAItem>& dataset, Backend& backend, const EqaEvalOptions& options) {
    // Scenes in order of first appearance, each with its items.
    std::vector<std::string> scene_ids;
    std::map<std::string, std::vector<std::size_t>> by_scene;
    for (std::size_t k = 0; k < dataset.size(); ++k) {
        auto& v = by_scene[dataset[k].scene_id];
        if (v.empty()) scene_ids.push_back(dataset[k].scene_id);
        v.push_back(k);
    }
    std::map<std::string, std::unique_ptr<NavGrid>> grids;
    for (const auto& id : scene_ids) grids[id] = std::make_unique<NavGrid>(dataset[by_scene[id].front()].scene);

    std::vector<json> records(dataset.size());
    const auto run_one = [&](std::size_t k, RobotState& robot, EnvironmentMemory& mem, EqaContext& ctx) {
        const QAItem& item = dataset[k];
        json rec = {{"scene_id", item.scene_id}, {"template_id", item.template_id}, {"type", to_string(item.type)},
                    {"question", item.question}, {"expected", item.answer}};
        EqaEpisodeResult res;
        std::string error;
        try {
            res = run_eqa_episode(item.question, item.scene, robot, mem, backend, options.caps, ctx,
                                  grids.at(item.scene_id).get());
        } catch (const Error& e) {
            error = e.kind() + ": " + e.what();
        }
        json turns = json::array();
        for (const auto& t : res.turns)
            turns.push_back({{"reply", t.raw_text}, {"target", t.target}, {"reached", t.reached}, {"distance", t.distance}});
        rec["answer"] = res.answer;
        rec["correct"] = error.empty() && normalize_answer(res.answer) == normalize_answer(item.answer);
        rec["ec"] = res.ec;
        rec["upc"] = res.upc;
        rec["pl_cm"] = res.pl * 100.0;
        rec["forced"] = res.forced;
        rec["error"] = error;
        rec["turns"] = turns;
        records[k] = std::move(rec);
    };

    if (options.multi_round) {
        parallel_for(scene_ids.size(), options.jobs, [&](std::size_t s) {
            const auto& idx = by_scene.at(scene_ids[s]);
            const WorldScene& scene = dataset[idx.front()].scene;
            RobotState robot = start_pose(scene, *grids.at(scene_ids[s]));
            EnvironmentMemory mem(scene.bounds, MemoryConfig{}, options.memory);
            EqaContext ctx;
            for (std::size_t k : idx) run_one(k, robot, mem, ctx);
        });
    } else {
        parallel_for(dataset.size(), options.jobs, [&](std::size_t k) {
            const WorldScene& scene = dataset[k].scene;
            RobotState robot = start_pose(scene, *grids.at(dataset[k].scene_id));
            EnvironmentMemory mem(scene.bounds, MemoryConfig{}, options.memory);
            EqaContext ctx;
            run_one(k, robot, mem, ctx);
        });
    }

    EvalReport r;
    for (auto& rec : records) r.cases.push_back(std::move(rec));
    json ids = json::array();
    for (const auto& it : dataset) ids.push_back(it.scene_id + "|" + it.question + "|" + it.answer);
    r.config = {{"kind", "eqa"},
                {"mode", options.multi_round ? "multi" : "single"},
                {"backend", backend.name()},
                {"max_explorations", options.caps.max_explorations},
                {"memory", {{"language", options.memory.language_memory}, {"image", options.memory.image_memory}}},
                {"n_items", dataset.size()},
                {"dataset_hash", sha256_hex(ids.dump())}};
    r.aggregates = recompute_eqa_aggregates(r.cases);
    return r;
}

json recompute_eqa_aggregates(const json& cases) {
    const auto n = cases.size();
    if (n == 0) return {{"N", 0}};
    double correct = 0.0;
    for (const auto& c : cases) correct += c.at("correct").get<bool>() ? 1.0 : 0.0;
    return {{"N", n},
            {"ACC", correct / static_cast<double>(n)},
            {"EC", mean(cases, "ec")},
            {"UPC", mean(cases, "upc")},
            {"PL", mean(cases, "pl_cm")}};
}

std::string summary_table(const EvalReport& report) {
    const auto& a = report.aggregates;
    const auto num = [&](const char* key, int precision = 4) {
        if (!a.contains(key)) return std::string("-");
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*f", precision, a.at(key).get<double>());
        return std::string(buf);
    };
    std::string out;
    if (report.config.value("kind", "") == "instruction") {
        out += "cases  ESR(a)  ESR(b)  SSL\n";
        out += std::to_string(a.value("N", 0)) + "  " + num("ESR_instruction") + "  " + num("ESR_subtask") + "  " +
               num("SSL") + "\n";
    } else {
        out += "questions  ACC  EC  UPC  PL(cm)\n";
        out += std::to_string(a.value("N", 0)) + "  " + num("ACC") + "  " + num("EC", 2) + "  " + num("UPC", 2) + "  " +
               num("PL", 1) + "\n";
    }
    return out;
}

std::vector<std::string> missed_thresholds(const EvalReport& report, const Thresholds& t) {
    std::vector<std::string> out;
    const auto& a = report.aggregates;
    const auto check = [&](const std::optional<double>& min, const char* key) {
        if (!min) return;
        const double v = a.contains(key) ? a.at(key).get<double>() : 0.0;
        if (v < *min) out.push_back(std::string(key) + " " + std::to_string(v) + " < " + std::to_string(*min));
    };
    check(t.min_esr_instruction, "ESR_instruction");
    check(t.min_ssl, "SSL");
    check(t.min_acc, "ACC");
    return out;
}

}  // namespace meia
