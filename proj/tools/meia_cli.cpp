// meia: scene generation, exploration, dataset generation, planning and the
// two evaluation harnesses.
//
// Exit codes: 0 ok, 1 runtime error, 2 usage error, 3 a configured threshold
// was missed. Failures print one line: "error: <kind>: <message>".

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "meia/eqa.hpp"
#include "meia/error.hpp"
#include "meia/eval.hpp"
#include "meia/planner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : meia::Error {
    explicit UsageError(const std::string& m) : Error("usage", m) {}
};

// --config FILE: a JSON object mirroring the flags, one nested object per
// subcommand, e.g. {"eval-instr": {"gen": "short", "count": 20}}.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

    std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
        std::vector<CLI::ConfigItem> items;
        walk(j, {}, items);
        return items;
    }

private:
    static std::string scalar(const json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        return v.dump();
    }

    static void walk(const json& obj, std::vector<std::string> parents, std::vector<CLI::ConfigItem>& out) {
        for (const auto& [key, v] : obj.items()) {
            if (v.is_object()) {
                auto p = parents;
                p.push_back(key);
                // Marks entry into the subcommand so CLI11 activates it.
                CLI::ConfigItem open;
                open.parents = p;
                open.name = "++";
                out.push_back(open);
                walk(v, p, out);
                CLI::ConfigItem close;
                close.parents = p;
                close.name = "--";
                out.push_back(close);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (v.is_array())
                for (const auto& e : v) item.inputs.push_back(scalar(e));
            else
                item.inputs.push_back(scalar(v));
            out.push_back(item);
        }
    }
};

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw meia::Error("io-error", "cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& p, const std::string& data) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw meia::Error("io-error", "cannot write " + p.string());
    out << data;
    if (!out) throw meia::Error("io-error", "short write to " + p.string());
}

void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& data) {
    write_text(p, std::string(data.begin(), data.end()));
}

// Scene from a file or a seed (complete randomized cafe); exactly one.
struct SceneSource {
    std::string file;
    std::optional<std::uint64_t> seed;

    void add(CLI::App* cmd) {
        auto* f = cmd->add_option("--scene", file, "Scene JSON file")->check(CLI::ExistingFile);
        auto* s = cmd->add_option("--scene-seed", seed, "Generate the scene from this seed instead");
        f->excludes(s);
    }

    std::pair<meia::WorldScene, std::uint64_t> load() const {
        if (!file.empty()) return {meia::load_scene(read_text(file)), seed.value_or(0)};
        meia::SceneOptions opt;
        opt.complete = true;
        const std::uint64_t s = seed.value_or(0);
        return {meia::randomize_scene(s, opt), s};
    }
};

meia::Ablation parse_ablation(const std::vector<std::string>& flags) {
    meia::Ablation a;
    for (const auto& f : flags) {
        if (f == "no-mem") a.no_language = a.no_image = true;
        else if (f == "no-language") a.no_language = true;
        else if (f == "no-image") a.no_image = true;
        else throw UsageError("unknown ablation '" + f + "' (no-mem, no-language, no-image)");
    }
    return a;
}

// Reports are checked before they are written: aggregates must follow from
// the stored records.
void check_report(const meia::EvalReport& r, bool instruction) {
    const json again = instruction ? meia::recompute_instruction_aggregates(r.cases)
                                   : meia::recompute_eqa_aggregates(r.cases);
    if (again != r.aggregates) throw meia::ValidationError("report aggregates do not match its records");
    if (instruction && r.aggregates.value("N", 0) > 0 && !r.aggregates.at("chain_holds").get<bool>())
        throw meia::ValidationError("SSL <= ESR(a) <= ESR(b) violated");
}

int emit_report(const meia::EvalReport& r, const std::string& out, const meia::Thresholds& t) {
    if (out.empty()) {
        std::cout << r.dump();
        std::cerr << meia::summary_table(r);
    } else {
        write_text(out, r.dump());
        std::cout << meia::summary_table(r);
    }
    const auto missed = meia::missed_thresholds(r, t);
    if (missed.empty()) return 0;
    std::string line;
    for (const auto& m : missed) line += (line.empty() ? "" : "; ") + m;
    std::cerr << "error: threshold-missed: " << line << "\n";
    return 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Embodied cafe agent: memory, planning and question answering"};
    app.require_subcommand(1);
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON file mirroring the command line flags");

    // gen-scenes
    auto* gen_scenes = app.add_subcommand("gen-scenes", "Write randomized scene files");
    int gs_seeds = 70;
    std::uint64_t gs_base = 0;
    std::string gs_out;
    bool gs_complete = false;
    gen_scenes->add_option("--seeds", gs_seeds, "Number of scenes")->check(CLI::PositiveNumber);
    gen_scenes->add_option("--base-seed", gs_base, "Seed of the first scene");
    gen_scenes->add_option("--out", gs_out, "Output directory")->required();
    gen_scenes->add_flag("--complete", gs_complete, "Every category present, dirty tables, misplaced chairs");

    // explore
    auto* explore = app.add_subcommand("explore", "Run the exploration tour and export the memory");
    SceneSource ex_scene;
    ex_scene.add(explore);
    std::string ex_out;
    int ex_waypoints = 10;
    explore->add_option("--out", ex_out, "Output directory")->required();
    explore->add_option("--waypoints", ex_waypoints, "Tour stops")->check(CLI::PositiveNumber);

    // gen-eqa
    auto* gen_eqa = app.add_subcommand("gen-eqa", "Generate the question answering dataset");
    meia::DatasetOptions ge;
    std::string ge_out;
    gen_eqa->add_option("--seeds", ge.seeds, "Scenes")->check(CLI::PositiveNumber);
    gen_eqa->add_option("--per-template", ge.per_template, "Questions per template and scene")->check(CLI::PositiveNumber);
    gen_eqa->add_option("--base-seed", ge.base_seed, "Seed of the first scene");
    gen_eqa->add_option("--out", ge_out, "Output file")->required();

    // plan
    auto* plan_cmd = app.add_subcommand("plan", "Plan one instruction and execute it");
    SceneSource pl_scene;
    pl_scene.add(plan_cmd);
    std::string pl_instruction, pl_backend = "scripted";
    std::vector<std::string> pl_ablate;
    plan_cmd->add_option("--instruction", pl_instruction, "Customer instruction")->required();
    plan_cmd->add_option("--backend", pl_backend, "scripted | remote | recorded:DIR | record:DIR | record-remote:DIR");
    plan_cmd->add_option("--ablate", pl_ablate, "no-mem | no-language | no-image");

    // eval-instr
    auto* eval_instr = app.add_subcommand("eval-instr", "Instruction planning evaluation");
    std::string ei_cases, ei_gen, ei_backend = "scripted", ei_out, ei_write_cases;
    int ei_count = 20, ei_jobs = 1;
    std::uint64_t ei_seed = 0, ei_scene_seed = 0;
    std::vector<std::string> ei_ablate;
    meia::Thresholds ei_thresholds;
    auto* ei_cases_opt = eval_instr->add_option("--cases", ei_cases, "Cases JSON file")->check(CLI::ExistingFile);
    auto* ei_gen_opt = eval_instr->add_option("--gen", ei_gen, "Generate cases: short | long")
                           ->check(CLI::IsMember({"short", "long"}));
    ei_cases_opt->excludes(ei_gen_opt);
    eval_instr->add_option("--count", ei_count, "Generated cases")->check(CLI::PositiveNumber);
    eval_instr->add_option("--seed", ei_seed, "Instruction generation seed");
    eval_instr->add_option("--scene-seed", ei_scene_seed, "Scene seed for generated cases");
    eval_instr->add_option("--backend", ei_backend, "scripted | remote | recorded:DIR | record:DIR | record-remote:DIR");
    eval_instr->add_option("--ablate", ei_ablate, "no-mem | no-language | no-image");
    eval_instr->add_option("--jobs", ei_jobs, "Worker lanes")->check(CLI::PositiveNumber);
    eval_instr->add_option("--out", ei_out, "Report file (stdout when absent)");
    eval_instr->add_option("--write-cases", ei_write_cases, "Also write the evaluated cases here");
    eval_instr->add_option("--min-esr", ei_thresholds.min_esr_instruction, "Fail below this ESR(a)");
    eval_instr->add_option("--min-ssl", ei_thresholds.min_ssl, "Fail below this SSL");

    // eval-eqa
    auto* eval_eqa = app.add_subcommand("eval-eqa", "Question answering evaluation");
    std::string ee_dataset, ee_mode = "single", ee_backend = "scripted", ee_out;
    int ee_subset = 0;
    std::uint64_t ee_subset_seed = 0;
    meia::EqaEvalOptions ee;
    bool ee_no_language = false, ee_no_image = false;
    meia::Thresholds ee_thresholds;
    eval_eqa->add_option("--dataset", ee_dataset, "Dataset JSON file")->required()->check(CLI::ExistingFile);
    eval_eqa->add_option("--mode", ee_mode, "single | multi")->check(CLI::IsMember({"single", "multi"}));
    eval_eqa->add_option("--backend", ee_backend, "scripted | remote | recorded:DIR | record:DIR | record-remote:DIR");
    eval_eqa->add_option("--subset-scenes", ee_subset, "Evaluate only this many randomly chosen scenes");
    eval_eqa->add_option("--subset-seed", ee_subset_seed, "Seed of the scene draw");
    eval_eqa->add_option("--max-explorations", ee.caps.max_explorations, "Explorations before an answer is forced")
        ->check(CLI::NonNegativeNumber);
    eval_eqa->add_flag("--no-language-memory", ee_no_language, "Robot keeps no language memory");
    eval_eqa->add_flag("--no-image-memory", ee_no_image, "Robot keeps no image memory");
    eval_eqa->add_option("--jobs", ee.jobs, "Worker lanes")->check(CLI::PositiveNumber);
    eval_eqa->add_option("--out", ee_out, "Report file (stdout when absent)");
    eval_eqa->add_option("--min-acc", ee_thresholds.min_acc, "Fail below this accuracy");

    app.allow_config_extras(CLI::config_extras_mode::error);
    for (auto* sub : app.get_subcommands({})) sub->configurable()->allow_config_extras(CLI::config_extras_mode::error);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        for (char& c : msg)
            if (c == '\n') c = ' ';
        std::cerr << "error: usage: " << msg << "\n";
        return 2;
    }

    try {
        if (*gen_scenes) {
            meia::SceneOptions opt;
            opt.complete = gs_complete;
            for (int k = 0; k < gs_seeds; ++k) {
                const auto seed = gs_base + static_cast<std::uint64_t>(k);
                const auto scene = meia::randomize_scene(seed, opt);
                meia::validate_scene(scene);
                char name[32];
                std::snprintf(name, sizeof name, "scene_%03d.json", k);
                write_text(fs::path(gs_out) / name, meia::dump_scene(scene));
            }
            std::cout << "wrote " << gs_seeds << " scenes to " << gs_out << "\n";
            return 0;
        }

        if (*explore) {
            const auto [scene, seed] = ex_scene.load();
            const meia::NavGrid grid(scene);
            meia::RobotState robot = meia::start_pose(scene, grid);
            meia::EnvironmentMemory mem(scene.bounds);
            const auto tour = meia::explore_tour(scene, robot, mem, grid, ex_waypoints);
            json jt = json::array();
            for (const auto& s : tour)
                jt.push_back({{"waypoint", {s.waypoint.x, s.waypoint.y}},
                              {"position", {s.position.x, s.position.y}},
                              {"reached", s.reached},
                              {"distance", s.distance},
                              {"occupied_cells", s.occupied_cells}});
            const std::string mem_text = meia::serialize_memory(mem);
            (void)meia::deserialize_memory(mem_text);  // round-trips before it is written
            const fs::path out(ex_out);
            write_text(out / "memory.json", mem_text);
            write_text(out / "floor_plan.pgm", meia::floor_plan_pgm(mem.plan()));
            write_bytes(out / "floor_plan.png", meia::floor_plan_png(mem.plan()));
            write_text(out / "tour.json", jt.dump(2) + "\n");
            std::cout << "objects " << mem.language().size() << ", occupied cells "
                      << mem.plan().count(meia::CellState::Occupied) << "\n";
            return 0;
        }

        if (*gen_eqa) {
            const auto items = meia::generate_dataset(ge);
            const std::string text = meia::write_dataset(items);
            if (meia::read_dataset(text).size() != items.size())
                throw meia::ValidationError("dataset did not round-trip");
            write_text(ge_out, text);
            std::cout << "wrote " << items.size() << " items to " << ge_out << "\n";
            return 0;
        }

        if (*plan_cmd) {
            if (pl_instruction.find_first_not_of(" \t\r\n") == std::string::npos)
                throw UsageError("instruction is empty");
            const auto [scene, seed] = pl_scene.load();
            meia::EvalWorld world = meia::build_world(scene, seed);
            const meia::Ablation a = parse_ablation(pl_ablate);
            auto backend = meia::make_backend(pl_backend);
            const auto req = meia::make_planner_request(pl_instruction, world.memory, !a.no_language, !a.no_image);
            const meia::Plan p = meia::plan(req, *backend);
            std::cout << "plan:\n" << meia::render_plan(p.steps);
            std::cout << "trace:\n";
            meia::WorldScene live = world.scene;
            meia::RobotState robot = world.start;
            const meia::NavGrid grid(live);
            for (const auto& step : p.steps) {
                const auto o = meia::execute(step, live, robot, world.memory, &grid);
                std::cout << "  " << meia::to_string(step) << " -> "
                          << (o.success ? "ok" : std::string(meia::to_string(*o.reason))) << (o.detail.empty() ? "" : ": ")
                          << o.detail << "\n";
                if (!o.success) return 1;
            }
            return 0;
        }

        if (*eval_instr) {
            if (ei_cases.empty() && ei_gen.empty()) throw UsageError("one of --cases or --gen is required");
            std::vector<meia::InstructionCase> cases;
            std::uint64_t scene_seed = ei_scene_seed;
            if (!ei_cases.empty()) {
                std::tie(cases, scene_seed) = meia::cases_from_json(json::parse(read_text(ei_cases)));
            }
            const meia::EvalWorld world = meia::build_world(scene_seed);
            if (!ei_gen.empty())
                cases = meia::generate_instructions(
                    ei_seed, ei_gen == "short" ? meia::InstructionLength::Short : meia::InstructionLength::Long, ei_count,
                    world);
            if (!ei_write_cases.empty()) write_text(ei_write_cases, meia::cases_to_json(cases, scene_seed).dump(2) + "\n");
            auto backend = meia::make_backend(ei_backend);
            meia::InstructionEvalOptions opt;
            opt.ablation = parse_ablation(ei_ablate);
            opt.jobs = ei_jobs;
            const auto report = meia::run_instruction_eval(cases, *backend, world, opt);
            check_report(report, true);
            return emit_report(report, ei_out, ei_thresholds);
        }

        if (*eval_eqa) {
            auto items = meia::read_dataset(read_text(ee_dataset));
            if (ee_subset > 0) items = meia::select_scenes(items, ee_subset, ee_subset_seed);
            ee.multi_round = ee_mode == "multi";
            ee.memory.language_memory = !ee_no_language;
            ee.memory.image_memory = !ee_no_image;
            auto backend = meia::make_backend(ee_backend);
            const auto report = meia::run_eqa_eval(items, *backend, ee);
            check_report(report, false);
            return emit_report(report, ee_out, ee_thresholds);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: usage: " << e.what() << "\n";
        return 2;
    } catch (const meia::Error& e) {
        std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "error: parse-error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
