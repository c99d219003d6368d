#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "meia/scene.hpp"

namespace meia {

enum class QuestionType : std::uint8_t { Location, Comparing, Existence };
std::string_view to_string(QuestionType t);
std::optional<QuestionType> parse_question_type(std::string_view s);

struct QuestionTemplate {
    int id;
    QuestionType type;
    std::string_view text;  // slots: <obj>, <obj1>, <obj2>, <obj3>, <do something>
    bool yes_no;
};

std::span<const QuestionTemplate> question_templates();
const QuestionTemplate& question_template(int id);

struct Affordance {
    std::string_view activity;
    std::vector<Category> categories;
};

// Hand-authored activity -> enabling categories.
std::span<const Affordance> affordance_table();
const Affordance* find_affordance(std::string_view activity);

struct QaBindings {
    std::vector<int> objects;          // templates 1-3
    std::optional<Category> category;  // template 4
    std::string activity;              // template 5

    bool operator==(const QaBindings&) const = default;
};

std::string render_question(const WorldScene& scene, int template_id, const QaBindings& b);

struct ParsedQuestion {
    int template_id = 0;
    std::vector<Category> categories;  // named objects, in slot order
    std::string activity;
};
std::optional<ParsedQuestion> parse_question(std::string_view text);

struct OracleAnswer {
    std::string answer;
    nlohmann::json support;
};

// Ground-truth answer. Same-table means equal surface_of; comparing uses 3-D
// centre distances with a strict inequality. Throws OracleError on bindings
// that do not resolve.
OracleAnswer answer_oracle(const WorldScene& scene, int template_id, const QaBindings& b);

// Lowercase, punctuation stripped, whitespace collapsed, "yes."/"Yes" -> "yes".
std::string normalize_answer(std::string_view s);

struct SceneOptions {
    std::vector<Category> catalog{all_categories().begin(), all_categories().end()};
    Bounds2 bounds{0.0, 0.0, 10.0, 8.0};
    // Every catalog category present, two spills, dirty tables and misplaced
    // chairs: the world used for instruction evaluation.
    bool complete = false;
};

// Seeded cafe: 4-6 tables with one chair each, a bar counter along the far
// wall, uniquely-categorised items on the surfaces and wall/floor fixtures
// at anchor spots that keep the floor connected.
WorldScene randomize_scene(std::uint64_t seed, const SceneOptions& options = {});

// Can the template be bound at all on this scene?
bool instantiable(const WorldScene& scene, int template_id);

struct QAItem {
    std::string scene_id;
    WorldScene scene;
    QuestionType type = QuestionType::Location;
    int template_id = 1;
    std::string question;
    std::string answer;
    QaBindings bindings;
    nlohmann::json support;
};

struct DatasetOptions {
    int seeds = 70;
    int per_template = 3;
    std::uint64_t base_seed = 0;
    SceneOptions scene;
};

// seeds x 5 templates x per_template items. Yes/no templates alternate the
// wanted answer and resample bindings to keep each template's yes-fraction
// within [0.4, 0.6]; throws ValidationError naming the template otherwise.
std::vector<QAItem> generate_dataset(const DatasetOptions& options = {});

double yes_fraction(const std::vector<QAItem>& items, int template_id);

std::string write_dataset(const std::vector<QAItem>& items);
std::vector<QAItem> read_dataset(std::string_view text);

}  // namespace meia
