#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "meia/mem.hpp"
#include "meia/scene.hpp"
#include "meia/skills.hpp"

namespace meia {

// Cafe sub-tasks a customer instruction can be made of. Shared by the
// instruction generator and the scripted planner so that both sides speak
// the same phrases.
enum class SubtaskKind : std::uint8_t {
    Coffee,
    Milk,
    Water,
    Bread,
    AcLower,
    AcRaise,
    AcOff,
    Lights,
    Curtains,
    WipeTable,        // landmark: an item standing on the table
    StraightenChair,  // landmark: an item on the chair's table
    MopSpill,         // landmark: the item nearest to the spill
};

inline constexpr std::size_t kSubtaskKindCount = 12;

std::span<const SubtaskKind> all_subtask_kinds();
std::string_view subtask_name(SubtaskKind k);
std::optional<SubtaskKind> parse_subtask_name(std::string_view name);
bool needs_landmark(SubtaskKind k);

// Surface forms; landmark kinds contain one "{item}" slot filled with a
// category phrase.
std::span<const std::string_view> phrases(SubtaskKind k);

std::string fill_phrase(std::string_view phrase, std::optional<Category> landmark);

struct SubtaskMention {
    SubtaskKind kind;
    std::optional<Category> landmark;
    std::size_t position = 0;  // byte offset in the instruction
};

// All phrase occurrences in an instruction, in textual order.
std::vector<SubtaskMention> find_subtasks(std::string_view instruction);

// Where a landmark subtask points in memory: the target instance for the
// move, or nullopt when memory cannot ground it. Candidates are ranked,
// best first.
std::vector<int> ground_landmark(SubtaskKind k, Category landmark, const std::vector<LanguageMemoryEntry>& memory);

// Steps for one subtask; `target_id` selects the instance for landmark kinds
// (category-only move when absent).
std::vector<SkillAction> subtask_steps(SubtaskKind k, std::optional<int> target_id);

}  // namespace meia
