#include "meia/vocabulary.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace meia {

namespace {

struct KindInfo {
    SubtaskKind kind;
    std::string_view name;
    std::vector<std::string_view> phrases;
};

const std::vector<KindInfo>& kinds() {
    static const std::vector<KindInfo> k = {
        {SubtaskKind::Coffee, "coffee", {"make me a cup of coffee", "i'd like a coffee", "brew some coffee"}},
        {SubtaskKind::Milk, "milk", {"get me a glass of milk", "i'd like some milk"}},
        {SubtaskKind::Water, "water", {"pour me some hot water", "i need some hot water"}},
        {SubtaskKind::Bread, "bread", {"bring me some bread", "grab the bread for me"}},
        {SubtaskKind::AcLower, "ac_lower", {"it's too hot in here", "turn the air conditioner down"}},
        {SubtaskKind::AcRaise, "ac_raise", {"it's a bit cold in here", "turn the air conditioner up"}},
        {SubtaskKind::AcOff, "ac_off", {"switch off the air conditioner", "turn off the air conditioner"}},
        {SubtaskKind::Lights, "lights", {"turn on the lights", "it's too dark in here"}},
        {SubtaskKind::Curtains, "curtains", {"close the curtains", "draw the curtains"}},
        {SubtaskKind::WipeTable, "wipe_table",
         {"the table with the {item} on it is dirty", "please wipe the table where the {item} is"}},
        {SubtaskKind::StraightenChair, "straighten_chair",
         {"straighten the chair at the table with the {item}", "fix the chair by the {item}"}},
        {SubtaskKind::MopSpill, "mop_spill",
         {"someone spilled a drink near the {item}", "there is a mess on the floor by the {item}"}},
    };
    return k;
}

const KindInfo& info(SubtaskKind k) { return kinds()[static_cast<std::size_t>(k)]; }

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

SkillAction act(SkillKind k, std::vector<std::string> args = {}) { return {k, std::move(args)}; }

std::string target(Category c, std::optional<int> id) {
    std::string s(category_name(c));
    if (id) s += "_" + std::to_string(*id);
    return s;
}

std::vector<LanguageMemoryEntry> of_category(const std::vector<LanguageMemoryEntry>& memory, Category c) {
    std::vector<LanguageMemoryEntry> out;
    for (const auto& e : memory)
        if (e.category == c) out.push_back(e);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.object_id < b.object_id; });
    return out;
}

std::vector<int> ranked_near(const std::vector<LanguageMemoryEntry>& memory, Category c, const Vec3& p) {
    auto cands = of_category(memory, c);
    std::stable_sort(cands.begin(), cands.end(), [&](const auto& a, const auto& b) {
        return distance_xy(a.world_pos, p) < distance_xy(b.world_pos, p);
    });
    std::vector<int> ids;
    for (const auto& e : cands) ids.push_back(e.object_id);
    return ids;
}

}  // namespace

std::span<const SubtaskKind> all_subtask_kinds() {
    static const std::array<SubtaskKind, kSubtaskKindCount> all = {
        SubtaskKind::Coffee,   SubtaskKind::Milk,   SubtaskKind::Water,     SubtaskKind::Bread,
        SubtaskKind::AcLower,  SubtaskKind::AcRaise, SubtaskKind::AcOff,    SubtaskKind::Lights,
        SubtaskKind::Curtains, SubtaskKind::WipeTable, SubtaskKind::StraightenChair, SubtaskKind::MopSpill};
    return all;
}

std::string_view subtask_name(SubtaskKind k) { return info(k).name; }

std::optional<SubtaskKind> parse_subtask_name(std::string_view name) {
    for (const auto& k : kinds())
        if (k.name == name) return k.kind;
    return std::nullopt;
}

bool needs_landmark(SubtaskKind k) {
    return k == SubtaskKind::WipeTable || k == SubtaskKind::StraightenChair || k == SubtaskKind::MopSpill;
}

std::span<const std::string_view> phrases(SubtaskKind k) { return info(k).phrases; }

std::string fill_phrase(std::string_view phrase, std::optional<Category> landmark) {
    std::string out(phrase);
    const auto slot = out.find("{item}");
    if (slot != std::string::npos) out.replace(slot, 6, landmark ? category_phrase(*landmark) : std::string("item"));
    return out;
}

std::vector<SubtaskMention> find_subtasks(std::string_view instruction) {
    const std::string text = lower(instruction);
    struct Hit {
        SubtaskMention m;
        std::size_t length;
    };
    std::vector<Hit> hits;
    for (const auto& k : kinds()) {
        for (const auto phrase : k.phrases) {
            std::vector<std::pair<std::string, std::optional<Category>>> forms;
            if (phrase.find("{item}") == std::string_view::npos) {
                forms.emplace_back(std::string(phrase), std::nullopt);
            } else {
                for (Category c : all_categories()) forms.emplace_back(fill_phrase(phrase, c), c);
            }
            for (const auto& [form, landmark] : forms) {
                for (auto pos = text.find(form); pos != std::string::npos; pos = text.find(form, pos + 1))
                    hits.push_back({{k.kind, landmark, pos}, form.size()});
            }
        }
    }
    // Earliest first; at one position the longest form wins; overlapping
    // later hits are dropped.
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        if (a.m.position != b.m.position) return a.m.position < b.m.position;
        return a.length > b.length;
    });
    std::vector<SubtaskMention> out;
    std::size_t end = 0;
    for (const auto& h : hits) {
        if (!out.empty() && h.m.position < end) continue;
        out.push_back(h.m);
        end = h.m.position + h.length;
    }
    return out;
}

std::vector<int> ground_landmark(SubtaskKind k, Category landmark, const std::vector<LanguageMemoryEntry>& memory) {
    const auto marks = of_category(memory, landmark);
    if (marks.empty()) return {};
    const Vec3 at = marks.front().world_pos;
    switch (k) {
        case SubtaskKind::WipeTable: return ranked_near(memory, Category::Table, at);
        case SubtaskKind::StraightenChair: {
            const auto tables = ranked_near(memory, Category::Table, at);
            if (tables.empty()) return {};
            for (const auto& e : memory)
                if (e.object_id == tables.front()) return ranked_near(memory, Category::Chair, e.world_pos);
            return {};
        }
        case SubtaskKind::MopSpill: return ranked_near(memory, Category::Spill, at);
        default: return {};
    }
}

std::vector<SkillAction> subtask_steps(SubtaskKind k, std::optional<int> target_id) {
    using S = SkillKind;
    switch (k) {
        case SubtaskKind::Coffee: return {act(S::MoveTo, {"coffee_machine"}), act(S::MakeCoffee)};
        case SubtaskKind::Milk: return {act(S::MoveTo, {"bar_counter"}), act(S::ProduceAndGrabMilk)};
        case SubtaskKind::Water: return {act(S::MoveTo, {"kettle"}), act(S::PourWater)};
        case SubtaskKind::Bread: return {act(S::MoveTo, {"bread"}), act(S::GrabBread)};
        case SubtaskKind::AcLower: return {act(S::MoveTo, {"air_conditioner"}), act(S::ControlAc, {"lower"})};
        case SubtaskKind::AcRaise: return {act(S::MoveTo, {"air_conditioner"}), act(S::ControlAc, {"raise"})};
        case SubtaskKind::AcOff: return {act(S::MoveTo, {"air_conditioner"}), act(S::ControlAc, {"off"})};
        case SubtaskKind::Lights: return {act(S::MoveTo, {"light_switch"}), act(S::ControlLighting, {"on"})};
        case SubtaskKind::Curtains: return {act(S::MoveTo, {"curtain"}), act(S::ControlCurtains, {"close"})};
        case SubtaskKind::WipeTable:
            return {act(S::TakeTowel), act(S::MoveTo, {target(Category::Table, target_id)}), act(S::WipeTable)};
        case SubtaskKind::StraightenChair:
            return {act(S::MoveTo, {target(Category::Chair, target_id)}), act(S::StraightenChair)};
        case SubtaskKind::MopSpill:
            return {act(S::MoveTo, {target(Category::Spill, target_id)}), act(S::MopFloor)};
    }
    return {};
}

}  // namespace meia
