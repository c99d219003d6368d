#include "meia/eqa.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include "meia/error.hpp"
#include "rng.hpp"

namespace meia {

using nlohmann::json;

namespace {

const std::array<QuestionTemplate, 5> kTemplates = {{
    {1, QuestionType::Location, "What is the item on the same table as the <obj>?", false},
    {2, QuestionType::Location, "Are the <obj1> and the <obj2> on the same table?", true},
    {3, QuestionType::Comparing, "Is the <obj1> closer to the <obj2> than to the <obj3>?", true},
    {4, QuestionType::Existence, "Is there any <obj> in the cafe?", true},
    {5, QuestionType::Existence, "Is there anything in the cafe that I can use to <do something>?", true},
}};

const std::vector<Affordance>& affordances() {
    using C = Category;
    static const std::vector<Affordance> table = {
        {"clean the floor", {C::Mop}},
        {"wipe up a spilled drink", {C::Towel, C::Mop}},
        {"make coffee", {C::CoffeeMachine}},
        {"boil some water", {C::Kettle}},
        {"dry my hands", {C::Towel}},
        {"have a drink", {C::Cup}},
        {"eat something", {C::Bread}},
        {"cool down the room", {C::AirConditioner}},
        {"block the sunlight", {C::Curtain}},
        {"turn on the lights", {C::LightSwitch}},
        {"sit down", {C::Chair}},
        {"put my laptop down", {C::Table, C::BarCounter}},
        {"order at the counter", {C::BarCounter}},
    };
    return table;
}

// Comparing bindings closer than this are rejected as ambiguous.
constexpr double kComparingMargin = 0.3;

constexpr std::array<Category, 5> kTabletopPool = {Category::Cup, Category::Kettle, Category::Bread, Category::Towel,
                                                   Category::CoffeeMachine};

Vec3 half_extents_of(Category c) {
    switch (c) {
        case Category::Cup: return {0.05, 0.05, 0.06};
        case Category::Kettle: return {0.10, 0.08, 0.12};
        case Category::Bread: return {0.12, 0.07, 0.05};
        case Category::Towel: return {0.15, 0.10, 0.015};
        case Category::CoffeeMachine: return {0.15, 0.15, 0.20};
        default: return {0.1, 0.1, 0.1};
    }
}

const ObjectInstance& object(const WorldScene& s, int id) {
    const ObjectInstance* o = s.find(id);
    if (o == nullptr) throw OracleError("object " + std::to_string(id) + " is not in the scene");
    return *o;
}

std::size_t count_category(const WorldScene& s, Category c) {
    return static_cast<std::size_t>(
        std::count_if(s.objects.begin(), s.objects.end(), [c](const ObjectInstance& o) { return o.category == c; }));
}

// Objects a question can name unambiguously: the only one of their category.
std::vector<int> nameable(const WorldScene& s, bool on_surface_only) {
    std::vector<int> ids;
    for (const auto& o : s.objects) {
        if (o.category == Category::Table || o.category == Category::Chair) continue;
        if (count_category(s, o.category) != 1) continue;
        if (on_surface_only && !o.surface_of) continue;
        ids.push_back(o.id);
    }
    return ids;
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
    for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
        s.replace(pos, from.size(), to);
    return s;
}

}  // namespace

std::string_view to_string(QuestionType t) {
    switch (t) {
        case QuestionType::Location: return "location";
        case QuestionType::Comparing: return "comparing";
        case QuestionType::Existence: return "existence";
    }
    return "unknown";
}

std::optional<QuestionType> parse_question_type(std::string_view s) {
    for (QuestionType t : {QuestionType::Location, QuestionType::Comparing, QuestionType::Existence})
        if (to_string(t) == s) return t;
    return std::nullopt;
}

std::span<const QuestionTemplate> question_templates() { return kTemplates; }

const QuestionTemplate& question_template(int id) {
    if (id < 1 || id > 5) throw OracleError("unknown template " + std::to_string(id));
    return kTemplates[static_cast<std::size_t>(id - 1)];
}

std::span<const Affordance> affordance_table() { return affordances(); }

const Affordance* find_affordance(std::string_view activity) {
    for (const auto& a : affordances())
        if (a.activity == activity) return &a;
    return nullptr;
}

std::string render_question(const WorldScene& scene, int template_id, const QaBindings& b) {
    std::string q(question_template(template_id).text);
    const auto name = [&](std::size_t k) {
        if (k >= b.objects.size()) throw OracleError("missing object binding");
        return category_phrase(object(scene, b.objects[k]).category);
    };
    switch (template_id) {
        case 1: return replace_all(q, "<obj>", name(0));
        case 2: return replace_all(replace_all(q, "<obj1>", name(0)), "<obj2>", name(1));
        case 3: return replace_all(replace_all(replace_all(q, "<obj1>", name(0)), "<obj2>", name(1)), "<obj3>", name(2));
        case 4:
            if (!b.category) throw OracleError("missing category binding");
            return replace_all(q, "<obj>", category_phrase(*b.category));
        default: return replace_all(q, "<do something>", b.activity);
    }
}

std::optional<ParsedQuestion> parse_question(std::string_view text) {
    const auto phrase_to_category = [](std::string_view p) -> std::optional<Category> {
        for (Category c : all_categories())
            if (category_phrase(c) == p) return c;
        return std::nullopt;
    };
    for (const auto& t : kTemplates) {
        // Walk the template, binding each slot to the text up to the next
        // literal piece.
        std::string_view tpl = t.text, rest = text;
        ParsedQuestion pq;
        pq.template_id = t.id;
        bool ok = true;
        while (ok && !tpl.empty()) {
            const auto open = tpl.find('<');
            if (open == std::string_view::npos) {
                ok = rest == tpl;
                tpl = {};
                rest = {};
                break;
            }
            if (rest.substr(0, open) != tpl.substr(0, open)) {
                ok = false;
                break;
            }
            rest.remove_prefix(open);
            const auto close = tpl.find('>', open);
            const std::string_view slot = tpl.substr(open + 1, close - open - 1);
            tpl.remove_prefix(close + 1);
            const auto next = tpl.find('<');
            const std::string_view literal = tpl.substr(0, next);
            const auto end = literal.empty() ? rest.size() : rest.find(literal);
            if (end == std::string_view::npos || end == 0) {
                ok = false;
                break;
            }
            const std::string_view value = rest.substr(0, end);
            rest.remove_prefix(end);
            if (slot == "do something") {
                pq.activity = std::string(value);
            } else if (auto c = phrase_to_category(value)) {
                pq.categories.push_back(*c);
            } else {
                ok = false;
            }
        }
        if (ok && rest.empty()) return pq;
    }
    return std::nullopt;
}

OracleAnswer answer_oracle(const WorldScene& scene, int template_id, const QaBindings& b) {
    json bindings = {{"objects", b.objects}};
    if (b.category) bindings["category"] = category_name(*b.category);
    if (!b.activity.empty()) bindings["activity"] = b.activity;
    OracleAnswer out;
    out.support = {{"bindings", bindings}};
    const auto need = [&](std::size_t n) {
        if (b.objects.size() != n) throw OracleError("template " + std::to_string(template_id) + " binds " +
                                                     std::to_string(n) + " objects");
    };
    switch (template_id) {
        case 1: {
            need(1);
            const auto& a = object(scene, b.objects[0]);
            if (!a.surface_of) throw OracleError("object " + std::to_string(a.id) + " is not on a table");
            std::vector<std::pair<std::string, int>> others;
            for (const auto& o : scene.objects)
                if (o.id != a.id && o.surface_of == a.surface_of) others.emplace_back(category_phrase(o.category), o.id);
            std::sort(others.begin(), others.end());
            std::string answer;
            json ids = json::array();
            for (const auto& [name, id] : others) {
                answer += (answer.empty() ? "" : " and ") + name;
                ids.push_back(id);
            }
            out.answer = answer.empty() ? "nothing" : answer;
            out.support["surface"] = *a.surface_of;
            out.support["others"] = ids;
            return out;
        }
        case 2: {
            need(2);
            const auto& a = object(scene, b.objects[0]);
            const auto& c = object(scene, b.objects[1]);
            out.answer = a.surface_of && a.surface_of == c.surface_of ? "Yes" : "No";
            out.support["surfaces"] = {a.surface_of ? json(*a.surface_of) : json(nullptr),
                                       c.surface_of ? json(*c.surface_of) : json(nullptr)};
            return out;
        }
        case 3: {
            need(3);
            const auto& o1 = object(scene, b.objects[0]);
            const double d2 = distance(o1.position, object(scene, b.objects[1]).position);
            const double d3 = distance(o1.position, object(scene, b.objects[2]).position);
            out.answer = d2 < d3 ? "Yes" : "No";
            out.support["distances"] = {d2, d3};
            return out;
        }
        case 4: {
            if (!b.category) throw OracleError("template 4 binds a category");
            json ids = json::array();
            for (const auto& o : scene.objects)
                if (o.category == *b.category) ids.push_back(o.id);
            out.answer = ids.empty() ? "No" : "Yes";
            out.support["matches"] = ids;
            return out;
        }
        case 5: {
            const Affordance* a = find_affordance(b.activity);
            if (a == nullptr) throw OracleError("unknown activity '" + b.activity + "'");
            json ids = json::array();
            for (const auto& o : scene.objects)
                if (std::find(a->categories.begin(), a->categories.end(), o.category) != a->categories.end())
                    ids.push_back(o.id);
            out.answer = ids.empty() ? "No" : "Yes";
            out.support["matches"] = ids;
            return out;
        }
        default: throw OracleError("unknown template " + std::to_string(template_id));
    }
}

std::string normalize_answer(std::string_view s) {
    std::string out;
    bool space = false;
    for (char ch : s) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            if (space && !out.empty()) out += ' ';
            space = false;
            out += static_cast<char>(std::tolower(c));
        } else {
            space = true;
        }
    }
    return out;
}

// ---- scene randomization ----

WorldScene randomize_scene(std::uint64_t seed, const SceneOptions& opt) {
    detail::Rng rng(seed ^ 0x6d656961'73636e65ull);
    const auto has = [&](Category c) {
        return std::find(opt.catalog.begin(), opt.catalog.end(), c) != opt.catalog.end();
    };
    WorldScene s;
    s.bounds = opt.bounds;
    const Bounds2& b = s.bounds;
    const double w = b.width(), h = b.height();
    int next_id = 1;
    const auto add = [&](Category c, Vec3 pos, Vec3 half, std::optional<int> on = std::nullopt) -> ObjectInstance& {
        ObjectInstance o;
        o.id = next_id++;
        o.category = c;
        o.position = pos;
        o.half_extents = half;
        o.surface_of = on;
        for (const auto& key : state_schema(c)) o.state[std::string(key.key)] = key.default_value;
        s.objects.push_back(std::move(o));
        return s.objects.back();
    };

    // Tables on a jittered 3x2 grid, one chair beside each.
    std::vector<int> surfaces;
    if (has(Category::Table)) {
        std::vector<int> slots = {0, 1, 2, 3, 4, 5};
        rng.shuffle(slots);
        const int n = opt.complete ? 6 : rng.integer(4, 6);
        slots.resize(static_cast<std::size_t>(n));
        std::sort(slots.begin(), slots.end());
        for (int slot : slots) {
            const double fx = std::array{0.2, 0.5, 0.8}[static_cast<std::size_t>(slot % 3)];
            const double fy = slot < 3 ? 0.25 : 0.6;
            const Vec3 half{rng.uniform(0.35, 0.45), rng.uniform(0.35, 0.45), 0.375};
            const Vec3 pos{b.xmin + fx * w + rng.uniform(-0.2, 0.2), b.ymin + fy * h + rng.uniform(-0.2, 0.2), 0.375};
            auto& t = add(Category::Table, pos, half);
            t.state["dirty"] = opt.complete || rng.chance(0.3);
            surfaces.push_back(t.id);
            if (has(Category::Chair)) {
                const double side = rng.chance(0.5) ? -1.0 : 1.0;
                const Vec3 cp{pos.x + side * (half.x + 0.25), pos.y + rng.uniform(-0.1, 0.1), 0.45};
                auto& c = add(Category::Chair, cp, {0.2, 0.2, 0.45});
                c.state["aligned"] = !opt.complete && rng.chance(0.7);
            }
        }
    }
    const std::size_t n_tables = surfaces.size();
    if (has(Category::BarCounter)) {
        auto& bar = add(Category::BarCounter, {b.xmin + w * rng.uniform(0.4, 0.6), b.ymax - 0.35, 0.55}, {1.0, 0.3, 0.55});
        surfaces.push_back(bar.id);
    }

    // Uniquely-categorised items on the surfaces, one per quarter slot.
    std::vector<Category> pool;
    for (Category c : kTabletopPool)
        if (has(c)) pool.push_back(c);
    rng.shuffle(pool);
    std::size_t k = pool.size();
    if (!opt.complete && pool.size() >= 5) k = static_cast<std::size_t>(rng.integer(4, 5));
    pool.resize(k);
    std::map<int, std::vector<int>> free_slots;
    for (int sid : surfaces) free_slots[sid] = {0, 1, 2, 3};
    const auto place = [&](Category c, int sid) {
        auto& slots = free_slots[sid];
        const int slot = slots[static_cast<std::size_t>(rng.integer(0, static_cast<int>(slots.size()) - 1))];
        std::erase(slots, slot);
        const ObjectInstance& sf = *s.find(sid);
        const Vec3 half = half_extents_of(c);
        Vec3 cell_c, cell_h;
        if (sf.category == Category::BarCounter) {
            cell_h = {sf.half_extents.x / 4, sf.half_extents.y, 0};
            cell_c = {sf.position.x - sf.half_extents.x + (2 * slot + 1) * cell_h.x, sf.position.y, 0};
        } else {
            cell_h = {sf.half_extents.x / 2, sf.half_extents.y / 2, 0};
            cell_c = {sf.position.x + ((slot % 2) ? 1 : -1) * cell_h.x, sf.position.y + ((slot / 2) ? 1 : -1) * cell_h.y, 0};
        }
        const double jx = std::max(0.0, cell_h.x - half.x - 0.02), jy = std::max(0.0, cell_h.y - half.y - 0.02);
        const double top = sf.position.z + sf.half_extents.z;
        add(c, {cell_c.x + rng.uniform(-jx, jx), cell_c.y + rng.uniform(-jy, jy), top + half.z}, half, sid);
    };
    std::size_t next_item = 0;
    if (n_tables >= 2 && pool.size() >= 4) {
        std::vector<int> tables(surfaces.begin(), surfaces.begin() + static_cast<std::ptrdiff_t>(n_tables));
        rng.shuffle(tables);
        for (int pair = 0; pair < 2; ++pair) {
            place(pool[next_item++], tables[static_cast<std::size_t>(pair)]);
            place(pool[next_item++], tables[static_cast<std::size_t>(pair)]);
        }
    }
    for (; next_item < pool.size() && !surfaces.empty(); ++next_item) {
        std::vector<int> open;
        for (int sid : surfaces)
            if (!free_slots[sid].empty()) open.push_back(sid);
        if (open.empty()) break;
        place(pool[next_item], rng.pick(open));
    }

    // Wall and floor fixtures at anchors between the table rows.
    struct Anchor {
        int wall;  // 0 left, 1 right, 2 bottom
        double along;
    };
    std::vector<Anchor> anchors = {{0, 0.42}, {1, 0.42}, {0, 0.8}, {1, 0.8}, {2, 0.35}, {2, 0.65}};
    rng.shuffle(anchors);
    struct Fixture {
        Category c;
        double depth, width, height, z_center;
        double p;
    };
    const std::array<Fixture, 4> fixtures = {{
        {Category::AirConditioner, 0.15, 0.2, 0.6, 0.6, 0.6},
        {Category::LightSwitch, 0.02, 0.1, 0.1, 1.1, 0.7},
        {Category::Curtain, 0.03, 0.7, 0.9, 1.35, 0.6},
        {Category::Mop, 0.1, 0.1, 0.6, 0.6, 0.5},
    }};
    std::size_t next_anchor = 0;
    for (const auto& f : fixtures) {
        if (!has(f.c)) continue;
        const bool present = rng.chance(f.p);
        if (!opt.complete && !present) continue;
        const Anchor& a = anchors[next_anchor++];
        Vec3 pos, half;
        if (a.wall == 2) {
            pos = {b.xmin + a.along * w, b.ymin + f.depth + 0.02, f.z_center};
            half = {f.width, f.depth, f.height};
        } else {
            pos = {a.wall == 0 ? b.xmin + f.depth + 0.02 : b.xmax - f.depth - 0.02, b.ymin + a.along * h, f.z_center};
            half = {f.depth, f.width, f.height};
        }
        add(f.c, pos, half);
    }

    if (has(Category::Spill)) {
        int n = opt.complete ? 2 : (rng.chance(0.5) ? 1 : 0);
        std::vector<std::pair<double, double>> spots = {{0.2, 0.425}, {0.5, 0.425}, {0.8, 0.425},
                                                        {0.35, 0.8},  {0.65, 0.8},  {0.2, 0.09}, {0.8, 0.09}};
        rng.shuffle(spots);
        for (int k2 = 0; k2 < n; ++k2) {
            const auto [fx, fy] = spots[static_cast<std::size_t>(k2)];
            add(Category::Spill,
                {b.xmin + fx * w + rng.uniform(-0.2, 0.2), b.ymin + fy * h + rng.uniform(-0.2, 0.2), 0.0025},
                {rng.uniform(0.2, 0.3), rng.uniform(0.15, 0.25), 0.0025});
        }
    }
    validate_scene(s);
    return s;
}

bool instantiable(const WorldScene& scene, int template_id) {
    switch (template_id) {
        case 1:
            for (int id : nameable(scene, true)) {
                const auto& a = *scene.find(id);
                for (const auto& o : scene.objects)
                    if (o.id != id && o.surface_of == a.surface_of) return true;
            }
            return false;
        case 2: return nameable(scene, true).size() >= 2;
        case 3: return nameable(scene, false).size() >= 3;
        case 4: return true;
        case 5: return !affordances().empty();
        default: return false;
    }
}

// ---- dataset ----

namespace {

std::optional<QaBindings> sample_bindings(const WorldScene& s, int template_id, detail::Rng& rng) {
    QaBindings b;
    switch (template_id) {
        case 1: {
            std::vector<int> c;
            for (int id : nameable(s, true)) {
                const auto& a = *s.find(id);
                for (const auto& o : s.objects)
                    if (o.id != id && o.surface_of == a.surface_of) {
                        c.push_back(id);
                        break;
                    }
            }
            if (c.empty()) return std::nullopt;
            b.objects = {rng.pick(c)};
            return b;
        }
        case 2:
        case 3: {
            auto c = nameable(s, template_id == 2);
            const std::size_t n = template_id == 2 ? 2 : 3;
            if (c.size() < n) return std::nullopt;
            rng.shuffle(c);
            b.objects.assign(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(n));
            return b;
        }
        case 4: {
            const auto all = all_categories();
            b.category = all[static_cast<std::size_t>(rng.integer(0, static_cast<int>(all.size()) - 1))];
            return b;
        }
        case 5: {
            const auto& a = affordances();
            b.activity = std::string(a[static_cast<std::size_t>(rng.integer(0, static_cast<int>(a.size()) - 1))].activity);
            return b;
        }
        default: return std::nullopt;
    }
}

bool acceptable(int template_id, const OracleAnswer& a) {
    if (template_id != 3) return true;
    const auto& d = a.support.at("distances");
    return std::abs(d.at(0).get<double>() - d.at(1).get<double>()) >= kComparingMargin;
}

}  // namespace

std::vector<QAItem> generate_dataset(const DatasetOptions& opt) {
    std::vector<QAItem> items;
    for (int si = 0; si < opt.seeds; ++si) {
        const std::uint64_t seed = opt.base_seed + static_cast<std::uint64_t>(si);
        const WorldScene scene = randomize_scene(seed, opt.scene);
        char id[32];
        std::snprintf(id, sizeof id, "scene_%03d", si);
        detail::Rng rng(seed * 0x9e3779b97f4a7c15ull + 17);
        for (const auto& t : kTemplates) {
            if (!instantiable(scene, t.id))
                throw ValidationError(std::string(id) + ": template " + std::to_string(t.id) + " cannot be instantiated");
            std::set<std::string> used;
            for (int k = 0; k < opt.per_template; ++k) {
                // Alternate the wanted answer across the whole dataset.
                const bool want_yes = ((si * opt.per_template + k + t.id) % 2) == 0;
                std::optional<QAItem> best, fallback;
                for (int attempt = 0; attempt < 400 && !best; ++attempt) {
                    auto bnd = sample_bindings(scene, t.id, rng);
                    if (!bnd) break;
                    const auto ans = answer_oracle(scene, t.id, *bnd);
                    if (!acceptable(t.id, ans)) continue;
                    QAItem item{id, scene, t.type, t.id, render_question(scene, t.id, *bnd), ans.answer, *bnd, ans.support};
                    const bool fresh = !used.contains(item.question);
                    const bool wanted = !t.yes_no || (ans.answer == "Yes") == want_yes;
                    if (fresh && wanted) best = std::move(item);
                    else if (fresh && !fallback) fallback = std::move(item);
                    else if (!fallback && attempt > 200) fallback = std::move(item);
                }
                if (!best) best = std::move(fallback);
                if (!best) throw ValidationError(std::string(id) + ": no bindings for template " + std::to_string(t.id));
                used.insert(best->question);
                items.push_back(std::move(*best));
            }
        }
    }
    for (const auto& t : kTemplates) {
        if (!t.yes_no) continue;
        const double f = yes_fraction(items, t.id);
        // Tiny datasets cannot hit the band; an odd count split one apart is as even as it gets.
        const auto n = static_cast<double>(std::count_if(items.begin(), items.end(),
                                                         [&](const QAItem& it) { return it.template_id == t.id; }));
        const bool one_apart = std::abs(2 * f * n - n) <= 1.0 + 1e-9;
        if ((f < 0.4 || f > 0.6) && !one_apart)
            throw ValidationError("template " + std::to_string(t.id) + ": yes-fraction " + std::to_string(f) +
                                  " outside [0.4, 0.6]");
    }
    return items;
}

double yes_fraction(const std::vector<QAItem>& items, int template_id) {
    std::size_t n = 0, yes = 0;
    for (const auto& it : items) {
        if (it.template_id != template_id) continue;
        ++n;
        if (normalize_answer(it.answer) == "yes") ++yes;
    }
    return n == 0 ? 0.0 : static_cast<double>(yes) / static_cast<double>(n);
}

std::string write_dataset(const std::vector<QAItem>& items) {
    json arr = json::array();
    for (const auto& it : items)
        arr.push_back({{"scene_id", it.scene_id},
                       {"scene", scene_to_json(it.scene)},
                       {"type", to_string(it.type)},
                       {"template_id", it.template_id},
                       {"question", it.question},
                       {"answer", it.answer},
                       {"support", it.support}});
    return json{{"items", arr}}.dump() + "\n";
}

std::vector<QAItem> read_dataset(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), 0, "$");
    }
    std::vector<QAItem> items;
    try {
        const auto& arr = j.at("items");
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const auto& ji = arr[k];
            const std::string path = "$.items[" + std::to_string(k) + "]";
            QAItem it;
            it.scene_id = ji.at("scene_id").get<std::string>();
            it.scene = scene_from_json(ji.at("scene"));
            validate_scene(it.scene);
            const auto type = parse_question_type(ji.at("type").get<std::string>());
            if (!type) throw ParseError("unknown question type", 0, path + ".type");
            it.type = *type;
            it.template_id = ji.at("template_id").get<int>();
            if (it.template_id < 1 || it.template_id > 5) throw ParseError("template_id must be 1..5", 0, path);
            it.question = ji.at("question").get<std::string>();
            it.answer = ji.at("answer").get<std::string>();
            it.support = ji.at("support");
            const auto& jb = it.support.at("bindings");
            it.bindings.objects = jb.at("objects").get<std::vector<int>>();
            if (jb.contains("category")) {
                const auto c = parse_category(jb.at("category").get<std::string>());
                if (!c) throw ParseError("unknown category", 0, path + ".support.bindings.category");
                it.bindings.category = c;
            }
            if (jb.contains("activity")) it.bindings.activity = jb.at("activity").get<std::string>();
            items.push_back(std::move(it));
        }
    } catch (const json::exception& e) {
        throw ParseError(e.what(), 0, "$.items");
    }
    return items;
}

}  // namespace meia
