#include "graderalign/item_model.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "graderalign/errors.hpp"
#include "graderalign/rng.hpp"

namespace graderalign {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

void validate_item(const AssessmentItem& item) {
    const std::string where = "item '" + item.id + "'";
    if (item.id.empty()) throw ValidationError("item with empty id");
    if (trim(item.task_description).empty())
        throw ValidationError(where + ": empty task description");
    const auto L = item.labels.size();
    if (L != 2 && L != 3)
        throw ValidationError(where + ": expected 2 or 3 labels, got " + std::to_string(L));
    for (std::size_t i = 0; i < L; ++i) {
        if (item.labels[i].name.empty()) throw ValidationError(where + ": empty label name");
        if (item.labels[i].ordinal != static_cast<int>(i))
            throw ValidationError(where + ": label ordinals must be 0.." + std::to_string(L - 1));
        for (std::size_t j = i + 1; j < L; ++j)
            if (item.labels[i].name == item.labels[j].name)
                throw ValidationError(where + ": duplicate label '" + item.labels[i].name + "'");
    }
    // Exactly one holistic descriptor per label.
    if (item.holistic_rubric.size() != L)
        throw ValidationError(where + ": holistic rubric must have one descriptor per label");
    for (const auto& lab : item.labels) {
        auto n = std::count_if(item.holistic_rubric.begin(), item.holistic_rubric.end(),
                               [&](const auto& p) { return p.first == lab.name; });
        if (n != 1)
            throw ValidationError(where + ": holistic rubric missing descriptor for label '" +
                                  lab.name + "'");
    }
    for (const auto& rule : item.analytic_rubric)
        if (trim(rule).empty()) throw ValidationError(where + ": empty analytic rule");
    std::set<std::string> seen_resp;
    for (const auto& r : item.responses) {
        if (r.id.empty()) throw ValidationError(where + ": response with empty id");
        if (!seen_resp.insert(r.id).second)
            throw ValidationError(where + ": duplicate response id '" + r.id + "'");
        if (trim(r.text).empty())
            throw ValidationError(where + ": response '" + r.id + "' has empty text");
        if (!item.find_label(r.gold_label.name))
            throw ValidationError(where + ": response '" + r.id + "' has unknown label '" +
                                  r.gold_label.name + "'");
    }
}

AssessmentItem parse_item(const json& j) {
    AssessmentItem item;
    try {
        item.id = j.at("id").get<std::string>();
        item.task_description = j.at("task").get<std::string>();
        int ordinal = 0;
        for (const auto& name : j.at("levels"))
            item.labels.push_back({name.get<std::string>(), ordinal++});
        const auto& holistic = j.at("holistic");
        for (const auto& lab : item.labels) {
            if (holistic.contains(lab.name))
                item.holistic_rubric.emplace_back(lab.name, holistic.at(lab.name).get<std::string>());
        }
        for (const auto& rule : j.at("analytic"))
            item.analytic_rubric.push_back(rule.get<std::string>());
        for (const auto& rj : j.at("responses")) {
            StudentResponse r;
            r.id = rj.at("id").get<std::string>();
            r.text = rj.at("text").get<std::string>();
            const auto label_name = rj.at("label").get<std::string>();
            auto lab = item.find_label(label_name);
            r.gold_label = lab ? *lab : GradeLabel{label_name, -1};
            item.responses.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw ParseError("item '" + item.id + "': " + e.what());
    }
    validate_item(item);
    return item;
}

}  // namespace

std::optional<GradeLabel> AssessmentItem::find_label(const std::string& name) const {
    for (const auto& lab : labels)
        if (lab.name == name) return lab;
    return std::nullopt;
}

std::vector<AssessmentItem> load_items(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("item file not found: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError("item file " + path + ": " + e.what());
    }
    if (!doc.contains("items") || !doc["items"].is_array())
        throw ParseError("item file " + path + ": missing top-level 'items' array");
    std::vector<AssessmentItem> items;
    std::set<std::string> ids;
    for (const auto& j : doc["items"]) {
        auto item = parse_item(j);
        if (!ids.insert(item.id).second)
            throw ValidationError("duplicate item id '" + item.id + "'");
        items.push_back(std::move(item));
    }
    return items;
}

std::string serialize_items(const std::vector<AssessmentItem>& items) {
    json doc;
    doc["items"] = json::array();
    for (const auto& item : items) {
        json j;
        j["id"] = item.id;
        j["task"] = item.task_description;
        j["levels"] = json::array();
        for (const auto& lab : item.labels) j["levels"].push_back(lab.name);
        j["holistic"] = json::object();
        for (const auto& [name, desc] : item.holistic_rubric) j["holistic"][name] = desc;
        j["analytic"] = item.analytic_rubric;
        j["responses"] = json::array();
        for (const auto& r : item.responses)
            j["responses"].push_back({{"id", r.id}, {"text", r.text}, {"label", r.gold_label.name}});
        doc["items"].push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

SampledCorpus sample_balanced(const AssessmentItem& item, int n, std::uint64_t seed) {
    if (n <= 0) throw std::invalid_argument("sample_balanced: n must be positive");
    if (item.responses.empty())
        throw std::invalid_argument("sample_balanced: item '" + item.id + "' has no responses");

    const int L = item.level_count();
    std::vector<std::vector<StudentResponse>> pools(L);
    for (const auto& r : item.responses) pools[r.gold_label.ordinal].push_back(r);

    const int total = static_cast<int>(item.responses.size());
    const int n_eff = std::min(n, total);

    // Base allocation floor(n/L); remainder to labels in ordinal order.
    std::vector<int> take(L);
    const int base = n_eff / L, rem = n_eff % L;
    for (int i = 0; i < L; ++i) take[i] = base + (i < rem ? 1 : 0);

    // Short pools are taken whole; backfill round-robin starting at ordinal 0,
    // skipping exhausted labels.
    int deficit = 0;
    for (int i = 0; i < L; ++i) {
        const int pool = static_cast<int>(pools[i].size());
        if (take[i] > pool) {
            deficit += take[i] - pool;
            take[i] = pool;
        }
    }
    while (deficit > 0) {
        bool progressed = false;
        for (int i = 0; i < L && deficit > 0; ++i) {
            if (take[i] < static_cast<int>(pools[i].size())) {
                ++take[i];
                --deficit;
                progressed = true;
            }
        }
        if (!progressed) break;  // cannot happen when n_eff <= total
    }

    Rng rng(seed ^ fnv1a(item.id));
    SampledCorpus out;
    out.item_id = item.id;
    out.seed = seed;
    for (int i = 0; i < L; ++i) {
        rng.shuffle(pools[i]);
        for (int k = 0; k < take[i]; ++k) out.responses.push_back(pools[i][k]);
    }
    return out;
}

std::vector<StudentResponse> select_graded_examples(const AssessmentItem& item, int k,
                                                    std::uint64_t seed,
                                                    const std::set<std::string>& exclude_ids) {
    if (k < 1) throw std::invalid_argument("select_graded_examples: k must be >= 1");

    const int L = item.level_count();
    std::vector<std::vector<StudentResponse>> pools(L);
    for (const auto& r : item.responses)
        if (!exclude_ids.count(r.id)) pools[r.gold_label.ordinal].push_back(r);

    Rng rng(seed ^ fnv1a(item.id) ^ 0x67726164ULL);  // distinct stream from sample_balanced
    for (auto& pool : pools) rng.shuffle(pool);

    // First pass: one response per label (coverage), ordinal order.
    std::vector<StudentResponse> out;
    std::vector<std::size_t> cursor(L, 0);
    for (int i = 0; i < L && static_cast<int>(out.size()) < k; ++i) {
        if (!pools[i].empty()) {
            out.push_back(pools[i][0]);
            cursor[i] = 1;
        }
    }
    // Fill the rest round-robin across remaining pool entries.
    bool progressed = true;
    while (static_cast<int>(out.size()) < k && progressed) {
        progressed = false;
        for (int i = 0; i < L && static_cast<int>(out.size()) < k; ++i) {
            if (cursor[i] < pools[i].size()) {
                out.push_back(pools[i][cursor[i]++]);
                progressed = true;
            }
        }
    }
    return out;
}

}  // namespace graderalign
