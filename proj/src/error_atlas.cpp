#include "graderalign/error_atlas.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <set>
#include <sstream>

#include "graderalign/errors.hpp"

namespace graderalign {

using nlohmann::json;

namespace {

const std::array<const char*, kCauseCount> kCauseNames = {
    "Inappropriate Expression",
    "Incorrect Logic Chain",
    "Incorrect Logic Object",
    "No Logic Chain",
};

std::string now_iso8601() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

std::string annotation_key(const Annotation& a) {
    return a.item_id + "\x1f" + a.setting_label + "\x1f" + std::to_string(a.rule_index);
}

}  // namespace

std::string cause_name(ErrorCause cause) { return kCauseNames[static_cast<int>(cause)]; }

ErrorCause cause_from_name(const std::string& name) {
    for (int i = 0; i < kCauseCount; ++i)
        if (name == kCauseNames[i]) return static_cast<ErrorCause>(i);
    throw ParseError("unknown error cause '" + name + "'");
}

std::vector<QueueEntry> collect_incorrect_rules(
    const std::vector<std::pair<std::string, std::string>>& keys,
    const std::vector<AlignmentReport>& reports, const std::vector<GeneratedRubric>& rubrics,
    double tau_precision) {
    if (keys.size() != reports.size() || keys.size() != rubrics.size())
        throw ValidationError("collect_incorrect_rules: keys, reports, and rubrics must align");

    std::set<std::pair<std::string, std::string>> seen;
    std::vector<QueueEntry> queue;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const auto& [item_id, setting_label] = keys[i];
        if (!seen.insert(keys[i]).second)
            throw ValidationError("duplicate (item, setting) key: " + item_id + "/" +
                                  setting_label);
        if (rubrics[i].item_id != item_id || rubrics[i].setting_label != setting_label)
            throw ValidationError("rubric key mismatch at " + item_id + "/" + setting_label);

        for (const auto& ev : reports[i].matches) {
            if (ev.score >= tau_precision) continue;
            if (ev.rule_index < 0 || ev.rule_index >= static_cast<int>(rubrics[i].rules.size()))
                throw ValidationError("match index out of range for " + item_id + "/" +
                                      setting_label);
            queue.push_back({item_id, setting_label, ev.rule_index,
                             rubrics[i].rules[ev.rule_index].text, ev.score});
        }
    }
    std::stable_sort(queue.begin(), queue.end(), [](const QueueEntry& a, const QueueEntry& b) {
        if (a.item_id != b.item_id) return a.item_id < b.item_id;
        if (a.setting_label != b.setting_label) return a.setting_label < b.setting_label;
        return a.rule_index < b.rule_index;
    });
    return queue;
}

std::vector<Annotation> annotate(const std::vector<QueueEntry>& queue,
                                 const std::vector<Annotation>& existing, std::istream& in,
                                 std::ostream& out, const std::string& annotator) {
    std::set<std::string> done;
    for (const auto& a : existing) done.insert(annotation_key(a));

    std::vector<Annotation> fresh;
    for (const auto& entry : queue) {
        Annotation a;
        a.item_id = entry.item_id;
        a.setting_label = entry.setting_label;
        a.rule_index = entry.rule_index;
        a.rule_text = entry.rule_text;
        if (done.count(annotation_key(a))) continue;

        out << "\nItem: " << entry.item_id << "  Setting: " << entry.setting_label
            << "  Rule #" << entry.rule_index + 1 << " (best score " << entry.best_score << ")\n";
        out << "  " << entry.rule_text << "\n";
        for (int i = 0; i < kCauseCount; ++i)
            out << "  [" << i + 1 << "] " << kCauseNames[i] << "\n";

        int choice = 0;
        for (;;) {
            out << "Cause (1-" << kCauseCount << "): " << std::flush;
            std::string line;
            if (!std::getline(in, line))
                throw ValidationError("annotation input channel closed mid-session");
            try {
                choice = std::stoi(line);
            } catch (...) {
                choice = 0;
            }
            if (choice >= 1 && choice <= kCauseCount) break;
            out << "Invalid selection.\n";
        }
        a.cause = static_cast<ErrorCause>(choice - 1);
        a.annotator = annotator;
        a.timestamp = now_iso8601();
        done.insert(annotation_key(a));
        fresh.push_back(std::move(a));
    }
    return fresh;
}

CauseDistribution cause_proportions(const std::vector<Annotation>& annotations,
                                    const std::string& setting_label) {
    CauseDistribution dist;
    dist.setting_label = setting_label;
    for (const auto& a : annotations)
        if (a.setting_label == setting_label) {
            ++dist.counts[static_cast<int>(a.cause)];
            ++dist.total;
        }
    if (dist.total == 0)
        throw std::invalid_argument("cause_proportions: no annotations for setting '" +
                                    setting_label + "'");
    for (int i = 0; i < kCauseCount; ++i)
        dist.percentages[i] = std::round(10000.0 * dist.counts[i] / dist.total) / 100.0;
    return dist;
}

std::vector<Annotation> load_annotations(const std::string& path) {
    std::ifstream in(path);
    std::vector<Annotation> out;
    if (!in) return out;
    std::string line;
    std::size_t lineno = 0;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            auto j = json::parse(line);
            Annotation a;
            a.item_id = j.at("item_id").get<std::string>();
            a.setting_label = j.at("setting").get<std::string>();
            a.rule_index = j.at("rule_index").get<int>();
            a.rule_text = j.at("rule_text").get<std::string>();
            a.cause = cause_from_name(j.at("cause").get<std::string>());
            a.annotator = j.value("annotator", "");
            a.timestamp = j.value("timestamp", "");
            if (seen.insert(annotation_key(a)).second) out.push_back(std::move(a));
        } catch (const json::exception& e) {
            throw IntegrityError("annotation file " + path + " line " + std::to_string(lineno) +
                                 ": " + e.what());
        }
    }
    return out;
}

void append_annotations(const std::string& path, const std::vector<Annotation>& annotations) {
    auto existing = load_annotations(path);
    std::set<std::string> seen;
    for (const auto& a : existing) seen.insert(annotation_key(a));

    std::ofstream out(path, std::ios::app);
    if (!out) throw IntegrityError("cannot append to annotation file: " + path);
    for (const auto& a : annotations) {
        if (!seen.insert(annotation_key(a)).second) continue;
        json j;
        j["item_id"] = a.item_id;
        j["setting"] = a.setting_label;
        j["rule_index"] = a.rule_index;
        j["rule_text"] = a.rule_text;
        j["cause"] = cause_name(a.cause);
        j["annotator"] = a.annotator;
        j["timestamp"] = a.timestamp;
        out << j.dump() << "\n";
    }
}

}  // namespace graderalign
