#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "graderalign/rubric_align.hpp"

namespace graderalign {

// Closed four-cause taxonomy for misaligned generated rules.
enum class ErrorCause {
    InappropriateExpression = 0,
    IncorrectLogicChain = 1,
    IncorrectLogicObject = 2,
    NoLogicChain = 3,
};

constexpr int kCauseCount = 4;

std::string cause_name(ErrorCause cause);
ErrorCause cause_from_name(const std::string& name);  // throws ParseError

struct Annotation {
    std::string item_id;
    std::string setting_label;
    int rule_index = 0;
    std::string rule_text;
    ErrorCause cause = ErrorCause::InappropriateExpression;
    std::string annotator;
    std::string timestamp;  // ISO-8601; informational only
};

struct CauseDistribution {
    std::string setting_label;
    std::array<int, kCauseCount> counts{};
    std::array<double, kCauseCount> percentages{};  // 100*count/total, 2 decimals
    int total = 0;
};

// One rule awaiting annotation, with its alignment evidence.
struct QueueEntry {
    std::string item_id;
    std::string setting_label;
    int rule_index = 0;
    std::string rule_text;
    double best_score = 0.0;
};

// Exactly the generated rules whose best match score < tau_precision,
// ordered by item then rule index. Reports and rubrics are keyed by
// (item, setting); duplicate or mismatched keys are a consistency error.
std::vector<QueueEntry> collect_incorrect_rules(
    const std::vector<std::pair<std::string, std::string>>& keys,  // (item_id, setting_label)
    const std::vector<AlignmentReport>& reports, const std::vector<GeneratedRubric>& rubrics,
    double tau_precision);

// Interactive annotation over an abstract channel. Entries already present
// in `existing` are skipped (session resume); invalid selections re-prompt.
std::vector<Annotation> annotate(const std::vector<QueueEntry>& queue,
                                 const std::vector<Annotation>& existing, std::istream& in,
                                 std::ostream& out, const std::string& annotator);

CauseDistribution cause_proportions(const std::vector<Annotation>& annotations,
                                    const std::string& setting_label);

// Append-only JSON-lines persistence; re-appending a present record is a no-op.
std::vector<Annotation> load_annotations(const std::string& path);
void append_annotations(const std::string& path, const std::vector<Annotation>& annotations);

}  // namespace graderalign
