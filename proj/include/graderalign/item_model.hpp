#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace graderalign {

// One grading level of an assessment item. Ordinals within an item run
// 0..L-1 with no gaps; L is 2 (binomial) or 3 (trinomial).
struct GradeLabel {
    std::string name;
    int ordinal = 0;

    bool operator==(const GradeLabel&) const = default;
};

struct StudentResponse {
    std::string id;
    std::string text;
    GradeLabel gold_label;
};

// A science assessment item with its human-crafted meta-information: the
// task description, per-level holistic descriptors, the analytic rule list
// (ground truth for alignment), and labeled student responses.
struct AssessmentItem {
    std::string id;
    std::string task_description;
    std::vector<std::pair<std::string, std::string>> holistic_rubric;  // (label name, descriptor)
    std::vector<std::string> analytic_rubric;
    std::vector<GradeLabel> labels;
    std::vector<StudentResponse> responses;

    int level_count() const { return static_cast<int>(labels.size()); }
    std::optional<GradeLabel> find_label(const std::string& name) const;
};

// Seeded balanced sample of an item's responses; the evaluation set for one run.
struct SampledCorpus {
    std::string item_id;
    std::vector<StudentResponse> responses;
    std::uint64_t seed = 0;
};

// Loads and validates an item file (see the README for the schema).
// Throws ParseError on malformed documents and ValidationError on
// invariant violations, naming the offending item/field.
std::vector<AssessmentItem> load_items(const std::string& path);

// Serializes items back into the item-file format; load(serialize(x)) is
// semantically equal to x.
std::string serialize_items(const std::vector<AssessmentItem>& items);

// Draws min(n, pool) responses with per-label allocation floor(n/L), the
// remainder assigned in ordinal order; short label pools are taken whole
// and the deficit backfilled round-robin by ordinal. Pure in (item, n, seed).
SampledCorpus sample_balanced(const AssessmentItem& item, int n, std::uint64_t seed);

// Picks at most k label-stratified graded responses for in-context use,
// never drawing from `exclude_ids` (the evaluation sample).
std::vector<StudentResponse> select_graded_examples(const AssessmentItem& item, int k,
                                                    std::uint64_t seed,
                                                    const std::set<std::string>& exclude_ids = {});

}  // namespace graderalign
