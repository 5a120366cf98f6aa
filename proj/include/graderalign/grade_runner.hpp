#pragma once

#include <optional>
#include <string>
#include <vector>

#include "graderalign/item_model.hpp"
#include "graderalign/llm_gateway.hpp"
#include "graderalign/prompt_forge.hpp"

namespace graderalign {

enum class ParseStatus { Parsed, MissingRating, UnknownLabel };

std::string parse_status_name(ParseStatus status);

struct GradingOutcome {
    std::string response_id;
    std::string raw_completion;
    std::optional<GradeLabel> predicted;
    ParseStatus parse_status = ParseStatus::MissingRating;
    bool correct = false;
};

// Per-(item, variant) grading results. The confusion matrix is gold x
// (predicted ordinals .. unparsed), so each row sums to that label's count.
struct GradingReport {
    std::string item_id;
    std::string variant_kind;
    std::vector<GradingOutcome> outcomes;
    double accuracy = 0.0;
    std::vector<std::vector<int>> confusion;  // L rows, L+1 columns (last = unparsed)
};

// Scans for "[[...]]" tokens, takes the last one, and matches it against
// the label names case-insensitively after trimming. All failures are
// statuses, never exceptions.
std::pair<std::optional<GradeLabel>, ParseStatus> extract_rating(
    const std::string& completion, const std::vector<GradeLabel>& labels);

// Runs the scoring protocol over a sample: render prompt, cached completion,
// rating extraction. Unparsed outcomes count as incorrect.
GradingReport grade_item(
    const AssessmentItem& item, const RubricVariant& variant, const SampledCorpus& sample,
    Backend& backend, ResponseCache& cache, const ChatParams& params,
    const std::optional<std::pair<StudentResponse, GradeLabel>>& example = std::nullopt);

double accuracy(const std::vector<GradingOutcome>& outcomes);

}  // namespace graderalign
