#include "graderalign/grade_runner.hpp"

#include <algorithm>
#include <cctype>

#include "graderalign/errors.hpp"

namespace graderalign {

namespace {

std::string lower_trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    std::string out = s.substr(b, e - b + 1);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

std::string parse_status_name(ParseStatus status) {
    switch (status) {
        case ParseStatus::Parsed: return "parsed";
        case ParseStatus::MissingRating: return "missing_rating";
        case ParseStatus::UnknownLabel: return "unknown_label";
    }
    return "?";
}

std::pair<std::optional<GradeLabel>, ParseStatus> extract_rating(
    const std::string& completion, const std::vector<GradeLabel>& labels) {
    // Manual scan (the test oracle uses std::regex independently).
    std::optional<std::string> last_token;
    std::size_t pos = 0;
    while (pos < completion.size()) {
        auto open = completion.find("[[", pos);
        if (open == std::string::npos) break;
        auto close = completion.find("]]", open + 2);
        if (close == std::string::npos) break;
        last_token = completion.substr(open + 2, close - open - 2);
        pos = close + 2;
    }
    if (!last_token) return {std::nullopt, ParseStatus::MissingRating};

    const auto token = lower_trim(*last_token);
    for (const auto& lab : labels)
        if (lower_trim(lab.name) == token) return {lab, ParseStatus::Parsed};
    return {std::nullopt, ParseStatus::UnknownLabel};
}

GradingReport grade_item(const AssessmentItem& item, const RubricVariant& variant,
                         const SampledCorpus& sample, Backend& backend, ResponseCache& cache,
                         const ChatParams& params,
                         const std::optional<std::pair<StudentResponse, GradeLabel>>& example) {
    if (sample.responses.empty())
        throw std::invalid_argument("grade_item: empty sample for item '" + item.id + "'");

    GradingReport report;
    report.item_id = item.id;
    switch (variant.kind) {
        case RubricKind::None: report.variant_kind = "none"; break;
        case RubricKind::HumanAnalytic: report.variant_kind = "human_analytic"; break;
        case RubricKind::GeneratedAnalytic: report.variant_kind = "generated_analytic"; break;
        case RubricKind::Holistic: report.variant_kind = "holistic"; break;
    }
    const int L = item.level_count();
    report.confusion.assign(L, std::vector<int>(L + 1, 0));

    for (const auto& response : sample.responses) {
        const auto transcript = render_grading_prompt(item, variant, response, example);
        GradingOutcome outcome;
        outcome.response_id = response.id;
        outcome.raw_completion = cached_complete(cache, backend, transcript, params);
        auto [label, status] = extract_rating(outcome.raw_completion, item.labels);
        outcome.predicted = label;
        outcome.parse_status = status;
        outcome.correct = label && label->ordinal == response.gold_label.ordinal;

        const int col = label ? label->ordinal : L;  // last column = unparsed
        report.confusion[response.gold_label.ordinal][col] += 1;
        report.outcomes.push_back(std::move(outcome));
    }
    report.accuracy = accuracy(report.outcomes);
    return report;
}

double accuracy(const std::vector<GradingOutcome>& outcomes) {
    if (outcomes.empty()) throw std::invalid_argument("accuracy: empty outcome list");
    const auto correct = std::count_if(outcomes.begin(), outcomes.end(),
                                       [](const auto& o) { return o.correct; });
    return static_cast<double>(correct) / static_cast<double>(outcomes.size());
}

}  // namespace graderalign
