#pragma once

#include <string>
#include <vector>

#include "graderalign/item_model.hpp"

namespace graderalign {

struct Rule {
    std::string text;
    int index = 0;  // position in its rubric
};

// Parsed LLM rubric output for one (item, setting) pair.
struct GeneratedRubric {
    std::string item_id;
    std::string setting_label;
    std::string raw;
    std::vector<Rule> rules;
};

// Splits raw rubric output on the "|||" separator; falls back to
// bullet/numbered lines, then to the whole text as a single rule.
std::vector<Rule> parse_rules(const std::string& raw);

// Pluggable semantic similarity in [0,1]. score(a,a)=1 for non-empty a;
// symmetric.
class SimilarityScorer {
public:
    virtual ~SimilarityScorer() = default;
    virtual double score(const std::string& a, const std::string& b) = 0;
};

// Deterministic lexical fallback: Jaccard over lowercased,
// punctuation-stripped word sets.
class JaccardScorer : public SimilarityScorer {
public:
    double score(const std::string& a, const std::string& b) override;
};

// Remote embedding-service scorer: POST /score {"pairs": [[a,b], ...]} ->
// {"scores": [s, ...]}.
class HttpSimilarityScorer : public SimilarityScorer {
public:
    HttpSimilarityScorer(std::string base_url, std::string api_key);
    double score(const std::string& a, const std::string& b) override;

private:
    std::string base_url_;
    std::string api_key_;
};

// Matching thresholds: a generated rule is correct at >= tau_precision,
// a human rule is recalled at >= tau_recall.
struct AlignmentConfig {
    double tau_precision = 0.5;
    double tau_recall = 0.6;

    void validate() const;  // throws ConfigError unless both in (0,1]
};

struct MatchEvidence {
    int rule_index = 0;     // index on the quantified side
    int partner_index = -1; // arg-max partner on the other side (-1 if none)
    double score = 0.0;
};

struct AlignmentReport {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int rule_count = 0;  // |generated rules|
    std::vector<MatchEvidence> matches;   // one per generated rule
    std::vector<MatchEvidence> recalled;  // one per human rule
};

// Fraction of generated rules whose best similarity to any human rule
// reaches tau_precision. Matching is independent per rule (many-to-many).
double precision(const std::vector<Rule>& gen, const std::vector<Rule>& human,
                 SimilarityScorer& scorer, const AlignmentConfig& cfg);

// Fraction of human rules whose best similarity to any generated rule
// reaches tau_recall.
double recall(const std::vector<Rule>& gen, const std::vector<Rule>& human,
              SimilarityScorer& scorer, const AlignmentConfig& cfg);

// 2pr/(p+r), defined as 0 when p + r = 0.
double f1(double p, double r);

// Full alignment of a generated rubric against the item's human analytic
// rubric. An empty generated rubric yields p = r = f1 = 0, rule_count 0.
AlignmentReport align(const GeneratedRubric& generated, const AssessmentItem& item,
                      SimilarityScorer& scorer, const AlignmentConfig& cfg);

}  // namespace graderalign
