#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "graderalign/grade_runner.hpp"
#include "graderalign/item_model.hpp"
#include "graderalign/llm_gateway.hpp"
#include "graderalign/prompt_forge.hpp"
#include "graderalign/rubric_align.hpp"
#include "graderalign/stat_lab.hpp"

namespace graderalign {

// The six experimental rows, in table order.
enum class Setting { NoAr, HumanAr, Oneshot, Fullshot, FullshotHolistic, FullshotGraded };

std::string setting_slug(Setting s);
std::string setting_display(Setting s);
Setting setting_from_slug(const std::string& slug);  // throws ConfigError
bool setting_generates(Setting s);  // true for the four LLM-generating rows

// CLI exit codes.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;
constexpr int kExitIntegrity = 4;

struct ExperimentConfig {
    std::string items_path;
    std::string backend_spec;            // "mock:<fixture path>" or a base URL
    std::string scorer_spec = "jaccard"; // "jaccard" or "http:<base url>"
    std::string cache_path;
    std::string run_dir = "runs/default";
    std::uint64_t seed = 0;
    int sample_n = 100;
    int max_graded = 5;
    std::string annotator = "anonymous";
    AlignmentConfig align_cfg;
    ChatParams params;
    std::vector<Setting> settings = {Setting::NoAr,    Setting::HumanAr,
                                     Setting::Oneshot, Setting::Fullshot,
                                     Setting::FullshotHolistic, Setting::FullshotGraded};

    void validate() const;  // throws ConfigError
};

// ---- Deterministic request construction, shared with the fixture tool ----

GenerationSetting generation_setting(Setting s, const ExperimentConfig& cfg);

// In-context example items for one target: oneshot picks one other item
// seeded-randomly; fullshot takes all others in file order.
std::vector<AssessmentItem> example_items_for(const std::vector<AssessmentItem>& items,
                                              std::size_t target_index, Setting s,
                                              std::uint64_t seed);

// The exact Template-1 request the pipeline issues for (item, setting).
// Graded responses for the target item exclude its evaluation sample.
ChatTranscript generation_transcript(const std::vector<AssessmentItem>& items,
                                     std::size_t target_index, Setting s,
                                     const ExperimentConfig& cfg);

// Rubric slot content for grading under a setting. Generating settings need
// the stored rubric; no_ar/human_ar derive from the item alone.
RubricVariant grading_variant(Setting s, const AssessmentItem& item,
                              const GeneratedRubric* rubric);

struct GradingPlan {
    SampledCorpus sample;
    std::optional<std::pair<StudentResponse, GradeLabel>> example;
};

// Evaluation sample plus the oneshot grading example (disjoint from it).
GradingPlan grading_plan(const AssessmentItem& item, const ExperimentConfig& cfg);

// ---- Artifact persistence ----

std::string rubric_artifact_path(const ExperimentConfig& cfg, const std::string& item_id,
                                 Setting s);
void save_rubric(const ExperimentConfig& cfg, const GeneratedRubric& rubric);
GeneratedRubric load_rubric(const ExperimentConfig& cfg, const std::string& item_id, Setting s);

void save_alignment(const ExperimentConfig& cfg, const std::string& item_id, Setting s,
                    const AlignmentReport& report);
AlignmentReport load_alignment(const ExperimentConfig& cfg, const std::string& item_id, Setting s);

void save_grading(const ExperimentConfig& cfg, Setting s, const GradingReport& report);
GradingReport load_grading(const ExperimentConfig& cfg, const std::string& item_id, Setting s,
                           const AssessmentItem& item);

// Content-digest manifest over the run directory (excludes itself and run.log).
void write_manifest(const ExperimentConfig& cfg);

// ---- Subcommand bodies; each returns a CLI exit code ----

int run_gen_rubrics(const ExperimentConfig& cfg);
int run_align(const ExperimentConfig& cfg);
int run_grade(const ExperimentConfig& cfg);
int run_stats(const ExperimentConfig& cfg,
              const std::vector<std::pair<Setting, Setting>>& ttest_pairs);
int run_annotate(const ExperimentConfig& cfg, std::istream& in, std::ostream& out,
                 const std::vector<std::string>& only_items = {});
int run_report(const ExperimentConfig& cfg);

}  // namespace graderalign
