// Builds a deterministic mock-backend fixture for an item file: canned
// rubric generations of varying quality per setting, plus canned grading
// completions with setting-dependent hit rates. The output maps request
// digests to responses, with a human-readable preview sidecar.

#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include "graderalign/digest.hpp"
#include "graderalign/pipeline.hpp"
#include "graderalign/rng.hpp"

using namespace graderalign;

namespace {

std::vector<std::string> words_of(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

// A distorted variant of a human rule: keeps a word prefix, swaps the rest
// for filler so lexical similarity lands below the precision threshold.
std::string distort(const std::string& rule) {
    auto ws = words_of(rule);
    std::string out;
    for (std::size_t i = 0; i < ws.size() / 3 + 1 && i < ws.size(); ++i) {
        if (!out.empty()) out += " ";
        out += ws[i];
    }
    return out + " throughout the whole experiment regardless of observed outcomes.";
}

std::string shortcut_rule(const std::string& rule) {
    auto ws = words_of(rule);
    std::string keyword = ws.size() > 2 ? ws[ws.size() / 2] : (ws.empty() ? "topic" : ws[0]);
    return "The response mentions " + keyword + ".";
}

std::string canned_rubric(const AssessmentItem& item, Setting s) {
    std::vector<std::string> rules;
    const auto& human = item.analytic_rubric;
    switch (s) {
        case Setting::Oneshot:
            // Mixed quality: verbatim tail, distorted head, one bogus extra.
            for (std::size_t i = 0; i < human.size(); ++i)
                rules.push_back(i == 0 ? distort(human[i]) : human[i]);
            rules.push_back("The grader values neat handwriting and overall presentation.");
            break;
        case Setting::Fullshot:
            rules = human;
            if (rules.size() > 1) rules.pop_back();  // close but drops one rule
            break;
        case Setting::FullshotHolistic:
            rules = human;  // best setting reproduces the human rubric
            break;
        case Setting::FullshotGraded:
            for (const auto& rule : human) rules.push_back(shortcut_rule(rule));
            break;
        default: break;
    }
    return join_rules(rules);
}

int target_accuracy_percent(Setting s) {
    switch (s) {
        case Setting::NoAr: return 35;
        case Setting::HumanAr: return 72;
        case Setting::Oneshot: return 55;
        case Setting::Fullshot: return 62;
        case Setting::FullshotHolistic: return 82;
        case Setting::FullshotGraded: return 48;
    }
    return 50;
}

std::string canned_grade(const AssessmentItem& item, const StudentResponse& response, Setting s) {
    const auto h = fnv1a(item.id + "|" + response.id + "|" + setting_slug(s));
    const bool hit = static_cast<int>(h % 100) < target_accuracy_percent(s);
    GradeLabel predicted = response.gold_label;
    if (!hit) {
        const int L = item.level_count();
        predicted = item.labels[(response.gold_label.ordinal + 1 + int(h % (L - 1))) % L];
    }
    return "The response addresses the task at the " + predicted.name +
           " level based on the rubric provided. Rating: [[" + predicted.name + "]]";
}

std::string preview_of(const ChatTranscript& t) {
    auto text = to_text(t);
    for (auto& c : text)
        if (c == '\n') c = ' ';
    return text.substr(0, 100);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate a deterministic mock-backend fixture for an item file"};
    ExperimentConfig cfg;
    std::string out_path = "fixtures/mock/fixture.json";
    app.add_option("--items", cfg.items_path, "item file")->required();
    app.add_option("--out", out_path, "fixture output path");
    app.add_option("--seed", cfg.seed, "sampling seed (must match the run)");
    app.add_option("--n", cfg.sample_n, "evaluation sample size (must match the run)");
    app.add_option("--max-graded", cfg.max_graded, "graded responses per prompt");
    app.add_option("--model", cfg.params.model, "model name baked into request digests");
    CLI11_PARSE(app, argc, argv);

    const auto items = load_items(cfg.items_path);
    std::map<std::string, std::string> responses, previews;

    // Rubric-generation requests.
    for (Setting s : cfg.settings) {
        if (!setting_generates(s)) continue;
        for (std::size_t i = 0; i < items.size(); ++i) {
            const auto transcript = generation_transcript(items, i, s, cfg);
            const auto key = transcript_digest(transcript, cfg.params);
            responses[key] = canned_rubric(items[i], s);
            previews[key] = preview_of(transcript);
        }
    }

    // Grading requests, built from the same rubrics the run will parse.
    for (Setting s : cfg.settings) {
        for (const auto& item : items) {
            GeneratedRubric rubric;
            rubric.item_id = item.id;
            rubric.setting_label = setting_slug(s);
            if (setting_generates(s)) {
                rubric.raw = canned_rubric(item, s);
                rubric.rules = parse_rules(rubric.raw);
            }
            const auto variant = grading_variant(s, item, setting_generates(s) ? &rubric : nullptr);
            const auto plan = grading_plan(item, cfg);
            for (const auto& response : plan.sample.responses) {
                const auto transcript =
                    render_grading_prompt(item, variant, response, plan.example);
                const auto key = transcript_digest(transcript, cfg.params);
                responses[key] = canned_grade(item, response, s);
                previews[key] = preview_of(transcript);
            }
        }
    }

    write_mock_fixture(out_path, responses, previews);
    std::cout << "wrote " << responses.size() << " canned responses to " << out_path << "\n";
    return 0;
}
