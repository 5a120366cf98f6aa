// graderalign: audits the alignment between LLM and human graders.
// Subcommands: gen-rubrics, align, grade, stats, annotate, report.

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "graderalign/errors.hpp"
#include "graderalign/pipeline.hpp"

using namespace graderalign;
using nlohmann::json;

namespace {

std::vector<Setting> parse_settings_csv(const std::string& csv) {
    std::vector<Setting> out;
    std::stringstream ss(csv);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (!token.empty()) out.push_back(setting_from_slug(token));
    }
    return out;
}

// Flags override config-file values; the file mirrors every flag.
void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not found: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
    if (j.contains("items")) cfg.items_path = j["items"].get<std::string>();
    if (j.contains("backend")) cfg.backend_spec = j["backend"].get<std::string>();
    if (j.contains("scorer")) cfg.scorer_spec = j["scorer"].get<std::string>();
    if (j.contains("cache")) cfg.cache_path = j["cache"].get<std::string>();
    if (j.contains("out")) cfg.run_dir = j["out"].get<std::string>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("n")) cfg.sample_n = j["n"].get<int>();
    if (j.contains("max_graded")) cfg.max_graded = j["max_graded"].get<int>();
    if (j.contains("annotator")) cfg.annotator = j["annotator"].get<std::string>();
    if (j.contains("tau_precision"))
        cfg.align_cfg.tau_precision = j["tau_precision"].get<double>();
    if (j.contains("tau_recall")) cfg.align_cfg.tau_recall = j["tau_recall"].get<double>();
    if (j.contains("model")) cfg.params.model = j["model"].get<std::string>();
    if (j.contains("temperature")) cfg.params.temperature = j["temperature"].get<double>();
    if (j.contains("top_p")) cfg.params.top_p = j["top_p"].get<double>();
    if (j.contains("max_tokens")) cfg.params.max_tokens = j["max_tokens"].get<int>();
    if (j.contains("settings")) {
        cfg.settings.clear();
        for (const auto& s : j["settings"]) cfg.settings.push_back(setting_from_slug(s));
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Audit the alignment between LLM graders and human graders"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string config_path, settings_csv, ttest_csv, only_items_csv;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file (flags override it)");
        sub->add_option("--items", cfg.items_path, "item file path");
        sub->add_option("--backend", cfg.backend_spec, "backend: base URL or mock:<fixture>");
        sub->add_option("--scorer", cfg.scorer_spec, "similarity scorer: jaccard or http:<url>");
        sub->add_option("--cache", cfg.cache_path, "response cache file (JSON lines)");
        sub->add_option("--seed", cfg.seed, "sampling seed");
        sub->add_option("--settings", settings_csv, "comma-separated setting slugs");
        sub->add_option("--n", cfg.sample_n, "evaluation sample size per item");
        sub->add_option("--max-graded", cfg.max_graded, "graded responses per prompt");
        sub->add_option("--model", cfg.params.model, "model name");
        sub->add_option("--out", cfg.run_dir, "run directory");
    };

    auto* gen = app.add_subcommand("gen-rubrics", "Generate analytic rubrics per setting");
    add_common(gen);
    auto* aln = app.add_subcommand("align", "Score generated rubrics against human rules");
    add_common(aln);
    auto* grd = app.add_subcommand("grade", "Run rubric-guided automatic scoring");
    add_common(grd);
    auto* sts = app.add_subcommand("stats", "Spearman and t-test analysis");
    add_common(sts);
    sts->add_option("--ttest", ttest_csv,
                    "t-test pairs as a:b slugs, comma-separated (default: fullshot vs "
                    "fullshot_holistic and fullshot vs fullshot_graded)");
    auto* ann = app.add_subcommand("annotate", "Annotate incorrect generated rules");
    add_common(ann);
    ann->add_option("--annotator", cfg.annotator, "annotator name recorded in the file");
    ann->add_option("--only-items", only_items_csv, "restrict to these item ids (csv)");
    auto* rep = app.add_subcommand("report", "Render table-style and JSON reports");
    add_common(rep);

    // Load --config first so flags parsed afterwards override file values
    // (CLI11 only assigns bound variables for options actually given).
    try {
        for (int i = 1; i + 1 < argc; ++i)
            if (std::string(argv[i]) == "--config") apply_config_file(cfg, argv[i + 1]);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (!settings_csv.empty()) cfg.settings = parse_settings_csv(settings_csv);

        if (gen->parsed()) return run_gen_rubrics(cfg);
        if (aln->parsed()) return run_align(cfg);
        if (grd->parsed()) return run_grade(cfg);
        if (sts->parsed()) {
            std::vector<std::pair<Setting, Setting>> pairs;
            if (!ttest_csv.empty()) {
                std::stringstream ss(ttest_csv);
                std::string token;
                while (std::getline(ss, token, ',')) {
                    auto colon = token.find(':');
                    if (colon == std::string::npos)
                        throw ConfigError("--ttest entries must look like a:b, got '" + token +
                                          "'");
                    pairs.emplace_back(setting_from_slug(token.substr(0, colon)),
                                       setting_from_slug(token.substr(colon + 1)));
                }
            } else {
                auto has = [&](Setting s) {
                    return std::find(cfg.settings.begin(), cfg.settings.end(), s) !=
                           cfg.settings.end();
                };
                if (has(Setting::Fullshot) && has(Setting::FullshotHolistic))
                    pairs.emplace_back(Setting::Fullshot, Setting::FullshotHolistic);
                if (has(Setting::Fullshot) && has(Setting::FullshotGraded))
                    pairs.emplace_back(Setting::Fullshot, Setting::FullshotGraded);
            }
            return run_stats(cfg, pairs);
        }
        if (ann->parsed()) {
            std::vector<std::string> only_items;
            std::stringstream ss(only_items_csv);
            std::string token;
            while (std::getline(ss, token, ','))
                if (!token.empty()) only_items.push_back(token);
            return run_annotate(cfg, std::cin, std::cout, only_items);
        }
        if (rep->parsed()) return run_report(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IntegrityError& e) {
        std::cerr << "integrity error: " << e.what() << "\n";
        return kExitIntegrity;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
