#include "graderalign/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "graderalign/digest.hpp"
#include "graderalign/error_atlas.hpp"
#include "graderalign/errors.hpp"
#include "graderalign/rng.hpp"

namespace graderalign {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct SettingInfo {
    Setting setting;
    const char* slug;
    const char* display;
    bool generates;
};

const SettingInfo kSettings[] = {
    {Setting::NoAr, "no_ar", "No A.R. (control)", false},
    {Setting::HumanAr, "human_ar", "Human A.R. (comparison)", false},
    {Setting::Oneshot, "oneshot", "One-shot A.R.", true},
    {Setting::Fullshot, "fullshot", "Full-shot A.R.", true},
    {Setting::FullshotHolistic, "fullshot_holistic", "Full-shot A.R. + Holistic Rubrics", true},
    {Setting::FullshotGraded, "fullshot_graded", "Full-shot A.R. + Graded Responses", true},
};

const SettingInfo& info(Setting s) { return kSettings[static_cast<int>(s)]; }

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s)
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    return out;
}

std::string fmt(double x, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, x);
    return buf;
}

std::unique_ptr<Backend> make_backend(const ExperimentConfig& cfg) {
    if (cfg.backend_spec.rfind("mock:", 0) == 0)
        return std::make_unique<MockBackend>(MockBackend::load(cfg.backend_spec.substr(5)));
    if (cfg.backend_spec.empty()) throw ConfigError("no backend configured (use --backend)");
    const char* key = std::getenv("GRADERALIGN_API_KEY");
    return std::make_unique<HttpBackend>(cfg.backend_spec, key ? key : "");
}

std::string cache_path(const ExperimentConfig& cfg) {
    return cfg.cache_path.empty() ? "cache.jsonl" : cfg.cache_path;
}

std::unique_ptr<SimilarityScorer> make_scorer(const ExperimentConfig& cfg) {
    if (cfg.scorer_spec == "jaccard") return std::make_unique<JaccardScorer>();
    if (cfg.scorer_spec.rfind("http:", 0) == 0) {
        const char* key = std::getenv("GRADERALIGN_SCORER_API_KEY");
        return std::make_unique<HttpSimilarityScorer>(cfg.scorer_spec.substr(5), key ? key : "");
    }
    throw ConfigError("unknown scorer spec '" + cfg.scorer_spec + "'");
}

void ensure_run_dirs(const ExperimentConfig& cfg) {
    for (const char* sub :
         {"rubrics", "alignment", "grading", "stats", "annotations", "report"})
        fs::create_directories(fs::path(cfg.run_dir) / sub);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IntegrityError("cannot write " + path.string());
    out << text;
}

json load_json(const fs::path& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw ConfigError(std::string(what) + " artifact missing: " + path.string());
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        throw IntegrityError(path.string() + ": " + e.what());
    }
}

fs::path alignment_path(const ExperimentConfig& cfg, const std::string& item_id, Setting s) {
    return fs::path(cfg.run_dir) / "alignment" /
           (sanitize(item_id) + "__" + info(s).slug + ".json");
}

fs::path grading_json_path(const ExperimentConfig& cfg, const std::string& item_id, Setting s) {
    return fs::path(cfg.run_dir) / "grading" /
           (sanitize(item_id) + "__" + info(s).slug + ".json");
}

fs::path grading_jsonl_path(const ExperimentConfig& cfg, const std::string& item_id, Setting s) {
    return fs::path(cfg.run_dir) / "grading" /
           (sanitize(item_id) + "__" + info(s).slug + ".jsonl");
}

fs::path annotations_path(const ExperimentConfig& cfg) {
    return fs::path(cfg.run_dir) / "annotations" / "annotations.jsonl";
}

json provenance(const ExperimentConfig& cfg) {
    json prov;
    json cfg_canon;
    cfg_canon["items"] = cfg.items_path;
    cfg_canon["backend"] = cfg.backend_spec;
    cfg_canon["scorer"] = cfg.scorer_spec;
    cfg_canon["seed"] = cfg.seed;
    cfg_canon["n"] = cfg.sample_n;
    cfg_canon["max_graded"] = cfg.max_graded;
    cfg_canon["tau_precision"] = cfg.align_cfg.tau_precision;
    cfg_canon["tau_recall"] = cfg.align_cfg.tau_recall;
    cfg_canon["model"] = cfg.params.model;
    cfg_canon["temperature"] = cfg.params.temperature;
    cfg_canon["top_p"] = cfg.params.top_p;
    cfg_canon["max_tokens"] = cfg.params.max_tokens;
    json slugs = json::array();
    for (auto s : cfg.settings) slugs.push_back(setting_slug(s));
    cfg_canon["settings"] = slugs;
    prov["config_digest"] = sha256_hex(cfg_canon.dump());
    prov["config"] = cfg_canon;
    prov["items_digest"] = sha256_file(cfg.items_path);
    if (cfg.backend_spec.rfind("mock:", 0) == 0)
        prov["fixture_digest"] = sha256_file(cfg.backend_spec.substr(5));
    return prov;
}

}  // namespace

std::string setting_slug(Setting s) { return info(s).slug; }
std::string setting_display(Setting s) { return info(s).display; }
bool setting_generates(Setting s) { return info(s).generates; }

Setting setting_from_slug(const std::string& slug) {
    for (const auto& si : kSettings)
        if (slug == si.slug) return si.setting;
    throw ConfigError("unknown setting '" + slug + "'");
}

void ExperimentConfig::validate() const {
    if (items_path.empty()) throw ConfigError("no items file configured (use --items)");
    if (settings.empty()) throw ConfigError("settings list must be non-empty");
    if (sample_n < 1) throw ConfigError("sample size n must be >= 1");
    if (max_graded < 1) throw ConfigError("max_graded must be >= 1");
    align_cfg.validate();
    params.validate();
}

GenerationSetting generation_setting(Setting s, const ExperimentConfig& cfg) {
    GenerationSetting gs;
    gs.max_graded = cfg.max_graded;
    gs.seed = cfg.seed;
    switch (s) {
        case Setting::Oneshot: gs.in_context = InContext::Oneshot; break;
        case Setting::Fullshot: gs.in_context = InContext::Fullshot; break;
        case Setting::FullshotHolistic:
            gs.in_context = InContext::Fullshot;
            gs.include_holistic = true;
            break;
        case Setting::FullshotGraded:
            gs.in_context = InContext::Fullshot;
            gs.include_graded_responses = true;
            break;
        default:
            throw ConfigError("setting '" + setting_slug(s) + "' does not generate rubrics");
    }
    return gs;
}

std::vector<AssessmentItem> example_items_for(const std::vector<AssessmentItem>& items,
                                              std::size_t target_index, Setting s,
                                              std::uint64_t seed) {
    std::vector<AssessmentItem> others;
    for (std::size_t i = 0; i < items.size(); ++i)
        if (i != target_index) others.push_back(items[i]);

    if (s == Setting::Oneshot) {
        if (others.empty())
            throw ConfigError("oneshot needs at least one other item with a human rubric");
        Rng rng(seed ^ fnv1a(items[target_index].id) ^ 0x6f6e65ULL);
        return {others[rng.below(others.size())]};
    }
    return others;  // fullshot: all other items in file order
}

ChatTranscript generation_transcript(const std::vector<AssessmentItem>& items,
                                     std::size_t target_index, Setting s,
                                     const ExperimentConfig& cfg) {
    const auto& item = items[target_index];
    const auto gs = generation_setting(s, cfg);
    const auto examples = example_items_for(items, target_index, s, cfg.seed);

    std::optional<std::vector<StudentResponse>> target_graded;
    if (gs.include_graded_responses) {
        const auto eval = sample_balanced(item, cfg.sample_n, cfg.seed);
        std::set<std::string> exclude;
        for (const auto& r : eval.responses) exclude.insert(r.id);
        target_graded = select_graded_examples(item, cfg.max_graded, cfg.seed, exclude);
    }
    return render_rubric_prompt(item, gs, examples, target_graded);
}

RubricVariant grading_variant(Setting s, const AssessmentItem& item,
                              const GeneratedRubric* rubric) {
    switch (s) {
        case Setting::NoAr: return {RubricKind::None, ""};
        case Setting::HumanAr:
            return {RubricKind::HumanAnalytic, join_rules(item.analytic_rubric)};
        default: break;
    }
    if (!rubric) throw ConfigError("grading setting '" + setting_slug(s) + "' needs a rubric");
    std::vector<std::string> texts;
    for (const auto& r : rubric->rules) texts.push_back(r.text);
    // An empty generated rubric grades with no rubric slot, like the control row.
    if (texts.empty()) return {RubricKind::None, ""};
    return {RubricKind::GeneratedAnalytic, join_rules(texts)};
}

GradingPlan grading_plan(const AssessmentItem& item, const ExperimentConfig& cfg) {
    GradingPlan plan;
    plan.sample = sample_balanced(item, cfg.sample_n, cfg.seed);
    std::set<std::string> exclude;
    for (const auto& r : plan.sample.responses) exclude.insert(r.id);
    const auto picks = select_graded_examples(item, 1, cfg.seed ^ 0x6578ULL, exclude);
    if (!picks.empty()) plan.example = {picks.front(), picks.front().gold_label};
    return plan;
}

std::string rubric_artifact_path(const ExperimentConfig& cfg, const std::string& item_id,
                                 Setting s) {
    return (fs::path(cfg.run_dir) / "rubrics" /
            (sanitize(item_id) + "__" + info(s).slug + ".json"))
        .string();
}

void save_rubric(const ExperimentConfig& cfg, const GeneratedRubric& rubric) {
    json j;
    j["item_id"] = rubric.item_id;
    j["setting"] = rubric.setting_label;
    j["raw"] = rubric.raw;
    j["rules"] = json::array();
    for (const auto& r : rubric.rules) j["rules"].push_back({{"text", r.text}, {"index", r.index}});
    write_text(rubric_artifact_path(cfg, rubric.item_id, setting_from_slug(rubric.setting_label)),
               j.dump(2) + "\n");
}

GeneratedRubric load_rubric(const ExperimentConfig& cfg, const std::string& item_id, Setting s) {
    auto j = load_json(rubric_artifact_path(cfg, item_id, s), "rubric");
    GeneratedRubric rubric;
    rubric.item_id = j.at("item_id").get<std::string>();
    rubric.setting_label = j.at("setting").get<std::string>();
    rubric.raw = j.at("raw").get<std::string>();
    for (const auto& rj : j.at("rules"))
        rubric.rules.push_back({rj.at("text").get<std::string>(), rj.at("index").get<int>()});
    return rubric;
}

void save_alignment(const ExperimentConfig& cfg, const std::string& item_id, Setting s,
                    const AlignmentReport& report) {
    json j;
    j["item_id"] = item_id;
    j["setting"] = info(s).slug;
    j["precision"] = report.precision;
    j["recall"] = report.recall;
    j["f1"] = report.f1;
    j["rule_count"] = report.rule_count;
    auto dump_evidence = [](const std::vector<MatchEvidence>& evs) {
        json arr = json::array();
        for (const auto& ev : evs)
            arr.push_back({{"rule_index", ev.rule_index},
                           {"partner_index", ev.partner_index},
                           {"score", ev.score}});
        return arr;
    };
    j["matches"] = dump_evidence(report.matches);
    j["recalled"] = dump_evidence(report.recalled);
    write_text(alignment_path(cfg, item_id, s), j.dump(2) + "\n");
}

AlignmentReport load_alignment(const ExperimentConfig& cfg, const std::string& item_id,
                               Setting s) {
    auto j = load_json(alignment_path(cfg, item_id, s), "alignment");
    AlignmentReport report;
    report.precision = j.at("precision").get<double>();
    report.recall = j.at("recall").get<double>();
    report.f1 = j.at("f1").get<double>();
    report.rule_count = j.at("rule_count").get<int>();
    auto read_evidence = [](const json& arr) {
        std::vector<MatchEvidence> evs;
        for (const auto& ej : arr)
            evs.push_back({ej.at("rule_index").get<int>(), ej.at("partner_index").get<int>(),
                           ej.at("score").get<double>()});
        return evs;
    };
    report.matches = read_evidence(j.at("matches"));
    report.recalled = read_evidence(j.at("recalled"));
    return report;
}

void save_grading(const ExperimentConfig& cfg, Setting s, const GradingReport& report) {
    std::string lines;
    for (const auto& o : report.outcomes) {
        json j;
        j["response_id"] = o.response_id;
        j["raw_completion"] = o.raw_completion;
        if (o.predicted) j["predicted"] = o.predicted->name;
        j["parse_status"] = parse_status_name(o.parse_status);
        j["correct"] = o.correct;
        lines += j.dump() + "\n";
    }
    write_text(grading_jsonl_path(cfg, report.item_id, s), lines);

    json j;
    j["item_id"] = report.item_id;
    j["setting"] = info(s).slug;
    j["variant_kind"] = report.variant_kind;
    j["accuracy"] = report.accuracy;
    j["confusion"] = report.confusion;
    write_text(grading_json_path(cfg, report.item_id, s), j.dump(2) + "\n");
}

GradingReport load_grading(const ExperimentConfig& cfg, const std::string& item_id, Setting s,
                           const AssessmentItem& item) {
    auto j = load_json(grading_json_path(cfg, item_id, s), "grading");
    GradingReport report;
    report.item_id = j.at("item_id").get<std::string>();
    report.variant_kind = j.at("variant_kind").get<std::string>();
    report.accuracy = j.at("accuracy").get<double>();
    report.confusion = j.at("confusion").get<std::vector<std::vector<int>>>();

    std::ifstream in(grading_jsonl_path(cfg, item_id, s));
    if (!in)
        throw ConfigError("grading outcomes missing: " +
                          grading_jsonl_path(cfg, item_id, s).string());
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto oj = json::parse(line);
        GradingOutcome o;
        o.response_id = oj.at("response_id").get<std::string>();
        o.raw_completion = oj.at("raw_completion").get<std::string>();
        if (oj.contains("predicted")) o.predicted = item.find_label(oj["predicted"]);
        auto status = oj.at("parse_status").get<std::string>();
        o.parse_status = status == "parsed"        ? ParseStatus::Parsed
                         : status == "unknown_label" ? ParseStatus::UnknownLabel
                                                     : ParseStatus::MissingRating;
        o.correct = oj.at("correct").get<bool>();
        report.outcomes.push_back(std::move(o));
    }
    return report;
}

void write_manifest(const ExperimentConfig& cfg) {
    std::map<std::string, std::string> digests;
    const fs::path root(cfg.run_dir);
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        const auto rel = fs::relative(entry.path(), root).generic_string();
        const auto name = entry.path().filename().string();
        if (rel == "manifest.json" || name == "run.log" || name == "cache.jsonl") continue;
        digests[rel] = sha256_file(entry.path().string());
    }
    json j;
    j["files"] = json::object();
    for (const auto& [rel, digest] : digests) j["files"][rel] = digest;
    write_text(root / "manifest.json", j.dump(2) + "\n");
}

int run_gen_rubrics(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto items = load_items(cfg.items_path);
    ensure_run_dirs(cfg);

    const bool needs_backend = std::any_of(cfg.settings.begin(), cfg.settings.end(),
                                           [](Setting s) { return setting_generates(s); });
    std::unique_ptr<Backend> backend;
    std::unique_ptr<ResponseCache> cache;
    if (needs_backend) {
        backend = make_backend(cfg);
        cache = std::make_unique<ResponseCache>(cache_path(cfg));
    }

    json failures = json::array();
    for (Setting s : cfg.settings) {
        for (std::size_t i = 0; i < items.size(); ++i) {
            const auto& item = items[i];
            GeneratedRubric rubric;
            rubric.item_id = item.id;
            rubric.setting_label = setting_slug(s);
            try {
                if (s == Setting::NoAr) {
                    // control row: no rubric generated
                } else if (s == Setting::HumanAr) {
                    rubric.raw = join_rules(item.analytic_rubric);
                    rubric.rules = parse_rules(rubric.raw);
                } else {
                    const auto transcript = generation_transcript(items, i, s, cfg);
                    rubric.raw = cached_complete(*cache, *backend, transcript, cfg.params);
                    rubric.rules = parse_rules(rubric.raw);
                }
                save_rubric(cfg, rubric);
            } catch (const std::exception& e) {
                failures.push_back(
                    {{"item_id", item.id}, {"setting", setting_slug(s)}, {"error", e.what()}});
                std::cerr << "gen-rubrics: " << item.id << "/" << setting_slug(s) << ": "
                          << e.what() << "\n";
            }
        }
    }
    if (!failures.empty())
        write_text(fs::path(cfg.run_dir) / "rubrics" / "failures.json",
                   failures.dump(2) + "\n");
    write_manifest(cfg);
    return failures.empty() ? kExitOk : kExitPartial;
}

int run_align(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto items = load_items(cfg.items_path);
    ensure_run_dirs(cfg);
    auto scorer = make_scorer(cfg);

    for (Setting s : cfg.settings) {
        for (const auto& item : items) {
            const auto rubric = load_rubric(cfg, item.id, s);
            const auto report = align(rubric, item, *scorer, cfg.align_cfg);
            save_alignment(cfg, item.id, s, report);
        }
    }
    write_manifest(cfg);
    return kExitOk;
}

int run_grade(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto items = load_items(cfg.items_path);
    ensure_run_dirs(cfg);
    auto backend = make_backend(cfg);
    ResponseCache cache(cache_path(cfg));

    bool partial = false;
    for (Setting s : cfg.settings) {
        for (const auto& item : items) {
            try {
                const GeneratedRubric* rubric_ptr = nullptr;
                GeneratedRubric rubric;
                if (setting_generates(s)) {
                    rubric = load_rubric(cfg, item.id, s);
                    rubric_ptr = &rubric;
                }
                const auto variant = grading_variant(s, item, rubric_ptr);
                const auto plan = grading_plan(item, cfg);
                const auto report =
                    grade_item(item, variant, plan.sample, *backend, cache, cfg.params,
                               plan.example);
                save_grading(cfg, s, report);
            } catch (const std::exception& e) {
                partial = true;
                std::cerr << "grade: " << item.id << "/" << setting_slug(s) << ": " << e.what()
                          << "\n";
            }
        }
    }
    write_manifest(cfg);
    return partial ? kExitPartial : kExitOk;
}

int run_stats(const ExperimentConfig& cfg,
              const std::vector<std::pair<Setting, Setting>>& ttest_pairs) {
    cfg.validate();
    const auto items = load_items(cfg.items_path);
    ensure_run_dirs(cfg);

    // Per-setting vectors in item order.
    std::map<std::string, std::vector<double>> f1_by_setting;
    std::map<std::string, std::vector<double>> acc_by_setting;
    for (Setting s : cfg.settings) {
        for (const auto& item : items) {
            f1_by_setting[setting_slug(s)].push_back(load_alignment(cfg, item.id, s).f1);
            acc_by_setting[setting_slug(s)].push_back(
                load_grading(cfg, item.id, s, item).accuracy * 100.0);
        }
    }

    std::vector<double> mean_f1, mean_acc;
    json spearman_inputs = json::array();
    for (Setting s : cfg.settings) {
        const auto slug = setting_slug(s);
        const double f = mean_std(f1_by_setting[slug]).mean;
        const double a = mean_std(acc_by_setting[slug]).mean;
        mean_f1.push_back(f);
        mean_acc.push_back(a);
        spearman_inputs.push_back({{"setting", slug}, {"mean_f1", f}, {"mean_acc", a}});
    }
    if (mean_f1.size() < 3)
        throw ConfigError("stats: Spearman needs at least 3 settings, got " +
                          std::to_string(mean_f1.size()));
    const auto sp = spearman(mean_f1, mean_acc);

    json j;
    j["spearman"] = {{"rho", sp.rho}, {"p_value", sp.p_value}, {"n", sp.n},
                     {"inputs", spearman_inputs}};
    j["t_tests"] = json::array();
    for (const auto& [sa, sb] : ttest_pairs) {
        const auto res =
            paired_t_test(f1_by_setting[setting_slug(sa)], f1_by_setting[setting_slug(sb)]);
        j["t_tests"].push_back({{"a", setting_slug(sa)},
                                {"b", setting_slug(sb)},
                                {"metric", "f1"},
                                {"t", res.degenerate ? json("inf") : json(res.t)},
                                {"df", res.df},
                                {"p_two_tailed", res.p_two_tailed},
                                {"alpha", res.alpha},
                                {"reject", res.reject_at_alpha},
                                {"degenerate", res.degenerate},
                                {"inputs_a", f1_by_setting[setting_slug(sa)]},
                                {"inputs_b", f1_by_setting[setting_slug(sb)]}});
    }
    write_text(fs::path(cfg.run_dir) / "stats" / "stats.json", j.dump(2) + "\n");
    write_manifest(cfg);
    return kExitOk;
}

int run_annotate(const ExperimentConfig& cfg, std::istream& in, std::ostream& out,
                 const std::vector<std::string>& only_items) {
    cfg.validate();
    const auto items = load_items(cfg.items_path);
    ensure_run_dirs(cfg);

    std::vector<std::pair<std::string, std::string>> keys;
    std::vector<AlignmentReport> reports;
    std::vector<GeneratedRubric> rubrics;
    for (Setting s : cfg.settings) {
        if (!setting_generates(s)) continue;  // only LLM rubrics carry errors worth annotating
        for (const auto& item : items) {
            if (!only_items.empty() &&
                std::find(only_items.begin(), only_items.end(), item.id) == only_items.end())
                continue;
            keys.emplace_back(item.id, setting_slug(s));
            reports.push_back(load_alignment(cfg, item.id, s));
            rubrics.push_back(load_rubric(cfg, item.id, s));
        }
    }
    const auto queue =
        collect_incorrect_rules(keys, reports, rubrics, cfg.align_cfg.tau_precision);
    const auto existing = load_annotations(annotations_path(cfg).string());
    const auto fresh = annotate(queue, existing, in, out, cfg.annotator);
    append_annotations(annotations_path(cfg).string(), fresh);
    out << "\nAnnotated " << fresh.size() << " rule(s); " << existing.size()
        << " already present.\n";
    write_manifest(cfg);
    return kExitOk;
}

int run_report(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto items = load_items(cfg.items_path);
    ensure_run_dirs(cfg);

    json per_item = json::array();
    json summary = json::object();
    std::string table;
    table += "| Settings | #Rules | Pre. | Rec. | F1 | Acc. (%) |\n";
    table += "|---|---|---|---|---|---|\n";

    bool any = false;
    for (Setting s : cfg.settings) {
        std::vector<double> rules, pre, rec, f1s, accs;
        for (const auto& item : items) {
            const auto a = load_alignment(cfg, item.id, s);
            const auto g = load_grading(cfg, item.id, s, item);
            rules.push_back(a.rule_count);
            pre.push_back(a.precision);
            rec.push_back(a.recall);
            f1s.push_back(a.f1);
            accs.push_back(g.accuracy * 100.0);
            per_item.push_back({{"item_id", item.id},
                                {"setting", setting_slug(s)},
                                {"rule_count", a.rule_count},
                                {"precision", a.precision},
                                {"recall", a.recall},
                                {"f1", a.f1},
                                {"accuracy_percent", g.accuracy * 100.0}});
            any = true;
        }
        const auto st_rules = mean_std(rules), st_pre = mean_std(pre), st_rec = mean_std(rec),
                   st_f1 = mean_std(f1s), st_acc = mean_std(accs);
        auto cell = [](const SummaryStat& st, int mean_dec) {
            return fmt(st.mean, mean_dec) + "±" + fmt(st.std, 2);
        };
        table += "| " + setting_display(s) + " | " + cell(st_rules, 2) + " | " +
                 cell(st_pre, 3) + " | " + cell(st_rec, 3) + " | " + cell(st_f1, 3) + " | " +
                 cell(st_acc, 2) + " |\n";
        auto stat_json = [](const SummaryStat& st) {
            return json{{"mean", st.mean}, {"std", st.std}, {"n", st.n}};
        };
        summary[setting_slug(s)] = {{"rules", stat_json(st_rules)},
                                    {"precision", stat_json(st_pre)},
                                    {"recall", stat_json(st_rec)},
                                    {"f1", stat_json(st_f1)},
                                    {"accuracy_percent", stat_json(st_acc)}};
    }
    if (!any) throw ConfigError("report: no artifacts found in " + cfg.run_dir);

    std::string md;
    md += "# Run Report\n\n";
    md += "## Analytic Rubric Generation and Grading\n\n";
    md += table;

    json report;
    report["per_item"] = per_item;
    report["summary"] = summary;

    const auto stats_path = fs::path(cfg.run_dir) / "stats" / "stats.json";
    if (fs::exists(stats_path)) {
        const auto stats = load_json(stats_path, "stats");
        report["stats"] = stats;
        md += "\n## Statistics\n\n";
        const auto& sp = stats.at("spearman");
        md += "- Spearman rank correlation (mean F1 vs mean Acc.): rho = " +
              fmt(sp.at("rho").get<double>(), 4) +
              ", p = " + fmt(sp.at("p_value").get<double>(), 4) +
              " (n = " + std::to_string(sp.at("n").get<int>()) + ")\n";
        for (const auto& tt : stats.at("t_tests")) {
            md += "- Paired t-test (F1, " + tt.at("a").get<std::string>() + " vs " +
                  tt.at("b").get<std::string>() + "): p = " +
                  fmt(tt.at("p_two_tailed").get<double>(), 4) +
                  (tt.at("reject").get<bool>() ? " (reject at alpha=" : " (keep at alpha=") +
                  fmt(tt.at("alpha").get<double>(), 2) + ")" +
                  (tt.at("degenerate").get<bool>() ? " [degenerate: zero-variance differences]"
                                                   : "") +
                  "\n";
        }
    }

    const auto annotations = load_annotations(annotations_path(cfg).string());
    if (!annotations.empty()) {
        md += "\n## Error Causes\n\n";
        md += "| Setting |";
        for (int c = 0; c < kCauseCount; ++c)
            md += " " + cause_name(static_cast<ErrorCause>(c)) + " (%) |";
        md += "\n|---|---|---|---|---|\n";
        json causes = json::object();
        std::set<std::string> labels;
        for (const auto& a : annotations) labels.insert(a.setting_label);
        for (const auto& label : labels) {
            const auto dist = cause_proportions(annotations, label);
            md += "| " + label + " |";
            json row = json::object();
            for (int c = 0; c < kCauseCount; ++c) {
                md += " " + fmt(dist.percentages[c], 2) + " |";
                row[cause_name(static_cast<ErrorCause>(c))] = dist.percentages[c];
            }
            md += "\n";
            causes[label] = {{"total", dist.total}, {"percentages", row}};
        }
        report["cause_proportions"] = causes;
    }

    report["provenance"] = provenance(cfg);
    md += "\n## Provenance\n\n";
    md += "- config digest: " + report["provenance"]["config_digest"].get<std::string>() + "\n";
    md += "- items digest: " + report["provenance"]["items_digest"].get<std::string>() + "\n";
    if (report["provenance"].contains("fixture_digest"))
        md += "- fixture digest: " +
              report["provenance"]["fixture_digest"].get<std::string>() + "\n";

    write_text(fs::path(cfg.run_dir) / "report" / "report.md", md);
    write_text(fs::path(cfg.run_dir) / "report" / "report.json", report.dump(2) + "\n");
    write_manifest(cfg);
    return kExitOk;
}

}  // namespace graderalign
