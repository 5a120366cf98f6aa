#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "graderalign/errors.hpp"
#include "graderalign/error_atlas.hpp"

using namespace graderalign;

namespace {

GeneratedRubric rubric_of(const std::string& item, const std::string& setting,
                          const std::vector<std::string>& texts) {
    GeneratedRubric r;
    r.item_id = item;
    r.setting_label = setting;
    for (const auto& t : texts) r.rules.push_back({t, static_cast<int>(r.rules.size())});
    return r;
}

AlignmentReport report_with_scores(const std::vector<double>& scores) {
    AlignmentReport rep;
    rep.rule_count = static_cast<int>(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
        rep.matches.push_back({static_cast<int>(i), 0, scores[i]});
    return rep;
}

std::vector<Annotation> make_annotations(const std::string& setting,
                                         const std::array<int, kCauseCount>& counts) {
    std::vector<Annotation> out;
    int idx = 0;
    for (int c = 0; c < kCauseCount; ++c)
        for (int i = 0; i < counts[c]; ++i) {
            Annotation a;
            a.item_id = "item" + std::to_string(idx % 3);
            a.setting_label = setting;
            a.rule_index = idx++;
            a.rule_text = "rule";
            a.cause = static_cast<ErrorCause>(c);
            out.push_back(a);
        }
    return out;
}

std::string temp_path(const std::string& stem) {
    const auto path = "/tmp/test_error_atlas_" + stem;
    std::remove(path.c_str());
    return path;
}

}  // namespace

TEST_CASE("cause names round-trip") {
    CHECK(cause_name(ErrorCause::InappropriateExpression) == "Inappropriate Expression");
    CHECK(cause_name(ErrorCause::IncorrectLogicChain) == "Incorrect Logic Chain");
    CHECK(cause_name(ErrorCause::IncorrectLogicObject) == "Incorrect Logic Object");
    CHECK(cause_name(ErrorCause::NoLogicChain) == "No Logic Chain");
    for (int i = 0; i < kCauseCount; ++i) {
        const auto cause = static_cast<ErrorCause>(i);
        CHECK(cause_from_name(cause_name(cause)) == cause);
    }
    CHECK_THROWS_AS(cause_from_name("Mystery"), ParseError);
}

TEST_CASE("collect_incorrect_rules keeps only below-threshold matches, in order") {
    const std::vector<std::pair<std::string, std::string>> keys = {
        {"b_item", "oneshot"}, {"a_item", "oneshot"}};
    const std::vector<AlignmentReport> reports = {report_with_scores({0.9, 0.2, 0.4}),
                                                  report_with_scores({0.1, 0.8})};
    const std::vector<GeneratedRubric> rubrics = {
        rubric_of("b_item", "oneshot", {"b0", "b1", "b2"}),
        rubric_of("a_item", "oneshot", {"a0", "a1"})};

    const auto queue = collect_incorrect_rules(keys, reports, rubrics, 0.5);
    REQUIRE(queue.size() == 3);
    CHECK(queue[0].item_id == "a_item");
    CHECK(queue[0].rule_index == 0);
    CHECK(queue[0].rule_text == "a0");
    CHECK(queue[1].item_id == "b_item");
    CHECK(queue[1].rule_index == 1);
    CHECK(queue[2].item_id == "b_item");
    CHECK(queue[2].rule_index == 2);
    CHECK(queue[1].best_score == 0.2);

    SUBCASE("duplicate keys rejected") {
        auto dup_keys = keys;
        dup_keys[1] = keys[0];
        auto dup_rubrics = rubrics;
        dup_rubrics[1] = rubrics[0];
        CHECK_THROWS_AS(collect_incorrect_rules(dup_keys, reports, dup_rubrics, 0.5),
                        ValidationError);
    }
    SUBCASE("mismatched rubric keys rejected") {
        auto bad = rubrics;
        bad[0].item_id = "zzz";
        CHECK_THROWS_AS(collect_incorrect_rules(keys, reports, bad, 0.5), ValidationError);
    }
    SUBCASE("length mismatch rejected") {
        CHECK_THROWS_AS(collect_incorrect_rules(keys, {reports[0]}, rubrics, 0.5),
                        ValidationError);
    }
}

TEST_CASE("interactive annotation handles invalid input and resume") {
    std::vector<QueueEntry> queue = {{"item1", "oneshot", 0, "rule zero", 0.1},
                                     {"item1", "oneshot", 2, "rule two", 0.3},
                                     {"item2", "oneshot", 1, "rule one", 0.2}};

    SUBCASE("invalid selections re-prompt until valid") {
        std::istringstream in("9\nbanana\n\n2\n1\n4\n");
        std::ostringstream out;
        const auto fresh = annotate(queue, {}, in, out, "tester");
        REQUIRE(fresh.size() == 3);
        CHECK(fresh[0].cause == ErrorCause::IncorrectLogicChain);
        CHECK(fresh[1].cause == ErrorCause::InappropriateExpression);
        CHECK(fresh[2].cause == ErrorCause::NoLogicChain);
        CHECK(fresh[0].annotator == "tester");
        CHECK(fresh[0].rule_text == "rule zero");
        CHECK(out.str().find("Invalid selection.") != std::string::npos);
        CHECK(out.str().find("rule two") != std::string::npos);
    }
    SUBCASE("already-annotated entries are skipped") {
        Annotation done;
        done.item_id = "item1";
        done.setting_label = "oneshot";
        done.rule_index = 0;
        done.cause = ErrorCause::NoLogicChain;
        std::istringstream in("1\n2\n");
        std::ostringstream out;
        const auto fresh = annotate(queue, {done}, in, out, "tester");
        REQUIRE(fresh.size() == 2);
        CHECK(fresh[0].rule_index == 2);
        CHECK(fresh[1].item_id == "item2");
    }
    SUBCASE("channel closing mid-session is an error") {
        std::istringstream in("1\n");
        std::ostringstream out;
        CHECK_THROWS_AS(annotate(queue, {}, in, out, "tester"), ValidationError);
    }
    SUBCASE("empty queue needs no input") {
        std::istringstream in("");
        std::ostringstream out;
        CHECK(annotate({}, {}, in, out, "tester").empty());
    }
}

TEST_CASE("cause proportions reproduce the reported distributions") {
    SUBCASE("(4,1,2,2) of 9") {
        const auto dist = cause_proportions(make_annotations("oneshot", {4, 1, 2, 2}),
                                            "oneshot");
        CHECK(dist.total == 9);
        CHECK(dist.percentages[0] == doctest::Approx(44.44).epsilon(1e-9));
        CHECK(dist.percentages[1] == doctest::Approx(11.11).epsilon(1e-9));
        CHECK(dist.percentages[2] == doctest::Approx(22.22).epsilon(1e-9));
        CHECK(dist.percentages[3] == doctest::Approx(22.22).epsilon(1e-9));
    }
    SUBCASE("(3,3,0,7) of 13") {
        const auto dist = cause_proportions(make_annotations("fullshot", {3, 3, 0, 7}),
                                            "fullshot");
        CHECK(dist.total == 13);
        CHECK(dist.percentages[0] == doctest::Approx(23.08).epsilon(1e-9));
        CHECK(dist.percentages[1] == doctest::Approx(23.08).epsilon(1e-9));
        CHECK(dist.percentages[2] == 0.0);
        CHECK(dist.percentages[3] == doctest::Approx(53.85).epsilon(1e-9));
    }
    SUBCASE("settings are tallied independently") {
        auto all = make_annotations("oneshot", {2, 0, 0, 0});
        const auto other = make_annotations("fullshot", {0, 0, 0, 5});
        all.insert(all.end(), other.begin(), other.end());
        CHECK(cause_proportions(all, "oneshot").total == 2);
        CHECK(cause_proportions(all, "fullshot").total == 5);
        CHECK_THROWS_AS(cause_proportions(all, "no_ar"), std::invalid_argument);
    }
}

TEST_CASE("annotation persistence is append-only and idempotent") {
    const auto path = temp_path("annotations.jsonl");
    const auto first = make_annotations("oneshot", {1, 1, 0, 0});
    append_annotations(path, first);
    CHECK(load_annotations(path).size() == 2);

    // Re-appending the same records changes nothing.
    append_annotations(path, first);
    CHECK(load_annotations(path).size() == 2);

    auto more = make_annotations("oneshot", {0, 0, 1, 0});
    more[0].rule_index = 99;
    append_annotations(path, more);
    const auto all = load_annotations(path);
    CHECK(all.size() == 3);
    for (const auto& a : all) CHECK(a.setting_label == "oneshot");

    SUBCASE("missing file loads as empty") {
        CHECK(load_annotations("/tmp/never_written.jsonl").empty());
    }
    SUBCASE("corrupt line is an integrity error") {
        std::ofstream(path, std::ios::app) << "garbage line\n";
        CHECK_THROWS_AS(load_annotations(path), IntegrityError);
    }
}
