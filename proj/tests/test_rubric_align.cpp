#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "graderalign/errors.hpp"
#include "graderalign/item_model.hpp"
#include "graderalign/rubric_align.hpp"
#include "support/oracles.hpp"

using namespace graderalign;

namespace {

std::vector<Rule> rules_of(const std::vector<std::string>& texts) {
    std::vector<Rule> out;
    for (const auto& t : texts) out.push_back({t, static_cast<int>(out.size())});
    return out;
}

AssessmentItem item_with_rubric(const std::vector<std::string>& analytic) {
    AssessmentItem item;
    item.id = "x";
    item.task_description = "t";
    item.labels = {{"Beginning", 0}, {"Proficient", 1}};
    item.holistic_rubric = {{"Beginning", "b"}, {"Proficient", "p"}};
    item.analytic_rubric = analytic;
    return item;
}

// Word-bag sentences drawn from a tiny vocabulary so random pairs land on
// both sides of the thresholds.
std::string random_sentence(std::mt19937& gen) {
    static const std::vector<std::string> vocab = {
        "water", "particles", "move", "faster", "slower", "thermal", "energy",
        "model",  "dye",       "cold", "hot",    "dish",   "motion",  "identify"};
    std::uniform_int_distribution<int> len(1, 8), pick(0, int(vocab.size()) - 1);
    std::string s;
    const int n = len(gen);
    for (int i = 0; i < n; ++i) {
        if (!s.empty()) s += " ";
        s += vocab[pick(gen)];
    }
    return s;
}

}  // namespace

TEST_CASE("parse_rules separator and fallbacks") {
    SUBCASE("triple-pipe separator") {
        const auto rules = parse_rules("a ||| b|||c ||| ");
        REQUIRE(rules.size() == 3);
        CHECK(rules[0].text == "a");
        CHECK(rules[1].text == "b");
        CHECK(rules[2].text == "c");
        CHECK(rules[0].index == 0);
        CHECK(rules[2].index == 2);
    }
    SUBCASE("bullet-line fallback") {
        const auto rules = parse_rules("Here is the rubric:\n- first rule\n* second rule\n"
                                       "1. third rule\n2) fourth rule\n");
        REQUIRE(rules.size() == 4);
        CHECK(rules[0].text == "first rule");
        CHECK(rules[1].text == "second rule");
        CHECK(rules[2].text == "third rule");
        CHECK(rules[3].text == "fourth rule");
    }
    SUBCASE("whole text as last resort") {
        const auto rules = parse_rules("One long rule with no structure at all.");
        REQUIRE(rules.size() == 1);
        CHECK(rules[0].text == "One long rule with no structure at all.");
    }
    SUBCASE("empty and whitespace input") {
        CHECK(parse_rules("").empty());
        CHECK(parse_rules("   \n  ").empty());
        CHECK(parse_rules("||| |||").empty());
    }
}

TEST_CASE("jaccard scorer") {
    JaccardScorer scorer;
    CHECK(scorer.score("", "") == 1.0);
    CHECK(scorer.score("word", "") == 0.0);
    CHECK(scorer.score("abc", "abc") == 1.0);
    CHECK(scorer.score("Water particles MOVE.", "water particles move") == 1.0);
    // 5 shared words, 7 in the union.
    CHECK(scorer.score("the water particles move fast here",
                       "the water particles move fast there") == doctest::Approx(5.0 / 7.0));
    // Symmetry on arbitrary pairs.
    std::mt19937 gen(11);
    for (int i = 0; i < 200; ++i) {
        const auto a = random_sentence(gen), b = random_sentence(gen);
        CHECK(scorer.score(a, b) == scorer.score(b, a));
    }
}

TEST_CASE("threshold asymmetry: one rule can count for precision but not recall") {
    JaccardScorer scorer;
    AlignmentConfig cfg;  // 0.5 / 0.6
    const auto gen = rules_of({"alpha beta gamma delta"});
    const auto human = rules_of({"alpha beta gamma epsilon zeta"});
    // Jaccard 3/6 = 0.5 sits exactly between the two thresholds.
    const double s = scorer.score(gen[0].text, human[0].text);
    CHECK(s == doctest::Approx(0.5));
    CHECK(precision(gen, human, scorer, cfg) == 1.0);
    CHECK(recall(gen, human, scorer, cfg) == 0.0);
}

TEST_CASE("precision/recall/f1 edge behavior") {
    JaccardScorer scorer;
    AlignmentConfig cfg;
    const auto human = rules_of({"water particles move faster"});

    CHECK_THROWS_AS(precision({}, human, scorer, cfg), std::invalid_argument);
    CHECK(recall({}, human, scorer, cfg) == 0.0);
    CHECK_THROWS_AS(recall(rules_of({"x"}), {}, scorer, cfg), ConfigError);

    CHECK(f1(0, 0) == 0.0);
    CHECK(f1(1, 1) == 1.0);
    CHECK(f1(0.5, 0.7) == doctest::Approx(2 * 0.5 * 0.7 / 1.2));
    CHECK_THROWS_AS(f1(-0.1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(f1(0.5, 1.1), std::invalid_argument);

    AlignmentConfig bad;
    bad.tau_precision = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad.tau_precision = 0.5;
    bad.tau_recall = 1.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("empty generated rubric aligns to the all-zero control row") {
    JaccardScorer scorer;
    AlignmentConfig cfg;
    const auto item = item_with_rubric({"rule a", "rule b"});
    GeneratedRubric empty;
    empty.item_id = "x";
    const auto report = align(empty, item, scorer, cfg);
    CHECK(report.precision == 0.0);
    CHECK(report.recall == 0.0);
    CHECK(report.f1 == 0.0);
    CHECK(report.rule_count == 0);
    CHECK(report.matches.empty());
    REQUIRE(report.recalled.size() == 2);
    CHECK(report.recalled[0].partner_index == -1);
}

TEST_CASE("human rubric self-alignment is perfect") {
    JaccardScorer scorer;
    AlignmentConfig cfg;
    const auto items = load_items(std::string(FIXTURE_DIR) + "/items.json");
    for (const auto& item : items) {
        GeneratedRubric self;
        self.item_id = item.id;
        for (const auto& text : item.analytic_rubric)
            self.rules.push_back({text, static_cast<int>(self.rules.size())});
        const auto report = align(self, item, scorer, cfg);
        CHECK(report.precision == 1.0);
        CHECK(report.recall == 1.0);
        CHECK(report.f1 == 1.0);
        CHECK(report.rule_count == static_cast<int>(item.analytic_rubric.size()));
    }
}

TEST_CASE("align matches the naive double-loop oracle on randomized rule sets") {
    JaccardScorer scorer;
    AlignmentConfig cfg;
    std::mt19937 gen(2024);
    std::uniform_int_distribution<int> count(1, 6);

    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<std::string> gen_texts, human_texts;
        for (int i = 0; i < count(gen); ++i) gen_texts.push_back(random_sentence(gen));
        for (int i = 0; i < count(gen); ++i) human_texts.push_back(random_sentence(gen));

        const auto item = item_with_rubric(human_texts);
        GeneratedRubric rubric;
        rubric.item_id = "x";
        rubric.rules = rules_of(gen_texts);

        const auto report = align(rubric, item, scorer, cfg);
        const auto oracle = oracles::naive_align(rubric.rules, rules_of(human_texts), scorer,
                                                 cfg.tau_precision, cfg.tau_recall);
        REQUIRE(report.precision == oracle.precision);
        REQUIRE(report.recall == oracle.recall);
        REQUIRE(report.f1 == oracle.f1);
        REQUIRE(report.matches.size() == oracle.gen_partner.size());
        for (std::size_t i = 0; i < report.matches.size(); ++i) {
            REQUIRE(report.matches[i].partner_index == oracle.gen_partner[i]);
            REQUIRE(report.matches[i].score == oracle.gen_best[i]);
        }
        for (std::size_t i = 0; i < report.recalled.size(); ++i)
            REQUIRE(report.recalled[i].partner_index == oracle.human_partner[i]);
    }
}

TEST_CASE("alignment properties") {
    JaccardScorer scorer;
    AlignmentConfig cfg;
    std::mt19937 gen(5);
    std::uniform_int_distribution<int> count(1, 5);

    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::string> gen_texts, human_texts;
        for (int i = 0; i < count(gen); ++i) gen_texts.push_back(random_sentence(gen));
        for (int i = 0; i < count(gen); ++i) human_texts.push_back(random_sentence(gen));
        const auto g = rules_of(gen_texts);
        const auto h = rules_of(human_texts);

        // Permuting the generated side never changes precision.
        auto shuffled_texts = gen_texts;
        std::shuffle(shuffled_texts.begin(), shuffled_texts.end(), gen);
        CHECK(precision(g, h, scorer, cfg) ==
              precision(rules_of(shuffled_texts), h, scorer, cfg));

        // Adding a perfect copy of a human rule never lowers either metric.
        auto extended = gen_texts;
        extended.push_back(human_texts[0]);
        CHECK(recall(rules_of(extended), h, scorer, cfg) >= recall(g, h, scorer, cfg));

        // Raising tau_precision never raises precision.
        AlignmentConfig strict = cfg;
        strict.tau_precision = 0.9;
        CHECK(precision(g, h, scorer, strict) <= precision(g, h, scorer, cfg));
    }
}
