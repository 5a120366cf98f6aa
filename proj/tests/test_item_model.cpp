#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <map>
#include <set>

#include "graderalign/errors.hpp"
#include "graderalign/item_model.hpp"
#include "graderalign/rng.hpp"
#include "support/oracles.hpp"

using namespace graderalign;

namespace {

const std::string kItems = std::string(FIXTURE_DIR) + "/items.json";

std::string write_temp(const std::string& body) {
    static int counter = 0;
    const auto path = "/tmp/test_item_model_" + std::to_string(counter++) + ".json";
    std::ofstream(path) << body;
    return path;
}

AssessmentItem synthetic_item(const std::vector<int>& pool_sizes) {
    AssessmentItem item;
    item.id = "synthetic";
    item.task_description = "task";
    const std::vector<std::string> names = {"Beginning", "Developing", "Proficient"};
    for (std::size_t i = 0; i < pool_sizes.size(); ++i) {
        item.labels.push_back({names[i], static_cast<int>(i)});
        item.holistic_rubric.emplace_back(names[i], "descriptor");
    }
    item.analytic_rubric = {"rule one"};
    int rid = 0;
    for (std::size_t i = 0; i < pool_sizes.size(); ++i)
        for (int k = 0; k < pool_sizes[i]; ++k)
            item.responses.push_back(
                {"r" + std::to_string(rid++), "text " + std::to_string(rid), item.labels[i]});
    return item;
}

}  // namespace

TEST_CASE("fixture dataset loads with expected shape") {
    const auto items = load_items(kItems);
    REQUIRE(items.size() == 6);
    CHECK(items[0].id == "dye-particles");
    CHECK(items[0].level_count() == 3);
    CHECK(items[0].analytic_rubric.size() == 4);
    CHECK(items[0].responses.size() == 12);
    CHECK(items[0].holistic_rubric.size() == 3);
    int binomial = 0;
    for (const auto& item : items)
        if (item.level_count() == 2) ++binomial;
    CHECK(binomial == 2);
    for (const auto& item : items) {
        for (std::size_t i = 0; i < item.labels.size(); ++i)
            CHECK(item.labels[i].ordinal == static_cast<int>(i));
        for (const auto& r : item.responses) CHECK(item.find_label(r.gold_label.name));
    }
}

TEST_CASE("load errors name the offending item and field") {
    CHECK_THROWS_AS(load_items("/nonexistent/items.json"), ConfigError);
    CHECK_THROWS_AS(load_items(write_temp("not json")), ParseError);
    CHECK_THROWS_AS(load_items(write_temp(R"({"nope": []})")), ParseError);

    const std::string one_item = R"({"id": "a", "task": "t",
        "levels": ["Beginning", "Proficient"],
        "holistic": {"Beginning": "b", "Proficient": "p"},
        "analytic": ["r1"],
        "responses": [{"id": "x", "text": "tx", "label": "Beginning"}]})";

    SUBCASE("duplicate item id") {
        const std::string two = R"({"items": [)" + one_item + ", " + one_item + "]}";
        CHECK_THROWS_WITH_AS(load_items(write_temp(two)), "duplicate item id 'a'",
                             ValidationError);
    }
    SUBCASE("missing required field") {
        CHECK_THROWS_AS(
            load_items(write_temp(R"({"items": [{"id": "a", "task": "t"}]})")), ParseError);
    }
    SUBCASE("unknown response label") {
        std::string bad = one_item;
        bad.replace(bad.find("\"label\": \"Beginning\""), 20, "\"label\": \"Advanced\"");
        CHECK_THROWS_AS(load_items(write_temp(R"({"items": [)" + bad + "]}")),
                        ValidationError);
    }
    SUBCASE("wrong label count") {
        CHECK_THROWS_AS(load_items(write_temp(
                            R"({"items": [{"id": "a", "task": "t", "levels": ["Only"],
                           "holistic": {"Only": "d"}, "analytic": ["r"], "responses": []}]})")),
                        ValidationError);
    }
}

TEST_CASE("serialize/load round-trip preserves every field") {
    const auto items = load_items(kItems);
    const auto path = write_temp(serialize_items(items));
    const auto again = load_items(path);
    REQUIRE(again.size() == items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        CHECK(again[i].id == items[i].id);
        CHECK(again[i].task_description == items[i].task_description);
        CHECK(again[i].holistic_rubric == items[i].holistic_rubric);
        CHECK(again[i].analytic_rubric == items[i].analytic_rubric);
        CHECK(again[i].labels == items[i].labels);
        REQUIRE(again[i].responses.size() == items[i].responses.size());
        for (std::size_t j = 0; j < items[i].responses.size(); ++j) {
            CHECK(again[i].responses[j].id == items[i].responses[j].id);
            CHECK(again[i].responses[j].text == items[i].responses[j].text);
            CHECK(again[i].responses[j].gold_label == items[i].responses[j].gold_label);
        }
    }
}

TEST_CASE("sample_balanced follows the documented allocation rule") {
    SUBCASE("worked example: n=4 over pools (1,10,10) takes (1,2,1)") {
        const auto item = synthetic_item({1, 10, 10});
        const auto sample = sample_balanced(item, 4, 42);
        std::map<int, int> by_label;
        for (const auto& r : sample.responses) ++by_label[r.gold_label.ordinal];
        CHECK(by_label[0] == 1);
        CHECK(by_label[1] == 2);
        CHECK(by_label[2] == 1);
    }
    SUBCASE("n larger than the pool takes everything") {
        const auto item = synthetic_item({2, 3});
        const auto sample = sample_balanced(item, 50, 1);
        CHECK(sample.responses.size() == 5);
    }
    SUBCASE("invalid n") {
        const auto item = synthetic_item({2, 2});
        CHECK_THROWS_AS(sample_balanced(item, 0, 1), std::invalid_argument);
    }
}

TEST_CASE("sampling is deterministic in (item, n, seed)") {
    const auto items = load_items(kItems);
    for (const auto& item : items) {
        const auto a = sample_balanced(item, 6, 99);
        const auto b = sample_balanced(item, 6, 99);
        REQUIRE(a.responses.size() == b.responses.size());
        for (std::size_t i = 0; i < a.responses.size(); ++i)
            CHECK(a.responses[i].id == b.responses[i].id);
        const auto c = sample_balanced(item, 6, 100);
        bool same = a.responses.size() == c.responses.size();
        if (same)
            for (std::size_t i = 0; i < a.responses.size(); ++i)
                same = same && a.responses[i].id == c.responses[i].id;
        // 12 responses, 6 drawn: a different seed changing nothing would be
        // suspicious across all six items, so track it per item.
        INFO("item ", item.id, " identical across seeds: ", same);
    }
}

TEST_CASE("allocation matches the independent oracle over 100 seeds") {
    const std::vector<std::vector<int>> shapes = {{1, 10, 10}, {4, 4, 4}, {2, 9},
                                                  {7, 1, 3},   {5, 5},    {1, 1, 8}};
    for (const auto& shape : shapes) {
        const auto item = synthetic_item(shape);
        for (int n : {1, 2, 3, 4, 5, 7, 11, 25}) {
            const auto want = oracles::expected_allocation(shape, n);
            for (std::uint64_t seed = 0; seed < 100; ++seed) {
                const auto sample = sample_balanced(item, n, seed);
                std::vector<int> got(shape.size(), 0);
                for (const auto& r : sample.responses) ++got[r.gold_label.ordinal];
                REQUIRE(got == want);
                // No duplicates within a draw.
                std::set<std::string> ids;
                for (const auto& r : sample.responses) REQUIRE(ids.insert(r.id).second);
            }
        }
    }
}

TEST_CASE("select_graded_examples stratifies and honors exclusions") {
    const auto items = load_items(kItems);
    const auto& item = items[0];

    SUBCASE("one response per label before any label repeats") {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const auto picked = select_graded_examples(item, 3, seed);
            REQUIRE(picked.size() == 3);
            std::set<int> ordinals;
            for (const auto& r : picked) ordinals.insert(r.gold_label.ordinal);
            CHECK(ordinals.size() == 3);
        }
    }
    SUBCASE("disjoint from the evaluation sample across 100 seeds") {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto sample = sample_balanced(item, 6, seed);
            std::set<std::string> exclude;
            for (const auto& r : sample.responses) exclude.insert(r.id);
            const auto picked = select_graded_examples(item, 5, seed, exclude);
            for (const auto& r : picked) CHECK_FALSE(exclude.count(r.id));
        }
    }
    SUBCASE("k beyond the available pool returns what exists") {
        std::set<std::string> exclude;
        for (const auto& r : item.responses) exclude.insert(r.id);
        // Leave exactly two behind.
        exclude.erase(item.responses[0].id);
        exclude.erase(item.responses[1].id);
        const auto picked = select_graded_examples(item, 5, 7, exclude);
        CHECK(picked.size() == 2);
    }
    SUBCASE("k must be positive") {
        CHECK_THROWS_AS(select_graded_examples(item, 0, 1), std::invalid_argument);
    }
}

TEST_CASE("rng primitives behave") {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    Rng c(7);
    for (int i = 0; i < 1000; ++i) CHECK(c.below(13) < 13);
    CHECK(fnv1a("abc") != fnv1a("abd"));
    CHECK(fnv1a("") == fnv1a(""));
}
