#include <catch2/catch_amalgamated.hpp>

#include "hybridclf/corpus.hpp"
#include "hybridclf/errors.hpp"
#include "hybridclf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace hybridclf;

namespace {

std::vector<Document> labeled(const std::vector<int>& labels) {
    std::vector<Document> out;
    for (std::size_t i = 0; i < labels.size(); ++i) out.push_back({i, "doc " + std::to_string(i), labels[i]});
    return out;
}

std::vector<Document> balanced(std::size_t per_class) {
    std::vector<int> labels;
    for (std::size_t i = 0; i < 2 * per_class; ++i) labels.push_back(static_cast<int>(i % 2));
    return labeled(labels);
}

}  // namespace

TEST_CASE("two-row fixture loads in file order", "[corpus]") {
    const auto docs = load_corpus(std::string(HYBRIDCLF_TEST_DATA) + "/two_rows.csv");
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].label == 1);
    CHECK(docs[1].label == 0);
    CHECK(docs[0].id == 0);
    CHECK(docs[1].id == 1);
    CHECK(docs[0].text == "<p>Verify your account</p>");
}

TEST_CASE("csv quoting, embedded newlines and doubled quotes", "[corpus]") {
    const auto docs = parse_corpus("id,htmlContent,isPhish\r\n7,\"a, \"\"b\"\"\nc\",\"1\"\n8,plain,0\n", "htmlContent",
                                   "isPhish");
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].text == "a, \"b\"\nc");
    CHECK(docs[0].label == 1);
    CHECK(docs[1].text == "plain");
}

TEST_CASE("corpus errors", "[corpus]") {
    CHECK_THROWS_AS(parse_corpus("", "htmlContent", "isPhish"), EmptyCorpusError);
    CHECK_THROWS_AS(parse_corpus("htmlContent,isPhish\n", "htmlContent", "isPhish"), EmptyCorpusError);
    try {
        parse_corpus("text,isPhish\nx,1\n", "htmlContent", "isPhish");
        FAIL("no throw");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("htmlContent") != std::string::npos);
    }
    try {
        parse_corpus("htmlContent,isPhish\nx,1\ny,maybe\n", "htmlContent", "isPhish");
        FAIL("no throw");
    } catch (const RowError& e) {
        CHECK(e.line() == 3);
        CHECK(e.kind() == "row");
    }
    CHECK_THROWS_AS(parse_corpus("htmlContent,isPhish\nx,1,extra\n", "htmlContent", "isPhish"), RowError);
    CHECK_THROWS_AS(parse_corpus("htmlContent,isPhish\n\"open,1\n", "htmlContent", "isPhish"), RowError);
    CHECK_THROWS_AS(load_corpus("/nonexistent/file.csv"), ConfigError);
}

TEST_CASE("compute_stats examples", "[corpus]") {
    const CorpusStats empty = compute_stats({}, 20);
    CHECK(empty.total == 0);
    CHECK(empty.per_class.at(0) == 0);
    CHECK(empty.per_class.at(1) == 0);

    std::vector<Document> docs{{0, std::string(10, 'a'), 0}, {1, std::string(25, 'b'), 1}};
    const CorpusStats s = compute_stats(docs, 20);
    CHECK(s.total == 2);
    REQUIRE(s.length_histogram.size() == 2);
    CHECK(s.length_histogram[0] == std::pair<std::size_t, std::size_t>{0, 1});
    CHECK(s.length_histogram[1] == std::pair<std::size_t, std::size_t>{20, 1});
    CHECK(stats_to_json(s).dump() ==
          R"({"length_histogram":[[0,1],[20,1]],"per_class":{"0":1,"1":1},"total":2})");
    CHECK_THROWS_AS(compute_stats(docs, 0), ConfigError);
}

TEST_CASE("lengths count code points", "[corpus]") {
    CHECK(char_length("abc") == 3);
    CHECK(char_length("caf\xC3\xA9") == 4);
}

TEST_CASE("plan_folds examples", "[corpus][folds]") {
    const auto docs = balanced(5);
    const FoldPlan plan = plan_folds(docs, 5, 42);
    for (std::size_t f = 0; f < 5; ++f) {
        const auto test = plan.test_indices(f);
        REQUIRE(test.size() == 2);
        CHECK(docs[test[0]].label != docs[test[1]].label);
    }
    CHECK(plan_folds(docs, 5, 42).assignments == plan.assignments);
    CHECK_THROWS_AS(plan_folds(labeled({0, 0, 0, 0, 1, 1, 1, 1, 1}), 5, 1), StratificationError);
    CHECK_THROWS_AS(plan_folds(docs, 1, 1), ConfigError);
}

TEST_CASE("fold plans partition and stratify", "[corpus][folds][property]") {
    Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t k = 2 + static_cast<std::size_t>(rng.below(5));
        std::vector<int> labels;
        const std::size_t n0 = k + rng.below(30), n1 = k + rng.below(30);
        for (std::size_t i = 0; i < n0; ++i) labels.push_back(0);
        for (std::size_t i = 0; i < n1; ++i) labels.push_back(1);
        rng.shuffle(std::span<int>(labels));
        const auto docs = labeled(labels);
        const std::uint64_t seed = rng.next_u64();
        const FoldPlan plan = plan_folds(docs, k, seed);

        std::multiset<std::size_t> seen;
        for (std::size_t f = 0; f < k; ++f) {
            const auto test = plan.test_indices(f);
            const auto train = plan.train_indices(f);
            CHECK(test.size() + train.size() == docs.size());
            seen.insert(test.begin(), test.end());
            for (int c : {0, 1}) {
                const double count = static_cast<double>(
                    std::count_if(test.begin(), test.end(), [&](std::size_t i) { return docs[i].label == c; }));
                const double size = static_cast<double>(c == 0 ? n0 : n1);
                CHECK(std::fabs(count - size / static_cast<double>(k)) < 1.0);
            }
        }
        CHECK(seen.size() == docs.size());
        for (std::size_t i = 0; i < docs.size(); ++i) CHECK(seen.count(i) == 1);
        CHECK(plan_folds(docs, k, seed).assignments == plan.assignments);
    }
}

TEST_CASE("stratified holdout keeps both classes", "[corpus]") {
    std::vector<int> labels(40, 0);
    for (std::size_t i = 0; i < 10; ++i) labels[i] = 1;
    const auto [kept, holdout] = stratified_holdout(labels, 0.1, 3);
    CHECK(kept.size() + holdout.size() == 40);
    CHECK(holdout.size() == 4);
    CHECK(std::count_if(holdout.begin(), holdout.end(), [&](std::size_t i) { return labels[i] == 1; }) == 1);
    const auto [k2, h2] = stratified_holdout({0, 1}, 0.9, 3);
    CHECK(k2.size() == 2);
    CHECK(h2.empty());
    CHECK_THROWS_AS(stratified_holdout(labels, 1.0, 3), ConfigError);
}
