#include <catch2/catch_amalgamated.hpp>

#include "hybridclf/errors.hpp"
#include "hybridclf/metrics.hpp"
#include "hybridclf/rng.hpp"

#include "support/oracles.hpp"

#include <cmath>

using namespace hybridclf;

namespace {

MetricsReport with(double acc, double prec, double rec, double f1, std::optional<double> auc) {
    MetricsReport r;
    r.accuracy = acc;
    r.precision = prec;
    r.recall = rec;
    r.f1 = f1;
    r.auc = auc;
    return r;
}

}  // namespace

TEST_CASE("confusion", "[metrics]") {
    CHECK(confusion(std::vector<int>{1, 0}, std::vector<int>{1, 0}) == ConfusionCounts{1, 0, 0, 1});
    CHECK(confusion(std::vector<int>{1}, std::vector<int>{0}).fp == 1);
    CHECK(confusion(std::vector<int>{1, 1, 0, 0}, std::vector<int>{1, 0, 1, 0}) == ConfusionCounts{1, 1, 1, 1});
    CHECK_THROWS_AS(confusion(std::vector<int>{1}, std::vector<int>{1, 0}), ShapeError);
    CHECK(predicted_class({0.5, 0.5}) == 0);
    CHECK(predicted_class({0.4, 0.6}) == 1);
}

TEST_CASE("scalar metrics", "[metrics]") {
    CHECK(std::round(f1_from(0.94, 0.92) * 100) / 100 == 0.93);
    CHECK(std::round(f1_from(0.88, 0.86) * 100) / 100 == 0.87);
    CHECK(f1_from(0.94, 0.92) == Catch::Approx(0.9299).margin(1e-4));

    const auto none = scalar_metrics({0, 0, 3, 2});
    CHECK(none.precision == 0.0);
    CHECK(none.recall == 0.0);
    CHECK(none.f1 == 0.0);
    CHECK(none.accuracy == 0.4);

    CHECK_THROWS_AS(scalar_metrics({0, 0, 0, 0}), DegenerateInputError);
}

TEST_CASE("baseline accuracy on the reported class counts", "[metrics]") {
    const auto s = scalar_metrics({9198, 1176, 0, 0});
    CHECK(std::fabs(s.accuracy - 9198.0 / 10374.0) <= 1e-15);
    CHECK(std::fabs(s.accuracy - 0.8866) <= 0.001);
}

TEST_CASE("roc and auc examples", "[metrics][auc]") {
    const auto sep = roc_auc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, std::vector<int>{1, 1, 0, 0});
    CHECK(sep.auc == 1.0);

    const auto flat = roc_auc(std::vector<double>{0.5, 0.5, 0.5}, std::vector<int>{1, 0, 1});
    CHECK(flat.auc == 0.5);
    CHECK(flat.curve.points == std::vector<RocPoint>{{0, 0}, {1, 1}});

    CHECK(roc_auc(std::vector<double>{0.9, 0.8, 0.7, 0.6}, std::vector<int>{1, 0, 1, 0}).auc == 0.75);
    CHECK_THROWS_AS(roc_auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), UndefinedMetricError);
    CHECK_THROWS_AS(roc_auc(std::vector<double>{NAN, 0.2}, std::vector<int>{1, 0}), DegenerateInputError);
    CHECK(roc_to_csv(sep.curve).rfind("fpr,tpr\n", 0) == 0);
}

TEST_CASE("auc matches the pairwise oracle", "[metrics][auc][oracle]") {
    Rng rng(77);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.below(40);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = static_cast<double>(rng.below(8)) / 8.0;
            labels[i] = static_cast<int>(rng.below(2));
        }
        labels[0] = 0;
        labels[1] = 1;
        const double auc = roc_auc(scores, labels).auc;
        CHECK(std::fabs(auc - oracles::pairwise_auc(scores, labels)) <= 1e-12);

        std::vector<double> warped(n);
        for (std::size_t i = 0; i < n; ++i) warped[i] = std::exp(3.0 * scores[i]) - 7.0;
        CHECK(roc_auc(warped, labels).auc == auc);

        const auto& pts = roc_auc(scores, labels).curve.points;
        CHECK(pts.front() == RocPoint{0, 0});
        CHECK(pts.back() == RocPoint{1, 1});
        for (std::size_t i = 1; i < pts.size(); ++i) {
            CHECK(pts[i].fpr >= pts[i - 1].fpr);
            CHECK(pts[i].tpr >= pts[i - 1].tpr);
        }
    }
}

TEST_CASE("report json round trip", "[metrics]") {
    const std::vector<std::array<double, 2>> probs{{0.2, 0.8}, {0.7, 0.3}, {0.4, 0.6}};
    const std::vector<int> labels{1, 0, 0};
    const auto r = make_report(probs, labels);
    CHECK(r.counts == ConfusionCounts{1, 1, 0, 1});
    REQUIRE(r.auc.has_value());
    CHECK(*r.auc == 1.0);
    const auto back = report_from_json(report_to_json(r));
    CHECK(back.counts == r.counts);
    CHECK(back.f1 == r.f1);
    CHECK(back.auc == r.auc);

    const auto single = make_report(std::vector<std::array<double, 2>>{{0.2, 0.8}}, std::vector<int>{1});
    CHECK_FALSE(single.auc.has_value());
    CHECK(report_to_json(single).at("auc").is_null());
}

TEST_CASE("metric correlation", "[metrics][correlation]") {
    const std::vector<MetricsReport> same(3, with(0.9, 0.8, 0.7, 0.75, 0.95));
    const auto z = metric_correlation(same);
    for (const auto& row : z.values)
        for (const auto& v : row) CHECK_FALSE(v.has_value());

    const std::vector<MetricsReport> two{with(0.9, 0.8, 0.7, 0.75, 0.95), with(0.8, 0.9, 0.6, 0.7, 0.97)};
    const auto t = metric_correlation(two);
    for (std::size_t i = 0; i < 5; ++i) {
        REQUIRE(t.values[i][i].has_value());
        CHECK(*t.values[i][i] == Catch::Approx(1.0).margin(1e-12));
        for (std::size_t j = 0; j < 5; ++j) {
            REQUIRE(t.values[i][j].has_value());
            CHECK(std::fabs(std::fabs(*t.values[i][j]) - 1.0) <= 1e-12);
        }
    }
    CHECK(*t.values[0][1] < 0.0);

    const std::vector<MetricsReport> missing{with(0.9, 0.8, 0.7, 0.75, std::nullopt), with(0.8, 0.9, 0.6, 0.7, 0.9)};
    CHECK_FALSE(metric_correlation(missing).values[4][0].has_value());
    CHECK_THROWS(metric_correlation(std::vector<MetricsReport>(1)));
}

TEST_CASE("aggregate", "[metrics]") {
    const std::vector<MetricsReport> same(5, with(0.1, 0.2, 0.3, 0.24, 0.7));
    const auto a = aggregate(same);
    CHECK(*a[0].mean == 0.1);
    CHECK(*a[0].std == 0.0);
    CHECK(*a[4].mean == 0.7);

    const std::vector<MetricsReport> two{with(1.0, 0, 0, 0, std::nullopt), with(0.5, 0, 0, 0, std::nullopt)};
    const auto b = aggregate(two);
    CHECK(*b[0].mean == 0.75);
    CHECK(*b[0].std == 0.25);
    CHECK_FALSE(b[4].mean.has_value());
}
