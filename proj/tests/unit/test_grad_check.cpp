#include <catch2/catch_amalgamated.hpp>

#include "hybridclf/grad_check.hpp"

using namespace hybridclf;

TEST_CASE("linear function has an exact all-ones gradient", "[grad_check]") {
    auto f = [](const std::vector<Tensor>& p) {
        double s = 0.0;
        for (double v : p[0].data()) s += v;
        return s;
    };
    auto g = [](const std::vector<Tensor>& p) { return std::vector<Tensor>{Tensor(p[0].shape(), 1.0)}; };
    const auto r = grad_check(f, g, {Tensor::vector({0.3, -1.2, 4.0})}, 1e-5, 1e-4);
    CHECK(r.passed);
    CHECK(r.max_rel_error < 1e-9);
}

TEST_CASE("quadratic matches central differences within 1e-8", "[grad_check]") {
    auto f = [](const std::vector<Tensor>& p) {
        double s = 0.0;
        for (double v : p[0].data()) s += v * v;
        return s;
    };
    auto g = [](const std::vector<Tensor>& p) {
        Tensor d = p[0];
        d *= 2.0;
        return std::vector<Tensor>{d};
    };
    const auto r = grad_check(f, g, {Tensor::vector({1.0, 2.0})}, 1e-5, 1e-8, {"x"});
    CHECK(r.passed);
    REQUIRE(r.entries.size() == 1);
    CHECK(r.entries[0].name == "x");
}

TEST_CASE("a wrong gradient fails and reports the worst coordinate", "[grad_check]") {
    auto f = [](const std::vector<Tensor>& p) { return p[0][0] * p[0][0] + 3.0 * p[0][1]; };
    auto g = [](const std::vector<Tensor>& p) { return std::vector<Tensor>{Tensor::vector({2.0 * p[0][0], 2.5})}; };
    const auto r = grad_check(f, g, {Tensor::vector({1.0, 1.0})}, 1e-5, 1e-4, {"w"});
    CHECK_FALSE(r.passed);
    CHECK(r.worst_name == "w");
    CHECK(r.entries[0].worst_index == 1);
    CHECK(r.entries[0].analytic == 2.5);
    CHECK(r.entries[0].numeric == Catch::Approx(3.0));
}

TEST_CASE("relative error uses the 1e-8 floor near zero", "[grad_check]") {
    auto f = [](const std::vector<Tensor>&) { return 1.0; };
    auto g = [](const std::vector<Tensor>& p) { return std::vector<Tensor>{Tensor(p[0].shape(), 1e-13)}; };
    const auto r = grad_check(f, g, {Tensor::vector({0.5})}, 1e-5, 1e-4);
    CHECK(r.passed);
    CHECK(r.max_rel_error == Catch::Approx(1e-5));
}
