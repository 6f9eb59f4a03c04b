#include <doctest.h>

#include <cmath>

#include "cqsm/roots.hpp"

using namespace cqsm;

TEST_CASE("find_roots: all roots of a cubic") {
    auto f = [](double x) -> std::optional<double> { return (x - 1.0) * (x + 2.0) * (x - 3.5); };
    const auto roots = find_roots(f, -10.0, 10.0, 0.25, 1e-12);
    REQUIRE(roots.size() == 3);
    CHECK(roots[0].x == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(roots[1].x == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(roots[2].x == doctest::Approx(3.5).epsilon(1e-10));
    for (const Root& r : roots) CHECK(std::abs(r.residual) <= 1e-12);
}

TEST_CASE("find_roots: undefined regions are skipped") {
    auto f = [](double x) -> std::optional<double> {
        if (x < 0.0) return std::nullopt;
        return std::sqrt(x) - 1.5;
    };
    const auto roots = find_roots(f, -5.0, 5.0, 0.3, 1e-12);
    REQUIRE(roots.size() == 1);
    CHECK(roots[0].x == doctest::Approx(2.25).epsilon(1e-10));
}

TEST_CASE("refine_bracket: converges on a flat-then-steep function") {
    auto f = [](double x) -> std::optional<double> { return std::exp(x) - 1000.0; };
    const auto r = refine_bracket(f, 0.0, 10.0, *f(0.0), *f(10.0), 1e-12);
    REQUIRE(r.has_value());
    CHECK(r->x == doctest::Approx(std::log(1000.0)).epsilon(1e-12));
}

TEST_CASE("find_roots: no sign change means no roots") {
    auto f = [](double x) -> std::optional<double> { return x * x + 1.0; };
    CHECK(find_roots(f, -3.0, 3.0, 0.25, 1e-12).empty());
}
