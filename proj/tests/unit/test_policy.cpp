#include <doctest.h>

#include <cmath>
#include <random>

#include "cqsm/lq_analytic.hpp"
#include "cqsm/policy.hpp"

using namespace cqsm;

namespace {

bool close_rel(double fd, double g, double tol) { return std::abs(fd - g) <= tol * std::max(1.0, std::abs(g)); }

}  // namespace

TEST_CASE("q_theta and grad_theta_q hand values") {
    const OptimalParams o = k_to_optimal_params(solve_lq(LqParams{}), 0.1);
    CHECK(q_theta(o.theta, 0.0, 0.0) == doctest::Approx(0.17312350).epsilon(1e-7));
    CHECK(q_theta(QParams{}, 1.7, -0.4) == 0.0);
    CHECK(grad_theta_q(o.theta, 0.0, 0.0) == std::array<double, 6>{0, 0, 0, 0, 0, 1});
    CHECK(grad_theta_q(o.theta, 1.0, 1.0) == std::array<double, 6>{0.5, 1, 0.5, 1, 1, 1});
    CHECK(grad_a_q(o.theta, 0.0, 0.0) == doctest::Approx(-0.35624157).epsilon(1e-7));
    CHECK(grad_a_q(QParams{}, 3.0, -2.0) == 0.0);
}

TEST_CASE("psi_v and grad_v_psi hand values") {
    const OptimalParams o = k_to_optimal_params(solve_lq(LqParams{}), 0.1);
    CHECK(psi_v(o.v, 0.0, 0.0) == doctest::Approx(-3.5624157).epsilon(1e-7));
    CHECK(psi_v(ScoreParams{}, 0.0, 1.0) == -1.0);
    CHECK(grad_v_psi(ScoreParams{{0.4, -2.0, 5.0}}, 0.0, 0.0) == std::array<double, 3>{0, 0, 1});
    CHECK(grad_v_psi(ScoreParams{{0.0, 1.0, 1.0}}, 2.0, 1.0)[0] == -1.0);
}

TEST_CASE("optimal parameters represent q_star and the optimal score") {
    const LqParams p;
    const KCoefficients k = solve_lq(p);
    const OptimalParams o = k_to_optimal_params(k, p.lambda);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 100; ++i) {
        const double x = u(rng), a = u(rng);
        CHECK(q_theta(o.theta, x, a) == doctest::Approx(q_star(k, x, a)).epsilon(1e-12));
        CHECK(grad_a_q(o.theta, x, a) / p.lambda == doctest::Approx(optimal_score(k, p.lambda, x, a)).epsilon(1e-12));
        CHECK(psi_v(o.v, x, a) == doctest::Approx(optimal_score(k, p.lambda, x, a)).epsilon(1e-9));
    }
}

TEST_CASE("analytic gradients match central finite differences") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const double h = 1e-5, tol = 1e-7;
    for (int trial = 0; trial < 100; ++trial) {
        QParams th;
        for (auto& t : th.theta) t = u(rng);
        ScoreParams v;
        for (auto& c : v.v) c = u(rng);
        const double x = u(rng), a = u(rng);

        const auto g = grad_theta_q(th, x, a);
        for (int i = 0; i < 6; ++i) {
            QParams hi = th, lo = th;
            hi[i] += h;
            lo[i] -= h;
            CHECK(close_rel((q_theta(hi, x, a) - q_theta(lo, x, a)) / (2 * h), g[i], tol));
        }
        const double ga = grad_a_q(th, x, a);
        CHECK(close_rel((q_theta(th, x, a + h) - q_theta(th, x, a - h)) / (2 * h), ga, tol));

        const auto gv = grad_v_psi(v, x, a);
        for (int i = 0; i < 3; ++i) {
            ScoreParams hi = v, lo = v;
            hi[i] += h;
            lo[i] -= h;
            CHECK(close_rel((psi_v(hi, x, a) - psi_v(lo, x, a)) / (2 * h), gv[i], tol));
        }
    }
}

TEST_CASE("parameter finiteness") {
    QParams th;
    CHECK(th.finite());
    th[3] = std::nan("");
    CHECK_FALSE(th.finite());
    ScoreParams v;
    v[0] = INFINITY;
    CHECK_FALSE(v.finite());
}
