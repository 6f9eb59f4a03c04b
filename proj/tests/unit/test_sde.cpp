#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cqsm/errors.hpp"
#include "cqsm/lq_analytic.hpp"
#include "cqsm/lq_env.hpp"
#include "cqsm/noise.hpp"
#include "cqsm/sde.hpp"
#include "cqsm/stats.hpp"

using namespace cqsm;

namespace {

DynamicsSpec zero_dynamics() {
    auto zero = [](const Vec& x, const Vec&) { return Vec(x.size(), 0.0); };
    return {zero, zero, zero, zero};
}

DynamicsSpec constant_dynamics(double bx, double sx, double ba, double sa) {
    return {[=](const Vec&, const Vec&) { return Vec{bx}; }, [=](const Vec&, const Vec&) { return Vec{sx}; },
            [=](const Vec&, const Vec&) { return Vec{ba}; }, [=](const Vec&, const Vec&) { return Vec{sa}; }};
}

}  // namespace

TEST_CASE("em_step: zero dynamics keep the origin fixed") {
    const Vec z{1.3};
    const StepResult r = em_step(Vec{0.0}, Vec{0.0}, zero_dynamics(), 0.1, z, z);
    CHECK(r.x[0] == 0.0);
    CHECK(r.a[0] == 0.0);
}

TEST_CASE("em_step: LQ step from (1, 0) with zero noise") {
    const LqParams p;
    const KCoefficients k = solve_lq(p);
    const DynamicsSpec dyn = lq_dynamics(p, [&](double x, double a) { return optimal_score(k, p.lambda, x, a); },
                                         std::sqrt(2.0));
    const Vec z{0.0};
    const StepResult r = em_step(Vec{1.0}, Vec{0.0}, dyn, 0.1, z, z);
    CHECK(r.x[0] == doctest::Approx(0.9).epsilon(1e-15));
    const double expected_a = 0.1 * (k.k3 + k.k4) / p.lambda;
    CHECK(r.a[0] == doctest::Approx(expected_a).epsilon(1e-14));
    CHECK(r.a[0] == doctest::Approx(-0.5074322).epsilon(1e-6));
}

TEST_CASE("em_step: noise enters as s * sqrt(dt) exactly") {
    const double s = 0.7, dt = 0.04;
    const Vec one{1.0};
    const StepResult r = em_step(Vec{2.0}, Vec{0.0}, constant_dynamics(0.0, s, 0.0, 0.0), dt, one, one);
    CHECK(r.x[0] - 2.0 == doctest::Approx(s * std::sqrt(dt)).epsilon(1e-15));
}

TEST_CASE("em_step: non-finite fields are reported by name") {
    const double inf = std::numeric_limits<double>::infinity();
    const Vec z{0.0};
    try {
        em_step(Vec{0.0}, Vec{0.0}, constant_dynamics(0.0, 0.0, inf, 1.0), 0.1, z, z);
        FAIL("expected StepError");
    } catch (const StepError& e) {
        CHECK(e.field() == "action_score");
    }
    CHECK_THROWS_AS(em_step(Vec{0.0}, Vec{0.0}, zero_dynamics(), 0.0, z, z), std::invalid_argument);
}

TEST_CASE("simulate: one step equals em_step plus one reward") {
    const LqParams p;
    const DynamicsSpec dyn = lq_dynamics(p, [](double x, double a) { return -a + 0.3 * x - 1.0; }, std::sqrt(2.0));
    const Trajectory tr = simulate(dyn, lq_reward_fn(p), Vec{0.5}, Vec{-0.2}, 0.1, 1, 42);
    REQUIRE(tr.size() == 2);
    REQUIRE(tr.reward_rates.size() == 1);
    NoiseSource noise(42);
    const double zx = noise.gaussian();
    const double za = noise.gaussian();
    const StepResult r = em_step(Vec{0.5}, Vec{-0.2}, dyn, 0.1, Vec{zx}, Vec{za});
    CHECK(tr.states[1][0] == r.x[0]);
    CHECK(tr.actions[1][0] == r.a[0]);
    CHECK(tr.reward_rates[0] == lq_reward(p, 0.5, -0.2));
    CHECK(validate_trajectory(tr).empty());
}

TEST_CASE("simulate: equal seeds give identical trajectories") {
    const LqParams p;
    const DynamicsSpec dyn = lq_dynamics(p, [](double x, double a) { return -2.0 * a + x; }, std::sqrt(2.0));
    const Trajectory t1 = simulate(dyn, lq_reward_fn(p), Vec{1.0}, Vec{0.0}, 0.05, 500, 7);
    const Trajectory t2 = simulate(dyn, lq_reward_fn(p), Vec{1.0}, Vec{0.0}, 0.05, 500, 7);
    CHECK(t1.states == t2.states);
    CHECK(t1.actions == t2.actions);
    CHECK(t1.reward_rates == t2.reward_rates);
    const Trajectory t3 = simulate(dyn, lq_reward_fn(p), Vec{1.0}, Vec{0.0}, 0.05, 500, 8);
    CHECK(t1.states != t3.states);
}

TEST_CASE("simulate: optimal LQ policy keeps the second moment bounded") {
    const LqParams p;
    const KCoefficients k = solve_lq(p);
    const DynamicsSpec dyn = lq_dynamics(p, [&](double x, double a) { return optimal_score(k, p.lambda, x, a); },
                                         std::sqrt(2.0));
    const Trajectory tr = simulate(dyn, lq_reward_fn(p), Vec{0.0}, Vec{0.0}, 0.1, 100000, 3);
    RunningMoments m2;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const double x = tr.states[i][0], a = tr.actions[i][0];
        REQUIRE(std::isfinite(x));
        REQUIRE(std::isfinite(a));
        m2.add(x * x + a * a);
    }
    CHECK(m2.mean() < 10.0);
}

TEST_CASE("simulate: zero noise matches forward Euler") {
    const LqParams p{.A = -0.7, .B = 0.4, .C = 0.0, .D = 0.0};
    const DynamicsSpec dyn = lq_dynamics(p, [](double x, double a) { return -1.5 * a + 0.2 * x + 0.1; }, 0.0);
    const double dt = 0.01;
    const Trajectory tr = simulate(dyn, lq_reward_fn(p), Vec{1.0}, Vec{-1.0}, dt, 1000, 11);
    double x = 1.0, a = -1.0;
    for (std::size_t k = 0; k < 1000; ++k) {
        const double dx = (p.A * x + p.B * a) * dt;
        const double da = (-1.5 * a + 0.2 * x + 0.1) * dt;
        x += dx;
        a += da;
        CHECK(tr.states[k + 1][0] == doctest::Approx(x).epsilon(1e-14));
        CHECK(tr.actions[k + 1][0] == doctest::Approx(a).epsilon(1e-14));
    }
}

TEST_CASE("simulate: strong error shrinks with dt under matched increments") {
    // Coarse paths reuse the fine Brownian increments: z = (z1 + z2) / sqrt(2).
    const LqParams p;
    auto score = [](double x, double a) { return -3.0 * a - 1.0 * x - 2.0; };
    auto endpoint = [&](double dt, const std::vector<double>& zx, const std::vector<double>& za) {
        double x = 1.0, a = 0.0;
        const double s = std::sqrt(dt);
        for (std::size_t k = 0; k < zx.size(); ++k) {
            const double bx = p.A * x + p.B * a, sx = p.C * x + p.D * a;
            const double ba = score(x, a);
            x = x + (bx * dt + sx * s * zx[k]);
            a = a + (ba * dt + std::sqrt(2.0) * s * za[k]);
        }
        return x;
    };
    const double T = 1.0;
    std::vector<double> rms;
    for (std::size_t n : {16u, 32u, 64u}) {
        double sum = 0.0;
        const int paths = 400;
        for (int j = 0; j < paths; ++j) {
            NoiseSource noise(derive_seed(99, j));
            std::vector<double> fx(2 * n), fa(2 * n);
            noise.fill_gaussian(fx);
            noise.fill_gaussian(fa);
            std::vector<double> cx(n), ca(n);
            for (std::size_t k = 0; k < n; ++k) {
                cx[k] = (fx[2 * k] + fx[2 * k + 1]) / std::sqrt(2.0);
                ca[k] = (fa[2 * k] + fa[2 * k + 1]) / std::sqrt(2.0);
            }
            const double d = endpoint(T / n, cx, ca) - endpoint(T / (2 * n), fx, fa);
            sum += d * d;
        }
        rms.push_back(std::sqrt(sum / paths));
    }
    CHECK(rms[1] < rms[0]);
    CHECK(rms[2] < rms[1]);
}

TEST_CASE("noise: Gaussian source moments and reproducibility") {
    NoiseSource noise(2024);
    const std::size_t n = 1000000;
    RunningMoments m;
    for (std::size_t i = 0; i < n; ++i) m.add(noise.gaussian());
    CHECK(std::abs(m.mean()) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(m.variance() - 1.0) < 0.01);

    NoiseSource a(5), b(5);
    for (int i = 0; i < 1000; ++i) CHECK(a.gaussian() == b.gaussian());
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("trajectory CSV: header, empty last reward, LF endings") {
    const LqParams p;
    const DynamicsSpec dyn = lq_dynamics(p, [](double, double a) { return -a; }, std::sqrt(2.0));
    const Trajectory tr = simulate(dyn, lq_reward_fn(p), Vec{0.0}, Vec{0.0}, 0.1, 2, 1);
    std::ostringstream os;
    write_trajectory_csv(os, tr);
    const std::string s = os.str();
    CHECK(s.rfind("t,x,a,r\n", 0) == 0);
    CHECK(s.find('\r') == std::string::npos);
    const auto last = s.substr(s.rfind('\n', s.size() - 2) + 1);
    CHECK(last.back() == '\n');
    CHECK(last[last.size() - 2] == ',');
}
