#include <doctest.h>

#include <cmath>
#include <vector>

#include "cqsm/lq_analytic.hpp"
#include "cqsm/martingale.hpp"
#include "cqsm/noise.hpp"
#include "cqsm/rollout.hpp"
#include "cqsm/simd/kernels.hpp"
#include "cqsm/simd/lq_ensemble.hpp"

using namespace cqsm;
using namespace cqsm::simd;

namespace {

std::vector<double> gaussians(std::uint64_t seed, std::size_t n) {
    NoiseSource noise(seed);
    std::vector<double> v(n);
    noise.fill_gaussian(v);
    return v;
}

EnsembleSpec small_spec() {
    EnsembleSpec s;
    s.params = LqParams{.A = -0.8, .B = 0.2, .C = 0.3, .D = 0.9};
    s.score = LinearScore{-2.5, 0.4, -0.7};
    s.dt = 0.02;
    s.n_steps = 300;
    s.x0 = 0.5;
    s.a0 = -0.2;
    s.base_seed = 17;
    s.n_paths = 263;  // not a multiple of the vector width or the block size
    return s;
}

}  // namespace

TEST_CASE("scalar and AVX2 kernels agree bit for bit") {
    if (!backend_available(Backend::avx2)) {
        MESSAGE("AVX2 not available; skipping");
        return;
    }
    const KernelTable& s = scalar_kernels();
    const KernelTable& v = kernels(Backend::avx2);
    const LaneModel m = lane_model(LqParams{.A = -0.8, .B = 0.2, .C = 0.3, .D = 0.9, .M = 1.5, .R = -0.4},
                                   LinearScore{-3.0, 0.5, 1.2}, std::sqrt(2.0));
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 13u, 64u, 257u}) {
        auto x1 = gaussians(1, n), a1 = gaussians(2, n), zx = gaussians(3, n), za = gaussians(4, n);
        auto x2 = x1, a2 = a1;
        std::vector<double> p1(n), p2(n);
        s.lq_step(m, 0.1, std::sqrt(0.1), x1.data(), a1.data(), zx.data(), za.data(), p1.data(), n);
        v.lq_step(m, 0.1, std::sqrt(0.1), x2.data(), a2.data(), zx.data(), za.data(), p2.data(), n);
        CHECK(x1 == x2);
        CHECK(a1 == a2);
        CHECK(p1 == p2);

        const double c[6] = {-0.6, 0.3, -0.45, 0.2, -0.15, 0.17};
        std::vector<double> q1(n), q2(n);
        s.quad_eval(c, x1.data(), a1.data(), q1.data(), n);
        v.quad_eval(c, x1.data(), a1.data(), q2.data(), n);
        CHECK(q1 == q2);

        auto acc1 = gaussians(5, n), xi = gaussians(6, n), qn = gaussians(7, n);
        auto acc2 = acc1;
        s.martingale_accumulate(acc1.data(), xi.data(), q1.data(), qn.data(), p1.data(), 0.9, 0.8, 0.1, n);
        v.martingale_accumulate(acc2.data(), xi.data(), q1.data(), qn.data(), p1.data(), 0.9, 0.8, 0.1, n);
        CHECK(acc1 == acc2);
        s.scaled_accumulate(acc1.data(), qn.data(), 0.37, n);
        v.scaled_accumulate(acc2.data(), qn.data(), 0.37, n);
        CHECK(acc1 == acc2);
    }
}

TEST_CASE("the reward negation keeps the sign of zero") {
    if (!backend_available(Backend::avx2)) return;
    LqParams p;
    p.M = p.N = p.R = p.P = p.Pp = 0.0;
    p.N = 1e-300;
    const LaneModel m = lane_model(p, LinearScore{0.0, 0.0, 0.0}, 0.0);
    std::vector<double> x{0.0, 0.0, 0.0, 0.0, 0.0}, a = x, z = x, p1(5), p2(5);
    auto x2 = x, a2 = a;
    scalar_kernels().lq_step(m, 0.1, std::sqrt(0.1), x.data(), a.data(), z.data(), z.data(), p1.data(), 5);
    kernels(Backend::avx2).lq_step(m, 0.1, std::sqrt(0.1), x2.data(), a2.data(), z.data(), z.data(), p2.data(), 5);
    for (int i = 0; i < 5; ++i) CHECK(std::signbit(p1[i]) == std::signbit(p2[i]));
}

TEST_CASE("ensemble results are identical across backends") {
    if (!backend_available(Backend::avx2)) return;
    const EnsembleSpec spec = small_spec();
    CHECK(discounted_returns(spec, Backend::scalar) == discounted_returns(spec, Backend::avx2));
    const KCoefficients q{-0.5, 0.1, -0.4, -0.3, 0.05, 0.2};
    for (int f : {-1, 0, 4}) {
        CHECK(orthogonality_sums(spec, q, TestFeature{f}, Backend::scalar) ==
              orthogonality_sums(spec, q, TestFeature{f}, Backend::avx2));
    }
}

TEST_CASE("ensemble paths reproduce the generic rollout") {
    const EnsembleSpec spec = small_spec();
    AlgoConfig cfg;
    cfg.dt = spec.dt;
    cfg.n_steps = spec.n_steps;
    cfg.x0 = spec.x0;
    cfg.a0 = spec.a0;
    cfg.seed = spec.base_seed;
    cfg.sampler.kind = SamplerKind::direct_sde;
    const ActionSampler sampler(cfg.sampler, cfg.dt);
    const ScoreFn score = spec.score;
    const auto returns = discounted_returns(spec, default_backend());
    for (std::size_t j : {0u, 1u, 255u, 256u, 262u}) {
        const Trajectory t = rollout_lq(spec.params, score, sampler, spec.x0, spec.a0, spec.dt, spec.n_steps,
                                        derive_seed(spec.base_seed, j));
        double acc = 0.0;
        for (std::size_t k = 0; k < spec.n_steps; ++k) {
            const double psi = score(t.states[k][0], t.actions[k][0]);
            const double pen = t.reward_rates[k] - 0.5 * spec.params.lambda * psi * psi;
            acc += std::exp(-spec.params.beta * (static_cast<double>(k) * spec.dt)) * spec.dt * pen;
        }
        CHECK(returns[j] == acc);
    }

    const KCoefficients q{-0.5, 0.1, -0.4, -0.3, 0.05, 0.2};
    const QFn qf = [&](double x, double a) { return q_star(q, x, a); };
    for (auto [feature, test] : {std::pair{-1, constant_test()}, std::pair{4, critic_feature_test(4)}}) {
        const auto batched = orthogonality_sums(spec, q, TestFeature{feature}, default_backend());
        const auto generic = orthogonality_sums(qf, score, test, spec.params, cfg, spec.n_paths);
        REQUIRE(batched.size() == generic.size());
        for (std::size_t j = 0; j < generic.size(); ++j) CHECK(batched[j] == doctest::Approx(generic[j]).epsilon(1e-12));
    }
}

TEST_CASE("backend selection") {
    CHECK(backend_available(Backend::scalar));
    CHECK(backend_name(Backend::scalar) == "scalar");
    CHECK(backend_name(Backend::avx2) == "avx2");
    CHECK(backend_available(default_backend()));
    CHECK(kernels(Backend::scalar).name == "scalar");
}
