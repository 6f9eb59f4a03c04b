#pragma once

// Statistical checks of the martingale characterization of a candidate
// Q-function: along paths driven by a score, the process
//   e^{-beta t} q(X_t, a_t) + int_0^t e^{-beta s} (r - lambda/2 Psi^2) ds
// is a martingale iff q is the Q-function of that score. Its increments are
// tested for orthogonality against a chosen test process.

#include <functional>
#include <iosfwd>
#include <string>

#include "cqsm/cqsm_online.hpp"
#include "cqsm/lq_analytic.hpp"
#include "cqsm/simd/lq_ensemble.hpp"

namespace cqsm {

struct ResidualReport {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t n_trajectories = 0;
    double z_score = 0.0;  // estimate / std_error; 0 when std_error == 0
};

using QFn = std::function<double(double x, double a)>;

/// Test process evaluated on the path history up to index k.
using TestFn = std::function<double(const Trajectory& traj, std::size_t k)>;

TestFn constant_test();

/// dQ^theta/dtheta_i at the current point.
TestFn critic_feature_test(std::size_t i);

/// X_{k - lag}^power, zero before the lag is available.
TestFn lagged_state_test(std::size_t lag, int power);

/// Per-path sums of xi_k times the discounted martingale increments, on
/// paths from cfg (x0, a0, dt, n_steps, sampler) with seeds
/// derive_seed(cfg.seed, j). Discount and regularization weight come from p.
std::vector<double> orthogonality_sums(const QFn& qfun, const ScoreFn& score, const TestFn& test_fn,
                                       const LqParams& p, const AlgoConfig& cfg, std::size_t n_traj);

ResidualReport make_report(std::span<const double> per_path);

ResidualReport orthogonality_residual(const QFn& qfun, const ScoreFn& score, const TestFn& test_fn,
                                      const LqParams& p, const AlgoConfig& cfg, std::size_t n_traj);

/// Same statistic for a quadratic candidate and a linear score, computed on
/// the batched SIMD ensemble. Requires the direct_sde sampler.
ResidualReport orthogonality_residual_lq(const KCoefficients& q, const LinearScore& score, simd::TestFeature xi,
                                         const LqParams& p, const AlgoConfig& cfg, std::size_t n_traj,
                                         simd::Backend backend = simd::default_backend());

/// 1/2 mean over paths and grid points of G_{t_k:T}^2 dt.
double martingale_loss(const QFn& qfun, const ScoreFn& score, const LqParams& p, const AlgoConfig& cfg,
                       std::size_t n_traj);

void print_report(std::ostream& os, const ResidualReport& r);
void write_report_csv(std::ostream& os, const ResidualReport& r);

}  // namespace cqsm
