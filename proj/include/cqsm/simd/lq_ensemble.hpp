#pragma once

// Monte Carlo over many independent closed-loop LQ paths, advanced in
// lockstep through the batched kernels. Path j draws its variates from
// NoiseSource(derive_seed(base_seed, j)) in the same order as the generic
// scalar simulator (state variate, then action variate, each step), so a
// path here is bit-identical to the same path simulated one at a time.

#include <cstdint>
#include <vector>

#include "cqsm/lq_analytic.hpp"
#include "cqsm/simd/kernels.hpp"

namespace cqsm::simd {

struct EnsembleSpec {
    LqParams params;
    LinearScore score;
    double sigma_a = 1.4142135623730951;
    double dt = 0.01;
    std::size_t n_steps = 0;
    double x0 = 0.0;
    double a0 = 0.0;
    std::uint64_t base_seed = 0;
    std::size_t n_paths = 0;
};

LaneModel lane_model(const LqParams& p, const LinearScore& score, double sigma_a);

/// Per-path discounted running reward
///   sum_k e^{-beta t_k} (r_k - lambda/2 Psi_k^2) dt.
std::vector<double> discounted_returns(const EnsembleSpec& spec, Backend backend = default_backend());

/// Test process for the orthogonality statistic: the constant 1 (feature < 0)
/// or the critic feature dQ/dtheta_i evaluated at the left endpoint.
struct TestFeature {
    int index = -1;
};

/// Per-path orthogonality sums
///   sum_k xi_k [e^{-beta t_{k+1}} q_{k+1} - e^{-beta t_k} q_k + e^{-beta t_k}(r_k - lambda/2 Psi_k^2) dt]
/// for the quadratic candidate q.
std::vector<double> orthogonality_sums(const EnsembleSpec& spec, const KCoefficients& q, TestFeature xi,
                                       Backend backend = default_backend());

}  // namespace cqsm::simd
