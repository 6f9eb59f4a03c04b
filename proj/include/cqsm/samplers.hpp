#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "cqsm/noise.hpp"

namespace cqsm {

using ScoreFn = std::function<double(double x, double a)>;

/// Variance-preserving diffusion schedule: alpha_t = 1 - beta_t,
/// alpha_bar_t = prod_{s <= t} alpha_s (index 0 is the first forward step).
struct NoiseSchedule {
    std::vector<double> betas;
    std::vector<double> alphas;
    std::vector<double> alpha_bars;

    std::size_t size() const noexcept { return betas.size(); }
};

/// Builds a schedule from explicit per-step variances in (0, 1); also
/// accepts 0 for the degenerate identity step.
NoiseSchedule make_schedule(std::vector<double> betas);

/// Linearly interpolated betas from beta_start to beta_end.
NoiseSchedule make_linear_schedule(std::size_t t_steps, double beta_start, double beta_end);

/// 20 steps from 1e-3 to 0.19.
NoiseSchedule default_schedule();

/// Final iterate of da = Psi(x, a) dt + sqrt(2) dB at fixed x, started at a0.
double langevin_sample(const ScoreFn& score, double x, double a0, double dt, std::size_t n_steps,
                       NoiseSource& noise);

struct LangevinOptions {
    double dt = 0.01;
    std::size_t burn_in = 2000;
    std::size_t thin = 10;
};

/// n_samples thinned draws from one continuing Langevin chain after burn-in.
std::vector<double> langevin_chain(const ScoreFn& score, double x, double a0, std::size_t n_samples,
                                   const LangevinOptions& opt, NoiseSource& noise);

/// Reverse chain from a^T ~ N(0, 1):
///   a^{t-1} = (a^t + (1 - alpha_t)/sqrt(1 - alpha_bar_t) Psi(x, a^t)) / sqrt(alpha_t) + sigma_t Z,
/// with sigma_t^2 = beta_t and the state x frozen.
double ddpm_sample(const ScoreFn& score, double x, const NoiseSchedule& schedule, NoiseSource& noise);

/// Same chain with the initial draw and every Z supplied by the caller
/// (z has one entry per step, consumed from the last step down to the first).
double ddpm_sample(const ScoreFn& score, double x, const NoiseSchedule& schedule, double a_start,
                   const std::vector<double>& z);

}  // namespace cqsm
