#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "cqsm/lq_env.hpp"
#include "cqsm/samplers.hpp"
#include "cqsm/sde.hpp"

namespace cqsm {

/// How actions are produced along a rollout.
///  - langevin: warm-started Langevin chain at each new state
///  - ddpm: fresh reverse-diffusion chain at each new state
///  - direct_sde: the action carried forward by one Euler-Maruyama step of
///    da = Psi dt + sigma_a dB inside the joint state/action system
enum class SamplerKind { langevin, ddpm, direct_sde };

std::string_view to_string(SamplerKind k) noexcept;
SamplerKind parse_sampler(std::string_view name);

struct SamplerConfig {
    SamplerKind kind = SamplerKind::direct_sde;
    double sigma_a = 1.4142135623730951;
    double langevin_dt = 0.01;
    std::size_t langevin_steps = 200;
    std::size_t ddpm_steps = 20;
    double ddpm_beta_start = 1e-3;
    double ddpm_beta_end = 0.19;
};

class ActionSampler {
public:
    ActionSampler(const SamplerConfig& cfg, double dt);

    /// Action at the first state. direct_sde keeps the supplied a0.
    double initial(const ScoreFn& score, double x0, double a0, NoiseSource& noise) const;

    /// Action at x_next, given the previous pair (x, a).
    double next(const ScoreFn& score, double x, double a, double x_next, NoiseSource& noise) const;

    SamplerKind kind() const noexcept { return cfg_.kind; }

private:
    SamplerConfig cfg_;
    double dt_;
    double sqrt_dt_;
    NoiseSchedule schedule_;
};

/// Simulates the LQ environment driven by `score` for n_steps transitions.
/// Each step reads the state variate first, then whatever the sampler needs.
Trajectory rollout_lq(const LqParams& p, const ScoreFn& score, const ActionSampler& sampler, double x0, double a0,
                      double dt, std::size_t n_steps, std::uint64_t seed);

}  // namespace cqsm
