#include "cqsm/rollout.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cqsm/errors.hpp"

namespace cqsm {

std::string_view to_string(SamplerKind k) noexcept {
    switch (k) {
        case SamplerKind::langevin: return "langevin";
        case SamplerKind::ddpm: return "ddpm";
        case SamplerKind::direct_sde: return "direct_sde";
    }
    return "unknown";
}

SamplerKind parse_sampler(std::string_view name) {
    if (name == "langevin") return SamplerKind::langevin;
    if (name == "ddpm") return SamplerKind::ddpm;
    if (name == "direct_sde") return SamplerKind::direct_sde;
    throw ConfigError("unknown sampler '" + std::string(name) + "' (expected langevin, ddpm or direct_sde)");
}

ActionSampler::ActionSampler(const SamplerConfig& cfg, double dt)
    : cfg_(cfg), dt_(dt), sqrt_dt_(std::sqrt(dt)) {
    if (!(dt > 0.0)) throw std::invalid_argument("ActionSampler: dt must be positive");
    if (cfg_.kind == SamplerKind::ddpm) {
        schedule_ = make_linear_schedule(cfg_.ddpm_steps, cfg_.ddpm_beta_start, cfg_.ddpm_beta_end);
    }
}

double ActionSampler::initial(const ScoreFn& score, double x0, double a0, NoiseSource& noise) const {
    switch (cfg_.kind) {
        case SamplerKind::direct_sde: return a0;
        case SamplerKind::langevin: return langevin_sample(score, x0, a0, cfg_.langevin_dt, cfg_.langevin_steps, noise);
        case SamplerKind::ddpm: return ddpm_sample(score, x0, schedule_, noise);
    }
    return a0;
}

double ActionSampler::next(const ScoreFn& score, double x, double a, double x_next, NoiseSource& noise) const {
    switch (cfg_.kind) {
        case SamplerKind::direct_sde: {
            const double next = a + (score(x, a) * dt_ + cfg_.sigma_a * sqrt_dt_ * noise.gaussian());
            if (!std::isfinite(next)) throw StepError("action_score", 0, "non-finite action update");
            return next;
        }
        case SamplerKind::langevin:
            return langevin_sample(score, x_next, a, cfg_.langevin_dt, cfg_.langevin_steps, noise);
        case SamplerKind::ddpm: return ddpm_sample(score, x_next, schedule_, noise);
    }
    return a;
}

Trajectory rollout_lq(const LqParams& p, const ScoreFn& score, const ActionSampler& sampler, double x0, double a0,
                      double dt, std::size_t n_steps, std::uint64_t seed) {
    NoiseSource noise(seed);
    Trajectory traj;
    traj.seed = seed;
    traj.times.reserve(n_steps + 1);
    traj.states.reserve(n_steps + 1);
    traj.actions.reserve(n_steps + 1);
    traj.reward_rates.reserve(n_steps);

    double x = x0;
    double a = sampler.initial(score, x0, a0, noise);
    traj.times.push_back(0.0);
    traj.states.push_back({x});
    traj.actions.push_back({a});
    for (std::size_t k = 0; k < n_steps; ++k) {
        const EnvTransition tr = env_step(p, x, a, dt, noise);
        const double a_next = sampler.next(score, x, a, tr.x_next, noise);
        traj.reward_rates.push_back(tr.reward_rate);
        x = tr.x_next;
        a = a_next;
        traj.times.push_back(static_cast<double>(k + 1) * dt);
        traj.states.push_back({x});
        traj.actions.push_back({a});
    }
    return traj;
}

}  // namespace cqsm
