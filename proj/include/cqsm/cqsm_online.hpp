#pragma once

// Online actor-critic Q-score matching on a single continuing trajectory.
//
// Per step: act, observe (x', r), sample a' at x', form the discounted TD
//   delta = Q(x', a') - Q(x, a) + r dt - lambda/2 Psi(x, a)^2 dt - beta Q(x, a) dt,
// move the critic along delta * dQ/dtheta and pull the actor toward the
// action gradient lambda^{-1} dQ/da.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "cqsm/lq_env.hpp"
#include "cqsm/policy.hpp"
#include "cqsm/rollout.hpp"

namespace cqsm {

struct AlgoConfig {
    double dt = 0.1;
    std::size_t n_steps = 1000;  // horizon T = n_steps * dt
    double alpha_theta = 0.01;
    double alpha_v = 0.01;
    double beta = 1.0;
    double lambda = 0.1;
    std::uint64_t seed = 0;
    SamplerConfig sampler;
    std::size_t record_every = 100;
    double x0 = 0.0;
    double a0 = 0.0;

    double horizon() const noexcept { return static_cast<double>(n_steps) * dt; }
};

/// Throws ConfigError on non-positive rates, steps or thinning.
void validate(const AlgoConfig& cfg);

struct LearnState {
    QParams theta;
    ScoreParams v;
    double x = 0.0;
    double a = 0.0;
    std::size_t step = 0;
    double cumulative_reward = 0.0;  // sum of r dt over completed steps
    double last_reward_rate = 0.0;
    double last_delta = 0.0;
};

/// Decay l(t) = 1 / max(1, sqrt(log t)), with log t clamped at 0 for t < 1.
double lr_schedule(double t) noexcept;

double td_delta(const QParams& theta, const ScoreParams& v, double x, double a, double x_next, double a_next,
                double r, double dt, double beta, double lambda) noexcept;

/// Critic and actor increments before learning-rate scaling.
struct Increments {
    std::array<double, 6> d_theta;
    std::array<double, 3> d_v;
};

Increments cqsm_increments(const QParams& theta, const ScoreParams& v, double x, double a, double delta,
                           double lambda) noexcept;

using EnvFn = std::function<EnvTransition(double x, double a, NoiseSource& noise)>;

EnvFn lq_environment(const LqParams& p, double dt);

/// Guard against runaway parameters.
inline constexpr double kDivergenceBound = 1e6;

/// One loop iteration. Throws DivergenceError when parameters leave the
/// finite range or exceed kDivergenceBound.
LearnState cqsm_step(const LearnState& state, const AlgoConfig& cfg, const EnvFn& env, const ActionSampler& sampler,
                     NoiseSource& noise);
LearnState cqsm_step(const LearnState& state, const AlgoConfig& cfg, const EnvFn& env, NoiseSource& noise);

struct RecordRow {
    std::size_t step = 0;
    double t = 0.0;
    QParams theta;
    ScoreParams v;
    std::optional<double> reward_rate;
    std::optional<double> running_avg_reward;
};

struct LearningRecord {
    std::vector<RecordRow> rows;
    QParams final_theta;
    ScoreParams final_v;
    double final_running_avg_reward = 0.0;
    std::size_t steps_completed = 0;
};

/// Runs cfg.n_steps iterations from (cfg.x0, initial action). Rows are kept
/// at step 0, every record_every steps and at the last step.
LearningRecord run_cqsm(const AlgoConfig& cfg, const LqParams& p, const QParams& theta0, const ScoreParams& v0);

/// Columns step,t,theta0..theta5,v0,v1,v2,reward_rate,running_avg_reward.
void write_learning_record_csv(std::ostream& os, const LearningRecord& rec);

}  // namespace cqsm
