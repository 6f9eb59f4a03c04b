#pragma once

#include <functional>
#include <string>

#include "cqsm/noise.hpp"
#include "cqsm/sde.hpp"

namespace cqsm {

/// Scalar linear-quadratic problem:
///   dX = (A X + B a) dt + (C X + D a) dB,
///   r(x, a) = -(M/2 x^2 + R x a + N/2 a^2 + P x + Pp a),
/// discounted at rate beta, score regularization weight lambda.
struct LqParams {
    double A = -1.0;
    double B = 0.0;
    double C = 0.0;
    double D = 1.0;
    double M = 2.0;
    double N = 2.0;
    double R = 1.0;
    double P = 1.0;
    double Pp = 2.0;
    double beta = 1.0;
    double lambda = 0.1;

    /// The stationary configuration used throughout the LQ experiments.
    static LqParams reference() { return {}; }
};

/// Empty when valid; otherwise the first violated condition.
std::string check_lq_params(const LqParams& p);

/// Throws ConfigError when check_lq_params reports a violation.
void validate(const LqParams& p);

double lq_reward(const LqParams& p, double x, double a) noexcept;

struct EnvTransition {
    double x_next;
    double reward_rate;  // instantaneous r(x, a); the learner scales by dt
};

/// One Euler-Maruyama step of the controlled state with a caller-supplied variate.
EnvTransition env_step(const LqParams& p, double x, double a, double dt, double z);

/// Same, drawing the variate from `noise`.
EnvTransition env_step(const LqParams& p, double x, double a, double dt, NoiseSource& noise);

using ScalarScore = std::function<double(double x, double a)>;

/// The LQ state dynamics joined with an action score and constant action
/// diffusion sigma_a, as a generic DynamicsSpec.
DynamicsSpec lq_dynamics(const LqParams& p, ScalarScore score, double sigma_a);

RewardFn lq_reward_fn(const LqParams& p);

}  // namespace cqsm
