#include "cqsm/lq_env.hpp"

#include <cmath>
#include <sstream>

#include "cqsm/errors.hpp"

namespace cqsm {

std::string check_lq_params(const LqParams& p) {
    const double vals[] = {p.A, p.B, p.C, p.D, p.M, p.N, p.R, p.P, p.Pp, p.beta, p.lambda};
    for (double v : vals) {
        if (!std::isfinite(v)) return "all LQ coefficients must be finite";
    }
    if (!(p.N > 0.0)) return "N must be positive";
    if (!(p.M >= 0.0)) return "M must be non-negative";
    if (!(p.beta > 0.0)) return "beta must be positive";
    if (!(p.lambda > 0.0)) return "lambda must be positive";
    if (!(p.beta > 2.0 * p.A + p.C * p.C)) {
        std::ostringstream msg;
        msg << "discount condition violated: beta > 2A + C^2 required, got beta="
            << p.beta << " <= " << 2.0 * p.A + p.C * p.C;
        return msg.str();
    }
    return {};
}

void validate(const LqParams& p) {
    if (auto err = check_lq_params(p); !err.empty()) throw ConfigError(err);
}

double lq_reward(const LqParams& p, double x, double a) noexcept {
    return -(0.5 * p.M * x * x + p.R * x * a + 0.5 * p.N * a * a + p.P * x + p.Pp * a);
}

EnvTransition env_step(const LqParams& p, double x, double a, double dt, double z) {
    if (!(dt > 0.0)) throw std::invalid_argument("env_step: dt must be positive");
    const double drift = p.A * x + p.B * a;
    const double diffusion = p.C * x + p.D * a;
    const double x_next = x + (drift * dt + diffusion * std::sqrt(dt) * z);
    const double r = lq_reward(p, x, a);
    if (!std::isfinite(x_next) || !std::isfinite(r)) {
        std::ostringstream msg;
        msg << "environment fault: non-finite transition from x=" << x << ", a=" << a;
        throw StepError("environment", 0, msg.str());
    }
    return {x_next, r};
}

EnvTransition env_step(const LqParams& p, double x, double a, double dt, NoiseSource& noise) {
    return env_step(p, x, a, dt, noise.gaussian());
}

DynamicsSpec lq_dynamics(const LqParams& p, ScalarScore score, double sigma_a) {
    DynamicsSpec dyn;
    dyn.state_drift = [p](const Vec& x, const Vec& a) { return Vec{p.A * x[0] + p.B * a[0]}; };
    dyn.state_diffusion = [p](const Vec& x, const Vec& a) { return Vec{p.C * x[0] + p.D * a[0]}; };
    dyn.action_score = [score = std::move(score)](const Vec& x, const Vec& a) {
        return Vec{score(x[0], a[0])};
    };
    dyn.action_diffusion = [sigma_a](const Vec&, const Vec&) { return Vec{sigma_a}; };
    return dyn;
}

RewardFn lq_reward_fn(const LqParams& p) {
    return [p](const Vec& x, const Vec& a) { return lq_reward(p, x[0], a[0]); };
}

}  // namespace cqsm
