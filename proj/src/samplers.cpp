#include "cqsm/samplers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cqsm/errors.hpp"

namespace cqsm {
namespace {

constexpr double kMinOneMinusAlphaBar = 1e-12;

void require_finite(double a, const char* who, std::size_t step) {
    if (!std::isfinite(a)) {
        throw StepError("sampler", step, std::string(who) + ": non-finite iterate at step " + std::to_string(step));
    }
}

}  // namespace

NoiseSchedule make_schedule(std::vector<double> betas) {
    if (betas.empty()) throw std::invalid_argument("noise schedule must have at least one step");
    NoiseSchedule s;
    s.betas = std::move(betas);
    s.alphas.reserve(s.betas.size());
    s.alpha_bars.reserve(s.betas.size());
    double bar = 1.0;
    for (double b : s.betas) {
        if (!(b >= 0.0 && b < 1.0)) throw std::invalid_argument("noise schedule betas must lie in [0, 1)");
        const double alpha = 1.0 - b;
        bar *= alpha;
        s.alphas.push_back(alpha);
        s.alpha_bars.push_back(bar);
    }
    return s;
}

NoiseSchedule make_linear_schedule(std::size_t t_steps, double beta_start, double beta_end) {
    if (t_steps < 1) throw std::invalid_argument("make_linear_schedule: t_steps must be >= 1");
    if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
        throw std::invalid_argument("make_linear_schedule: require 0 < beta_start <= beta_end < 1");
    }
    std::vector<double> betas(t_steps);
    for (std::size_t t = 0; t < t_steps; ++t) {
        const double frac = t_steps == 1 ? 0.0 : static_cast<double>(t) / static_cast<double>(t_steps - 1);
        betas[t] = beta_start + (beta_end - beta_start) * frac;
    }
    return make_schedule(std::move(betas));
}

NoiseSchedule default_schedule() { return make_linear_schedule(20, 1e-3, 0.19); }

double langevin_sample(const ScoreFn& score, double x, double a0, double dt, std::size_t n_steps,
                       NoiseSource& noise) {
    if (!(dt > 0.0)) throw std::invalid_argument("langevin_sample: dt must be positive");
    if (n_steps < 1) throw std::invalid_argument("langevin_sample: n_steps must be >= 1");
    const double noise_scale = std::sqrt(2.0 * dt);
    double a = a0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        a = a + score(x, a) * dt + noise_scale * noise.gaussian();
        require_finite(a, "langevin_sample", k);
    }
    return a;
}

std::vector<double> langevin_chain(const ScoreFn& score, double x, double a0, std::size_t n_samples,
                                   const LangevinOptions& opt, NoiseSource& noise) {
    if (opt.thin < 1) throw std::invalid_argument("langevin_chain: thin must be >= 1");
    std::vector<double> out;
    out.reserve(n_samples);
    double a = opt.burn_in > 0 ? langevin_sample(score, x, a0, opt.dt, opt.burn_in, noise) : a0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        a = langevin_sample(score, x, a, opt.dt, opt.thin, noise);
        out.push_back(a);
    }
    return out;
}

double ddpm_sample(const ScoreFn& score, double x, const NoiseSchedule& schedule, double a_start,
                   const std::vector<double>& z) {
    const std::size_t n = schedule.size();
    if (n == 0 || schedule.alphas.size() != n || schedule.alpha_bars.size() != n) {
        throw std::invalid_argument("ddpm_sample: malformed schedule");
    }
    if (z.size() != n) throw std::invalid_argument("ddpm_sample: need one variate per step");
    double a = a_start;
    for (std::size_t t = n; t-- > 0;) {
        const double one_minus_bar = 1.0 - schedule.alpha_bars[t];
        const double beta = schedule.betas[t];
        double drift = 0.0;
        if (beta != 0.0) {
            if (one_minus_bar < kMinOneMinusAlphaBar) {
                throw NumericalError("ddpm_sample: 1 - alpha_bar below the division guard");
            }
            drift = beta / std::sqrt(one_minus_bar) * score(x, a);
        }
        a = (a + drift) / std::sqrt(schedule.alphas[t]) + std::sqrt(beta) * z[t];
        require_finite(a, "ddpm_sample", n - 1 - t);
    }
    return a;
}

double ddpm_sample(const ScoreFn& score, double x, const NoiseSchedule& schedule, NoiseSource& noise) {
    const double a_start = noise.gaussian();
    std::vector<double> z(schedule.size());
    for (std::size_t t = z.size(); t-- > 0;) z[t] = noise.gaussian();
    return ddpm_sample(score, x, schedule, a_start, z);
}

}  // namespace cqsm
