#include "cqsm/sde.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "cqsm/csv.hpp"
#include "cqsm/errors.hpp"

namespace cqsm {
namespace {

void require_finite(const Vec& v, const char* field, std::size_t step) {
    for (double e : v) {
        if (!std::isfinite(e)) {
            std::ostringstream msg;
            msg << "non-finite " << field << " at step " << step;
            throw StepError(field, step, msg.str());
        }
    }
}

void require_dim(const Vec& v, std::size_t n, const char* field) {
    if (v.size() != n) {
        throw std::invalid_argument(std::string(field) + ": dimension mismatch");
    }
}

StepResult step_impl(const Vec& x, const Vec& a, const DynamicsSpec& dyn, double dt,
                     std::span<const double> zx, std::span<const double> za, std::size_t step) {
    if (!(dt > 0.0)) throw std::invalid_argument("em_step: dt must be positive");
    if (zx.size() != x.size() || za.size() != a.size()) {
        throw std::invalid_argument("em_step: noise dimension mismatch");
    }

    const Vec bx = dyn.state_drift(x, a);
    require_finite(bx, "state_drift", step);
    require_dim(bx, x.size(), "state_drift");
    const Vec sx = dyn.state_diffusion(x, a);
    require_finite(sx, "state_diffusion", step);
    require_dim(sx, x.size(), "state_diffusion");
    const Vec psi = dyn.action_score(x, a);
    require_finite(psi, "action_score", step);
    require_dim(psi, a.size(), "action_score");
    const Vec sa = dyn.action_diffusion(x, a);
    require_finite(sa, "action_diffusion", step);
    require_dim(sa, a.size(), "action_diffusion");

    const double sqrt_dt = std::sqrt(dt);
    StepResult out{x, a};
    for (std::size_t i = 0; i < x.size(); ++i) out.x[i] += bx[i] * dt + sx[i] * sqrt_dt * zx[i];
    for (std::size_t i = 0; i < a.size(); ++i) out.a[i] += psi[i] * dt + sa[i] * sqrt_dt * za[i];
    require_finite(out.x, "state", step);
    require_finite(out.a, "action", step);
    return out;
}

}  // namespace

StepResult em_step(const Vec& x, const Vec& a, const DynamicsSpec& dyn, double dt,
                   std::span<const double> zx, std::span<const double> za) {
    return step_impl(x, a, dyn, dt, zx, za, 0);
}

Trajectory simulate(const DynamicsSpec& dyn, const RewardFn& reward, const Vec& x0,
                    const Vec& a0, double dt, std::size_t n_steps, std::uint64_t seed) {
    if (!(dt > 0.0)) throw std::invalid_argument("simulate: dt must be positive");
    if (n_steps < 1) throw std::invalid_argument("simulate: n_steps must be >= 1");

    NoiseSource noise(seed);
    Trajectory traj;
    traj.seed = seed;
    traj.times.reserve(n_steps + 1);
    traj.states.reserve(n_steps + 1);
    traj.actions.reserve(n_steps + 1);
    traj.reward_rates.reserve(n_steps);

    traj.times.push_back(0.0);
    traj.states.push_back(x0);
    traj.actions.push_back(a0);

    Vec zx(x0.size()), za(a0.size());
    for (std::size_t k = 0; k < n_steps; ++k) {
        const Vec& x = traj.states.back();
        const Vec& a = traj.actions.back();
        const double r = reward(x, a);
        if (!std::isfinite(r)) throw StepError("reward", k, "non-finite reward at step " + std::to_string(k));
        noise.fill_gaussian(zx);
        noise.fill_gaussian(za);
        StepResult next = step_impl(x, a, dyn, dt, zx, za, k);
        traj.reward_rates.push_back(r);
        traj.times.push_back(static_cast<double>(k + 1) * dt);
        traj.states.push_back(std::move(next.x));
        traj.actions.push_back(std::move(next.a));
    }
    return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    const std::size_t nx = traj.states.empty() ? 1 : traj.states.front().size();
    const std::size_t na = traj.actions.empty() ? 1 : traj.actions.front().size();
    CsvWriter csv(os);
    std::vector<std::string> header{"t"};
    if (nx == 1) header.emplace_back("x");
    else for (std::size_t i = 0; i < nx; ++i) header.push_back("x" + std::to_string(i));
    if (na == 1) header.emplace_back("a");
    else for (std::size_t i = 0; i < na; ++i) header.push_back("a" + std::to_string(i));
    header.emplace_back("r");
    csv.header(header);

    for (std::size_t k = 0; k < traj.size(); ++k) {
        csv.field(traj.times[k]);
        for (double v : traj.states[k]) csv.field(v);
        for (double v : traj.actions[k]) csv.field(v);
        if (k < traj.reward_rates.size()) csv.field(traj.reward_rates[k]);
        else csv.empty_field();
        csv.end_row();
    }
}

std::string validate_trajectory(const Trajectory& traj) {
    const std::size_t n = traj.times.size();
    if (n == 0) return "empty trajectory";
    if (traj.states.size() != n || traj.actions.size() != n) return "states/actions length mismatch";
    if (traj.reward_rates.size() + 1 != n) return "reward_rates must have one entry per transition";
    if (n > 1) {
        const double dt = traj.times[1] - traj.times[0];
        if (!(dt > 0.0)) return "non-positive spacing";
        for (std::size_t k = 1; k < n; ++k) {
            const double step = traj.times[k] - traj.times[k - 1];
            if (!(step > 0.0) || std::abs(step - dt) > 1e-9 * std::max(1.0, std::abs(traj.times[k]))) {
                return "non-uniform spacing at index " + std::to_string(k);
            }
        }
    }
    return {};
}

}  // namespace cqsm
