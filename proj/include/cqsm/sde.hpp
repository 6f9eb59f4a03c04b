#pragma once

// Euler-Maruyama simulation of the coupled state/action diffusion
//
//   dX = b_X(X, a) dt + sigma_X(X, a) dB^X
//   da = Psi(X, a) dt + sigma_a(X, a) dB^a
//
// with diagonal (per-component) diffusion amplitudes.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cqsm/noise.hpp"

namespace cqsm {

using Vec = std::vector<double>;

using VectorField = std::function<Vec(const Vec& x, const Vec& a)>;
using RewardFn = std::function<double(const Vec& x, const Vec& a)>;

struct DynamicsSpec {
    VectorField state_drift;
    VectorField state_diffusion;
    VectorField action_score;
    VectorField action_diffusion;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<Vec> actions;
    std::vector<double> reward_rates;  // one per transition, left endpoint
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return times.size(); }
    double dt() const noexcept { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

struct StepResult {
    Vec x;
    Vec a;
};

/// One Euler-Maruyama step of the joint system. Throws StepError naming the
/// first field that evaluated to a non-finite value.
StepResult em_step(const Vec& x, const Vec& a, const DynamicsSpec& dyn, double dt,
                   std::span<const double> zx, std::span<const double> za);

/// Rolls out n_steps transitions from (x0, a0). Per step the source is read
/// for dim(x) state variates followed by dim(a) action variates.
Trajectory simulate(const DynamicsSpec& dyn, const RewardFn& reward, const Vec& x0,
                    const Vec& a0, double dt, std::size_t n_steps, std::uint64_t seed);

/// Writes `t,x,a,r` rows (`x0,x1,..` columns when the state is a vector).
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Checks uniform spacing and matching lengths; returns an empty string when valid.
std::string validate_trajectory(const Trajectory& traj);

}  // namespace cqsm
