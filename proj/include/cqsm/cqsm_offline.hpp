#pragma once

// Episodic Q-score matching by the martingale loss. Each episode is rolled
// out under the current score, then swept backwards to form the discounted
// returns-to-go
//   G_k = -e^{-beta t_k} Q(x_k, a_k) + sum_{i >= k} e^{-beta t_i} (r_i - lambda/2 Psi_i^2) dt.

#include <array>
#include <vector>

#include "cqsm/cqsm_online.hpp"
#include "cqsm/sde.hpp"

namespace cqsm {

struct Episode {
    Trajectory trajectory;
    std::vector<double> discount_weights;  // e^{-beta t_k}

    std::size_t transitions() const noexcept { return trajectory.reward_rates.size(); }
};

Episode make_episode(Trajectory traj, double beta);

/// G_{t_k:T} for a single k in [0, K). Throws std::out_of_range otherwise.
double episode_return_to_go(const Episode& ep, const QParams& theta, const ScoreParams& v, double lambda,
                            std::size_t k);

/// All G_{t_k:T}, k = 0..K-1, by one suffix sweep.
std::vector<double> returns_to_go(const Episode& ep, const QParams& theta, const ScoreParams& v, double lambda);

struct OfflineParams {
    QParams theta;
    ScoreParams v;
};

/// One full-episode gradient step with learning-rate factor lr_schedule(episode_index).
/// Throws DivergenceError on non-finite results.
OfflineParams offline_update(const Episode& ep, const QParams& theta, const ScoreParams& v, const AlgoConfig& cfg,
                             std::size_t episode_index);

/// sum_k e^{-beta t_k} (dQ/da - lambda Psi^v) dPsi^v/dv dt along the episode.
std::array<double, 3> score_gradient_residual(const QParams& theta, const ScoreParams& v, double lambda,
                                              const Episode& ep);

/// cfg.n_steps is the episode length K; episode j (1-based) uses seed
/// derive_seed(cfg.seed, j). Rows report per-episode mean reward rate.
LearningRecord run_offline(const AlgoConfig& cfg, const LqParams& p, const QParams& theta0, const ScoreParams& v0,
                           std::size_t n_episodes);

}  // namespace cqsm
