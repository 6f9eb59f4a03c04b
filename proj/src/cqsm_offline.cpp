#include "cqsm/cqsm_offline.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cqsm/errors.hpp"
#include "cqsm/noise.hpp"

namespace cqsm {
namespace {

double scalar_state(const Trajectory& t, std::size_t k) { return t.states[k][0]; }
double scalar_action(const Trajectory& t, std::size_t k) { return t.actions[k][0]; }

double penalized_reward(const Episode& ep, const ScoreParams& v, double lambda, std::size_t i) {
    const double psi = psi_v(v, scalar_state(ep.trajectory, i), scalar_action(ep.trajectory, i));
    return ep.trajectory.reward_rates[i] - 0.5 * lambda * psi * psi;
}

}  // namespace

Episode make_episode(Trajectory traj, double beta) {
    Episode ep;
    ep.discount_weights.reserve(traj.times.size());
    for (double t : traj.times) ep.discount_weights.push_back(std::exp(-beta * t));
    ep.trajectory = std::move(traj);
    return ep;
}

double episode_return_to_go(const Episode& ep, const QParams& theta, const ScoreParams& v, double lambda,
                            std::size_t k) {
    const std::size_t n = ep.transitions();
    if (k >= n) throw std::out_of_range("episode_return_to_go: k=" + std::to_string(k) + " outside [0, " +
                                        std::to_string(n) + ")");
    const double dt = ep.trajectory.dt();
    double tail = 0.0;
    for (std::size_t i = k; i < n; ++i) tail += ep.discount_weights[i] * penalized_reward(ep, v, lambda, i) * dt;
    const double q = q_theta(theta, scalar_state(ep.trajectory, k), scalar_action(ep.trajectory, k));
    return -ep.discount_weights[k] * q + tail;
}

std::vector<double> returns_to_go(const Episode& ep, const QParams& theta, const ScoreParams& v, double lambda) {
    const std::size_t n = ep.transitions();
    std::vector<double> g(n);
    const double dt = ep.trajectory.dt();
    double tail = 0.0;
    for (std::size_t k = n; k-- > 0;) {
        tail += ep.discount_weights[k] * penalized_reward(ep, v, lambda, k) * dt;
        const double q = q_theta(theta, scalar_state(ep.trajectory, k), scalar_action(ep.trajectory, k));
        g[k] = -ep.discount_weights[k] * q + tail;
    }
    return g;
}

OfflineParams offline_update(const Episode& ep, const QParams& theta, const ScoreParams& v, const AlgoConfig& cfg,
                             std::size_t episode_index) {
    OfflineParams out{theta, v};
    const std::size_t n = ep.transitions();
    if (n == 0) return out;

    const double dt = ep.trajectory.dt();
    const std::vector<double> g = returns_to_go(ep, theta, v, cfg.lambda);

    std::array<double, 6> d_theta{};
    std::array<double, 3> d_v{};
    std::array<double, 3> score_tail{};  // sum_{i >= k} lambda Psi dPsi/dv dt
    for (std::size_t k = n; k-- > 0;) {
        const double x = scalar_state(ep.trajectory, k);
        const double a = scalar_action(ep.trajectory, k);
        const auto dpsi = grad_v_psi(v, x, a);
        const double psi = psi_v(v, x, a);
        for (std::size_t j = 0; j < 3; ++j) score_tail[j] += cfg.lambda * psi * dpsi[j] * dt;

        const auto xi = grad_theta_q(theta, x, a);
        for (std::size_t j = 0; j < 6; ++j) d_theta[j] += xi[j] * g[k] * dt;
        for (std::size_t j = 0; j < 3; ++j) d_v[j] += score_tail[j] * g[k] * dt;
    }

    const double lr = lr_schedule(static_cast<double>(episode_index));
    for (std::size_t j = 0; j < 6; ++j) out.theta[j] += lr * cfg.alpha_theta * d_theta[j];
    for (std::size_t j = 0; j < 3; ++j) out.v[j] += lr * cfg.alpha_v * d_v[j];

    auto ok = [](double e) { return std::isfinite(e) && std::abs(e) <= kDivergenceBound; };
    for (double e : out.theta.theta) {
        if (!ok(e)) throw DivergenceError(episode_index, g.front(), "offline CQSM diverged at episode " + std::to_string(episode_index));
    }
    for (double e : out.v.v) {
        if (!ok(e)) throw DivergenceError(episode_index, g.front(), "offline CQSM diverged at episode " + std::to_string(episode_index));
    }
    return out;
}

std::array<double, 3> score_gradient_residual(const QParams& theta, const ScoreParams& v, double lambda,
                                              const Episode& ep) {
    std::array<double, 3> acc{};
    const std::size_t n = ep.transitions();
    const double dt = ep.trajectory.dt();
    for (std::size_t k = 0; k < n; ++k) {
        const double x = scalar_state(ep.trajectory, k);
        const double a = scalar_action(ep.trajectory, k);
        const double mismatch = grad_a_q(theta, x, a) - lambda * psi_v(v, x, a);
        const auto dpsi = grad_v_psi(v, x, a);
        for (std::size_t j = 0; j < 3; ++j) acc[j] += ep.discount_weights[k] * mismatch * dpsi[j] * dt;
    }
    return acc;
}

LearningRecord run_offline(const AlgoConfig& cfg, const LqParams& p, const QParams& theta0, const ScoreParams& v0,
                           std::size_t n_episodes) {
    validate(cfg);
    validate(p);
    const ActionSampler sampler(cfg.sampler, cfg.dt);

    QParams theta = theta0;
    ScoreParams v = v0;
    LearningRecord rec;
    RecordRow first;
    first.theta = theta;
    first.v = v;
    rec.rows.push_back(first);

    double sum_episode_avg = 0.0;
    for (std::size_t j = 1; j <= n_episodes; ++j) {
        const ScoreFn score = [v](double x, double a) { return psi_v(v, x, a); };
        Episode ep = make_episode(
            rollout_lq(p, score, sampler, cfg.x0, cfg.a0, cfg.dt, cfg.n_steps, derive_seed(cfg.seed, j)), cfg.beta);

        double mean_rate = 0.0;
        for (double r : ep.trajectory.reward_rates) mean_rate += r;
        if (ep.transitions() > 0) mean_rate /= static_cast<double>(ep.transitions());
        sum_episode_avg += mean_rate;

        const OfflineParams next = offline_update(ep, theta, v, cfg, j);
        theta = next.theta;
        v = next.v;

        if (j % cfg.record_every == 0 || j == n_episodes) {
            RecordRow row;
            row.step = j;
            row.t = static_cast<double>(j) * cfg.horizon();
            row.theta = theta;
            row.v = v;
            row.reward_rate = mean_rate;
            row.running_avg_reward = sum_episode_avg / static_cast<double>(j);
            rec.rows.push_back(row);
        }
    }
    rec.final_theta = theta;
    rec.final_v = v;
    rec.steps_completed = n_episodes;
    rec.final_running_avg_reward = n_episodes > 0 ? sum_episode_avg / static_cast<double>(n_episodes) : 0.0;
    return rec;
}

}  // namespace cqsm
