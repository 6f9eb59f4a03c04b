#include "cqsm/cqsm_online.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "cqsm/csv.hpp"
#include "cqsm/errors.hpp"

namespace cqsm {
namespace {

bool within_bound(const QParams& th, const ScoreParams& v) {
    auto ok = [](double e) { return std::isfinite(e) && std::abs(e) <= kDivergenceBound; };
    return std::all_of(th.theta.begin(), th.theta.end(), ok) && std::all_of(v.v.begin(), v.v.end(), ok);
}

ScoreFn score_of(const ScoreParams& v) {
    return [v](double x, double a) { return psi_v(v, x, a); };
}

RecordRow make_row(const LearnState& s, double dt) {
    RecordRow row;
    row.step = s.step;
    row.t = static_cast<double>(s.step) * dt;
    row.theta = s.theta;
    row.v = s.v;
    if (s.step > 0) {
        row.reward_rate = s.last_reward_rate;
        row.running_avg_reward = s.cumulative_reward / (static_cast<double>(s.step) * dt);
    }
    return row;
}

}  // namespace

void validate(const AlgoConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw ConfigError("algo.dt must be positive");
    if (!(cfg.alpha_theta > 0.0) || !(cfg.alpha_v > 0.0)) {
        throw ConfigError("algo.alpha_theta and algo.alpha_v must be positive");
    }
    if (!(cfg.beta > 0.0)) throw ConfigError("algo.beta must be positive");
    if (!(cfg.lambda > 0.0)) throw ConfigError("algo.lambda must be positive");
    if (cfg.record_every < 1) throw ConfigError("algo.record_every must be >= 1");
    if (!std::isfinite(cfg.x0) || !std::isfinite(cfg.a0)) throw ConfigError("algo.x0 and algo.a0 must be finite");
    if (!(cfg.sampler.langevin_dt > 0.0) || cfg.sampler.langevin_steps < 1) {
        throw ConfigError("sampler Langevin settings must be positive");
    }
    if (cfg.sampler.ddpm_steps < 1 || !(cfg.sampler.ddpm_beta_start > 0.0) ||
        !(cfg.sampler.ddpm_beta_start <= cfg.sampler.ddpm_beta_end) || !(cfg.sampler.ddpm_beta_end < 1.0)) {
        throw ConfigError("sampler DDPM schedule requires 0 < beta_start <= beta_end < 1");
    }
}

double lr_schedule(double t) noexcept {
    const double log_t = t > 1.0 ? std::log(t) : 0.0;
    return 1.0 / std::max(1.0, std::sqrt(log_t));
}

double td_delta(const QParams& theta, const ScoreParams& v, double x, double a, double x_next, double a_next,
                double r, double dt, double beta, double lambda) noexcept {
    const double q = q_theta(theta, x, a);
    const double psi = psi_v(v, x, a);
    return q_theta(theta, x_next, a_next) - q + r * dt - 0.5 * lambda * psi * psi * dt - beta * q * dt;
}

Increments cqsm_increments(const QParams& theta, const ScoreParams& v, double x, double a, double delta,
                           double lambda) noexcept {
    Increments inc{};
    const auto xi = grad_theta_q(theta, x, a);
    for (std::size_t i = 0; i < 6; ++i) inc.d_theta[i] = xi[i] * delta;
    const double mismatch = grad_a_q(theta, x, a) / lambda - psi_v(v, x, a);
    const auto dpsi = grad_v_psi(v, x, a);
    for (std::size_t i = 0; i < 3; ++i) inc.d_v[i] = mismatch * dpsi[i];
    return inc;
}

EnvFn lq_environment(const LqParams& p, double dt) {
    return [p, dt](double x, double a, NoiseSource& noise) { return env_step(p, x, a, dt, noise); };
}

LearnState cqsm_step(const LearnState& state, const AlgoConfig& cfg, const EnvFn& env, const ActionSampler& sampler,
                     NoiseSource& noise) {
    const double x = state.x;
    const double a = state.a;
    const EnvTransition tr = env(x, a, noise);
    const double a_next = sampler.next(score_of(state.v), x, a, tr.x_next, noise);

    const double delta = td_delta(state.theta, state.v, x, a, tr.x_next, a_next, tr.reward_rate, cfg.dt, cfg.beta,
                                  cfg.lambda);
    const Increments inc = cqsm_increments(state.theta, state.v, x, a, delta, cfg.lambda);
    const double lr = lr_schedule(static_cast<double>(state.step) * cfg.dt);

    LearnState next = state;
    for (std::size_t i = 0; i < 6; ++i) next.theta[i] += lr * cfg.alpha_theta * inc.d_theta[i];
    for (std::size_t i = 0; i < 3; ++i) next.v[i] += lr * cfg.alpha_v * inc.d_v[i];
    next.x = tr.x_next;
    next.a = a_next;
    next.step = state.step + 1;
    next.cumulative_reward = state.cumulative_reward + tr.reward_rate * cfg.dt;
    next.last_reward_rate = tr.reward_rate;
    next.last_delta = delta;

    if (!within_bound(next.theta, next.v)) {
        std::ostringstream msg;
        msg << "CQSM diverged at step " << state.step << " (last TD error " << delta << ")";
        throw DivergenceError(state.step, delta, msg.str());
    }
    return next;
}

LearnState cqsm_step(const LearnState& state, const AlgoConfig& cfg, const EnvFn& env, NoiseSource& noise) {
    const ActionSampler sampler(cfg.sampler, cfg.dt);
    return cqsm_step(state, cfg, env, sampler, noise);
}

LearningRecord run_cqsm(const AlgoConfig& cfg, const LqParams& p, const QParams& theta0, const ScoreParams& v0) {
    validate(cfg);
    validate(p);
    if (!theta0.finite() || !v0.finite()) throw ConfigError("initial parameters must be finite");

    NoiseSource noise(cfg.seed);
    const ActionSampler sampler(cfg.sampler, cfg.dt);
    const EnvFn env = lq_environment(p, cfg.dt);

    LearnState s;
    s.theta = theta0;
    s.v = v0;
    s.x = cfg.x0;
    s.a = sampler.initial(score_of(v0), cfg.x0, cfg.a0, noise);

    LearningRecord rec;
    rec.rows.push_back(make_row(s, cfg.dt));
    for (std::size_t k = 0; k < cfg.n_steps; ++k) {
        s = cqsm_step(s, cfg, env, sampler, noise);
        if (s.step % cfg.record_every == 0 || s.step == cfg.n_steps) rec.rows.push_back(make_row(s, cfg.dt));
    }
    rec.final_theta = s.theta;
    rec.final_v = s.v;
    rec.steps_completed = s.step;
    rec.final_running_avg_reward = s.step > 0 ? s.cumulative_reward / (static_cast<double>(s.step) * cfg.dt) : 0.0;
    return rec;
}

void write_learning_record_csv(std::ostream& os, const LearningRecord& rec) {
    CsvWriter csv(os);
    csv.header({"step", "t", "theta0", "theta1", "theta2", "theta3", "theta4", "theta5", "v0", "v1", "v2",
                "reward_rate", "running_avg_reward"});
    for (const RecordRow& row : rec.rows) {
        csv.field(static_cast<long long>(row.step));
        csv.field(row.t);
        for (double t : row.theta.theta) csv.field(t);
        for (double v : row.v.v) csv.field(v);
        if (row.reward_rate) csv.field(*row.reward_rate);
        else csv.empty_field();
        if (row.running_avg_reward) csv.field(*row.running_avg_reward);
        else csv.empty_field();
        csv.end_row();
    }
}

}  // namespace cqsm
