#include "cqsm/martingale.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "cqsm/csv.hpp"
#include "cqsm/errors.hpp"
#include "cqsm/noise.hpp"
#include "cqsm/stats.hpp"

namespace cqsm {
namespace {

void check_traj_count(std::size_t n_traj) {
    if (n_traj < 2) throw ConfigError("martingale diagnostics need at least 2 trajectories");
}

}  // namespace

TestFn constant_test() {
    return [](const Trajectory&, std::size_t) { return 1.0; };
}

TestFn critic_feature_test(std::size_t i) {
    if (i > 5) throw std::invalid_argument("critic_feature_test: index must be in [0, 5]");
    return [i](const Trajectory& t, std::size_t k) { return grad_theta_q(QParams{}, t.states[k][0], t.actions[k][0])[i]; };
}

TestFn lagged_state_test(std::size_t lag, int power) {
    return [lag, power](const Trajectory& t, std::size_t k) {
        if (k < lag) return 0.0;
        return std::pow(t.states[k - lag][0], power);
    };
}

std::vector<double> orthogonality_sums(const QFn& qfun, const ScoreFn& score, const TestFn& test_fn,
                                       const LqParams& p, const AlgoConfig& cfg, std::size_t n_traj) {
    validate(p);
    const ActionSampler sampler(cfg.sampler, cfg.dt);
    std::vector<double> sums;
    sums.reserve(n_traj);
    for (std::size_t j = 0; j < n_traj; ++j) {
        const Trajectory traj =
            rollout_lq(p, score, sampler, cfg.x0, cfg.a0, cfg.dt, cfg.n_steps, derive_seed(cfg.seed, j));
        double acc = 0.0;
        double q_prev = qfun(traj.states[0][0], traj.actions[0][0]);
        for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
            const double x = traj.states[k][0];
            const double a = traj.actions[k][0];
            const double xi = test_fn(traj, k);
            const double psi = score(x, a);
            const double pen = traj.reward_rates[k] - 0.5 * p.lambda * psi * psi;
            const double q_next = qfun(traj.states[k + 1][0], traj.actions[k + 1][0]);
            const double w_prev = std::exp(-p.beta * (static_cast<double>(k) * cfg.dt));
            const double w_next = std::exp(-p.beta * (static_cast<double>(k + 1) * cfg.dt));
            acc += xi * (w_next * q_next - w_prev * q_prev + w_prev * pen * cfg.dt);
            q_prev = q_next;
        }
        sums.push_back(acc);
    }
    return sums;
}

ResidualReport make_report(std::span<const double> per_path) {
    ResidualReport r;
    r.n_trajectories = per_path.size();
    r.estimate = mean(per_path);
    r.std_error = jackknife_se(per_path);
    r.z_score = r.std_error > 0.0 ? r.estimate / r.std_error : 0.0;
    return r;
}

ResidualReport orthogonality_residual(const QFn& qfun, const ScoreFn& score, const TestFn& test_fn,
                                      const LqParams& p, const AlgoConfig& cfg, std::size_t n_traj) {
    check_traj_count(n_traj);
    const auto sums = orthogonality_sums(qfun, score, test_fn, p, cfg, n_traj);
    return make_report(sums);
}

ResidualReport orthogonality_residual_lq(const KCoefficients& q, const LinearScore& score, simd::TestFeature xi,
                                         const LqParams& p, const AlgoConfig& cfg, std::size_t n_traj,
                                         simd::Backend backend) {
    check_traj_count(n_traj);
    if (cfg.sampler.kind != SamplerKind::direct_sde) {
        throw ConfigError("the batched martingale check requires the direct_sde sampler");
    }
    simd::EnsembleSpec spec;
    spec.params = p;
    spec.score = score;
    spec.sigma_a = cfg.sampler.sigma_a;
    spec.dt = cfg.dt;
    spec.n_steps = cfg.n_steps;
    spec.x0 = cfg.x0;
    spec.a0 = cfg.a0;
    spec.base_seed = cfg.seed;
    spec.n_paths = n_traj;
    const auto sums = simd::orthogonality_sums(spec, q, xi, backend);
    return make_report(sums);
}

double martingale_loss(const QFn& qfun, const ScoreFn& score, const LqParams& p, const AlgoConfig& cfg,
                       std::size_t n_traj) {
    check_traj_count(n_traj);
    validate(p);
    const ActionSampler sampler(cfg.sampler, cfg.dt);
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t j = 0; j < n_traj; ++j) {
        const Trajectory traj =
            rollout_lq(p, score, sampler, cfg.x0, cfg.a0, cfg.dt, cfg.n_steps, derive_seed(cfg.seed, j));
        const std::size_t n = traj.reward_rates.size();
        double tail = 0.0;
        for (std::size_t k = n; k-- > 0;) {
            const double x = traj.states[k][0];
            const double a = traj.actions[k][0];
            const double w = std::exp(-p.beta * (static_cast<double>(k) * cfg.dt));
            const double psi = score(x, a);
            tail += w * (traj.reward_rates[k] - 0.5 * p.lambda * psi * psi) * cfg.dt;
            const double g = -w * qfun(x, a) + tail;
            total += g * g * cfg.dt;
            ++count;
        }
    }
    return count > 0 ? 0.5 * total / static_cast<double>(count) : 0.0;
}

void print_report(std::ostream& os, const ResidualReport& r) {
    os << "estimate:       " << format_real(r.estimate) << '\n'
       << "std_error:      " << format_real(r.std_error) << '\n'
       << "n_trajectories: " << r.n_trajectories << '\n'
       << "z_score:        " << format_real(r.z_score) << '\n';
}

void write_report_csv(std::ostream& os, const ResidualReport& r) {
    CsvWriter csv(os);
    csv.header({"estimate", "std_error", "n_trajectories", "z_score"});
    csv.field(r.estimate);
    csv.field(r.std_error);
    csv.field(static_cast<long long>(r.n_trajectories));
    csv.field(r.z_score);
    csv.end_row();
}

}  // namespace cqsm
