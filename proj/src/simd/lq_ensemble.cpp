#include "cqsm/simd/lq_ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cqsm/errors.hpp"
#include "cqsm/noise.hpp"

namespace cqsm::simd {
namespace {

constexpr std::size_t kBlock = 256;

struct Block {
    std::vector<NoiseSource> noise;
    std::vector<double> x, a, zx, za, pen;

    Block(const EnsembleSpec& spec, std::size_t first, std::size_t count) {
        noise.reserve(count);
        for (std::size_t j = 0; j < count; ++j) noise.emplace_back(derive_seed(spec.base_seed, first + j));
        x.assign(count, spec.x0);
        a.assign(count, spec.a0);
        zx.resize(count);
        za.resize(count);
        pen.resize(count);
    }

    void draw() {
        for (std::size_t j = 0; j < noise.size(); ++j) {
            zx[j] = noise[j].gaussian();
            za[j] = noise[j].gaussian();
        }
    }

    void check_finite(std::size_t step) const {
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (!std::isfinite(x[j]) || !std::isfinite(a[j])) {
                throw StepError("ensemble", step, "non-finite ensemble path at step " + std::to_string(step));
            }
        }
    }
};

void check_spec(const EnsembleSpec& spec) {
    if (!(spec.dt > 0.0)) throw std::invalid_argument("ensemble: dt must be positive");
    validate(spec.params);
}

}  // namespace

LaneModel lane_model(const LqParams& p, const LinearScore& s, double sigma_a) {
    return {p.A, p.B, p.C, p.D, s.a_coef, s.x_coef, s.constant, sigma_a, p.M, p.N, p.R, p.P, p.Pp, p.lambda};
}

std::vector<double> discounted_returns(const EnsembleSpec& spec, Backend backend) {
    check_spec(spec);
    const KernelTable& k = kernels(backend);
    const LaneModel model = lane_model(spec.params, spec.score, spec.sigma_a);
    const double sqrt_dt = std::sqrt(spec.dt);

    std::vector<double> out(spec.n_paths, 0.0);
    for (std::size_t first = 0; first < spec.n_paths; first += kBlock) {
        const std::size_t count = std::min(kBlock, spec.n_paths - first);
        Block b(spec, first, count);
        double* acc = out.data() + first;
        for (std::size_t step = 0; step < spec.n_steps; ++step) {
            b.draw();
            k.lq_step(model, spec.dt, sqrt_dt, b.x.data(), b.a.data(), b.zx.data(), b.za.data(), b.pen.data(), count);
            const double w = std::exp(-spec.params.beta * (static_cast<double>(step) * spec.dt));
            k.scaled_accumulate(acc, b.pen.data(), w * spec.dt, count);
        }
        b.check_finite(spec.n_steps);
    }
    return out;
}

std::vector<double> orthogonality_sums(const EnsembleSpec& spec, const KCoefficients& q, TestFeature xi,
                                       Backend backend) {
    check_spec(spec);
    if (xi.index > 5) throw std::invalid_argument("orthogonality_sums: feature index out of range");
    const KernelTable& k = kernels(backend);
    const LaneModel model = lane_model(spec.params, spec.score, spec.sigma_a);
    const double sqrt_dt = std::sqrt(spec.dt);
    const auto qc = q.as_array();
    std::array<double, 6> feature{};
    if (xi.index >= 0) feature[static_cast<std::size_t>(xi.index)] = 1.0;

    std::vector<double> out(spec.n_paths, 0.0);
    for (std::size_t first = 0; first < spec.n_paths; first += kBlock) {
        const std::size_t count = std::min(kBlock, spec.n_paths - first);
        Block b(spec, first, count);
        std::vector<double> q_prev(count), q_next(count), xi_vals(count, 1.0);
        double* acc = out.data() + first;
        k.quad_eval(qc.data(), b.x.data(), b.a.data(), q_prev.data(), count);
        for (std::size_t step = 0; step < spec.n_steps; ++step) {
            if (xi.index >= 0) k.quad_eval(feature.data(), b.x.data(), b.a.data(), xi_vals.data(), count);
            b.draw();
            k.lq_step(model, spec.dt, sqrt_dt, b.x.data(), b.a.data(), b.zx.data(), b.za.data(), b.pen.data(), count);
            k.quad_eval(qc.data(), b.x.data(), b.a.data(), q_next.data(), count);
            const double w_prev = std::exp(-spec.params.beta * (static_cast<double>(step) * spec.dt));
            const double w_next = std::exp(-spec.params.beta * (static_cast<double>(step + 1) * spec.dt));
            k.martingale_accumulate(acc, xi_vals.data(), q_prev.data(), q_next.data(), b.pen.data(), w_prev, w_next,
                                    spec.dt, count);
            std::swap(q_prev, q_next);
        }
        b.check_finite(spec.n_steps);
    }
    return out;
}

}  // namespace cqsm::simd
