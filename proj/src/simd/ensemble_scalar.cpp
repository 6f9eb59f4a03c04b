#include "cqsm/simd/kernels.hpp"

namespace cqsm::simd {
namespace {

void lq_step(const LaneModel& m, double dt, double sqrt_dt, double* x, double* a, const double* zx,
             const double* za, double* pen, std::size_t n) {
    const double half_m = 0.5 * m.M;
    const double half_n = 0.5 * m.N;
    const double half_l = 0.5 * m.lambda;
    const double noise_a = m.sigma_a * sqrt_dt;
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        const double ai = a[i];
        const double psi = m.score_a * ai + m.score_x * xi + m.score_c;
        const double r = -(half_m * xi * xi + m.R * xi * ai + half_n * ai * ai + m.P * xi + m.Pp * ai);
        pen[i] = r - half_l * psi * psi;
        const double drift = m.A * xi + m.B * ai;
        const double diff = m.C * xi + m.D * ai;
        x[i] = xi + (drift * dt + diff * sqrt_dt * zx[i]);
        a[i] = ai + (psi * dt + noise_a * za[i]);
    }
}

void quad_eval(const double* c, const double* x, const double* a, double* out, std::size_t n) {
    const double h0 = 0.5 * c[0];
    const double h2 = 0.5 * c[2];
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        const double ai = a[i];
        out[i] = h0 * xi * xi + c[1] * xi + h2 * ai * ai + c[3] * ai + c[4] * xi * ai + c[5];
    }
}

void martingale_accumulate(double* acc, const double* xi, const double* q_prev, const double* q_next,
                           const double* pen, double w_prev, double w_next, double dt, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        acc[i] += xi[i] * (w_next * q_next[i] - w_prev * q_prev[i] + w_prev * pen[i] * dt);
    }
}

void scaled_accumulate(double* acc, const double* v, double w, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += w * v[i];
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
    static const KernelTable table{"scalar", lq_step, quad_eval, martingale_accumulate, scaled_accumulate};
    return table;
}

}  // namespace cqsm::simd
