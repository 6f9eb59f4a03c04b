// Compiled with -mavx2 -mno-fma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "cqsm/simd/kernels.hpp"

namespace cqsm::simd {
namespace {

constexpr std::size_t kWidth = 4;

void lq_step(const LaneModel& m, double dt, double sqrt_dt, double* x, double* a, const double* zx,
             const double* za, double* pen, std::size_t n) {
    const __m256d v_half_m = _mm256_set1_pd(0.5 * m.M);
    const __m256d v_half_n = _mm256_set1_pd(0.5 * m.N);
    const __m256d v_half_l = _mm256_set1_pd(0.5 * m.lambda);
    const __m256d v_noise_a = _mm256_set1_pd(m.sigma_a * sqrt_dt);
    const __m256d v_sa = _mm256_set1_pd(m.score_a);
    const __m256d v_sx = _mm256_set1_pd(m.score_x);
    const __m256d v_sc = _mm256_set1_pd(m.score_c);
    const __m256d v_r = _mm256_set1_pd(m.R);
    const __m256d v_p = _mm256_set1_pd(m.P);
    const __m256d v_pp = _mm256_set1_pd(m.Pp);
    const __m256d v_a = _mm256_set1_pd(m.A);
    const __m256d v_b = _mm256_set1_pd(m.B);
    const __m256d v_c = _mm256_set1_pd(m.C);
    const __m256d v_d = _mm256_set1_pd(m.D);
    const __m256d v_dt = _mm256_set1_pd(dt);
    const __m256d v_sqdt = _mm256_set1_pd(sqrt_dt);
    const __m256d v_sign = _mm256_set1_pd(-0.0);

    std::size_t i = 0;
    for (; i + kWidth <= n; i += kWidth) {
        const __m256d xi = _mm256_loadu_pd(x + i);
        const __m256d ai = _mm256_loadu_pd(a + i);

        const __m256d psi = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(v_sa, ai), _mm256_mul_pd(v_sx, xi)), v_sc);

        __m256d quad = _mm256_mul_pd(_mm256_mul_pd(v_half_m, xi), xi);
        quad = _mm256_add_pd(quad, _mm256_mul_pd(_mm256_mul_pd(v_r, xi), ai));
        quad = _mm256_add_pd(quad, _mm256_mul_pd(_mm256_mul_pd(v_half_n, ai), ai));
        quad = _mm256_add_pd(quad, _mm256_mul_pd(v_p, xi));
        quad = _mm256_add_pd(quad, _mm256_mul_pd(v_pp, ai));
        const __m256d r = _mm256_xor_pd(quad, v_sign);
        const __m256d penalty = _mm256_mul_pd(_mm256_mul_pd(v_half_l, psi), psi);
        _mm256_storeu_pd(pen + i, _mm256_sub_pd(r, penalty));

        const __m256d drift = _mm256_add_pd(_mm256_mul_pd(v_a, xi), _mm256_mul_pd(v_b, ai));
        const __m256d diff = _mm256_add_pd(_mm256_mul_pd(v_c, xi), _mm256_mul_pd(v_d, ai));
        const __m256d x_inc = _mm256_add_pd(_mm256_mul_pd(drift, v_dt),
                                            _mm256_mul_pd(_mm256_mul_pd(diff, v_sqdt), _mm256_loadu_pd(zx + i)));
        const __m256d a_inc = _mm256_add_pd(_mm256_mul_pd(psi, v_dt), _mm256_mul_pd(v_noise_a, _mm256_loadu_pd(za + i)));
        _mm256_storeu_pd(x + i, _mm256_add_pd(xi, x_inc));
        _mm256_storeu_pd(a + i, _mm256_add_pd(ai, a_inc));
    }
    if (i < n) scalar_kernels().lq_step(m, dt, sqrt_dt, x + i, a + i, zx + i, za + i, pen + i, n - i);
}

void quad_eval(const double* c, const double* x, const double* a, double* out, std::size_t n) {
    const __m256d h0 = _mm256_set1_pd(0.5 * c[0]);
    const __m256d c1 = _mm256_set1_pd(c[1]);
    const __m256d h2 = _mm256_set1_pd(0.5 * c[2]);
    const __m256d c3 = _mm256_set1_pd(c[3]);
    const __m256d c4 = _mm256_set1_pd(c[4]);
    const __m256d c5 = _mm256_set1_pd(c[5]);
    std::size_t i = 0;
    for (; i + kWidth <= n; i += kWidth) {
        const __m256d xi = _mm256_loadu_pd(x + i);
        const __m256d ai = _mm256_loadu_pd(a + i);
        __m256d q = _mm256_mul_pd(_mm256_mul_pd(h0, xi), xi);
        q = _mm256_add_pd(q, _mm256_mul_pd(c1, xi));
        q = _mm256_add_pd(q, _mm256_mul_pd(_mm256_mul_pd(h2, ai), ai));
        q = _mm256_add_pd(q, _mm256_mul_pd(c3, ai));
        q = _mm256_add_pd(q, _mm256_mul_pd(_mm256_mul_pd(c4, xi), ai));
        q = _mm256_add_pd(q, c5);
        _mm256_storeu_pd(out + i, q);
    }
    if (i < n) scalar_kernels().quad_eval(c, x + i, a + i, out + i, n - i);
}

void martingale_accumulate(double* acc, const double* xi, const double* q_prev, const double* q_next,
                           const double* pen, double w_prev, double w_next, double dt, std::size_t n) {
    const __m256d wp = _mm256_set1_pd(w_prev);
    const __m256d wn = _mm256_set1_pd(w_next);
    const __m256d vdt = _mm256_set1_pd(dt);
    std::size_t i = 0;
    for (; i + kWidth <= n; i += kWidth) {
        const __m256d dq = _mm256_sub_pd(_mm256_mul_pd(wn, _mm256_loadu_pd(q_next + i)),
                                         _mm256_mul_pd(wp, _mm256_loadu_pd(q_prev + i)));
        const __m256d run = _mm256_mul_pd(_mm256_mul_pd(wp, _mm256_loadu_pd(pen + i)), vdt);
        const __m256d inc = _mm256_mul_pd(_mm256_loadu_pd(xi + i), _mm256_add_pd(dq, run));
        _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), inc));
    }
    if (i < n) {
        scalar_kernels().martingale_accumulate(acc + i, xi + i, q_prev + i, q_next + i, pen + i, w_prev, w_next, dt,
                                               n - i);
    }
}

void scaled_accumulate(double* acc, const double* v, double w, std::size_t n) {
    const __m256d vw = _mm256_set1_pd(w);
    std::size_t i = 0;
    for (; i + kWidth <= n; i += kWidth) {
        _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_mul_pd(vw, _mm256_loadu_pd(v + i))));
    }
    if (i < n) scalar_kernels().scaled_accumulate(acc + i, v + i, w, n - i);
}

}  // namespace

const KernelTable& avx2_kernels() noexcept {
    static const KernelTable table{"avx2", lq_step, quad_eval, martingale_accumulate, scaled_accumulate};
    return table;
}

}  // namespace cqsm::simd
