#pragma once

// Batched (structure-of-arrays) arithmetic kernels for ensembles of scalar
// LQ paths. Every kernel has a scalar reference and, on x86-64, an AVX2
// variant selected at runtime. The variants perform the same IEEE operations
// in the same order (no FMA contraction), so their outputs are bit-identical.

#include <cstddef>
#include <string_view>

namespace cqsm::simd {

/// Closed-loop LQ lane model with a linear score.
struct LaneModel {
    double A, B, C, D;
    double score_a, score_x, score_c;
    double sigma_a;
    double M, N, R, P, Pp;
    double lambda;
};

struct KernelTable {
    std::string_view name;

    /// pen[i] = r(x_i, a_i) - lambda/2 Psi(x_i, a_i)^2 at the pre-step point,
    /// then (x_i, a_i) advance by one Euler-Maruyama step in place.
    void (*lq_step)(const LaneModel& m, double dt, double sqrt_dt, double* x, double* a, const double* zx,
                    const double* za, double* pen, std::size_t n);

    /// out[i] = 1/2 c0 x^2 + c1 x + 1/2 c2 a^2 + c3 a + c4 x a + c5.
    void (*quad_eval)(const double* c6, const double* x, const double* a, double* out, std::size_t n);

    /// acc[i] += xi[i] * (w_next q_next[i] - w_prev q_prev[i] + w_prev pen[i] dt).
    void (*martingale_accumulate)(double* acc, const double* xi, const double* q_prev, const double* q_next,
                                  const double* pen, double w_prev, double w_next, double dt, std::size_t n);

    /// acc[i] += w * v[i].
    void (*scaled_accumulate)(double* acc, const double* v, double w, std::size_t n);
};

enum class Backend { scalar, avx2 };

std::string_view backend_name(Backend b) noexcept;

/// Compiled in and supported by the running CPU.
bool backend_available(Backend b) noexcept;

/// Best available backend; the environment variable CQSM_SIMD=scalar forces
/// the reference kernels.
Backend default_backend() noexcept;

const KernelTable& kernels(Backend b);

const KernelTable& scalar_kernels() noexcept;

#if defined(CQSM_HAVE_AVX2_KERNELS)
const KernelTable& avx2_kernels() noexcept;
#endif

}  // namespace cqsm::simd
