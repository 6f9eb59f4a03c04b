#pragma once

// Closed-form quadratic Q-function of the scalar LQ problem under the
// optimal score and under arbitrary linear scores.
//
//   Q(x, a) = 1/2 k0 x^2 + k1 x + 1/2 k2 a^2 + k3 a + k4 x a + k5
//   Psi*(x, a) = (k2 a + k3 + k4 x) / lambda

#include <array>
#include <string>

#include "cqsm/lq_env.hpp"
#include "cqsm/policy.hpp"

namespace cqsm {

struct KCoefficients {
    double k0 = 0.0, k1 = 0.0, k2 = 0.0, k3 = 0.0, k4 = 0.0, k5 = 0.0;

    std::array<double, 6> as_array() const { return {k0, k1, k2, k3, k4, k5}; }
    static KCoefficients from_array(const std::array<double, 6>& c) {
        return {c[0], c[1], c[2], c[3], c[4], c[5]};
    }
};

/// Strictly concave in (x, a): k0 < 0, k2 < 0, k0 k2 - k4^2 > 0.
bool is_concave(const KCoefficients& k) noexcept;

/// Left-hand sides of the six coefficient-matching equations of the HJB,
/// ordered (x^2, x, a^2, a, xa, const). All vanish at a solution.
std::array<double, 6> coefficient_residuals(const KCoefficients& k, const LqParams& p);

struct LqSolution {
    KCoefficients k;
    int concave_roots = 0;  // > 1 means the choice among roots was ambiguous
    std::string warning;
};

/// Solves the HJB coefficient system for the concave solution. The xa
/// equation is reduced to a scalar equation in k4 and solved by bracketed
/// root finding; the remaining coefficients follow by back-substitution.
/// Throws ConfigError on invalid params, NumericalError when no concave
/// solution exists.
LqSolution solve_lq_detailed(const LqParams& p);
KCoefficients solve_lq(const LqParams& p);

double q_star(const KCoefficients& k, double x, double a) noexcept;
double optimal_score(const KCoefficients& k, double lambda, double x, double a) noexcept;

/// Pointwise HJB residual
///   beta Q - Q_x b - Q_a^2/(2 lambda) - sigma_X^2 Q_xx/2 - sigma_a^2 Q_aa/2 - r.
double hjb_residual(const KCoefficients& k, const LqParams& p, double x, double a,
                    double sigma_a = 1.4142135623730951);

struct OptimalParams {
    QParams theta;
    ScoreParams v;
};

/// theta_i = k_i, v = (ln(-k2/lambda), k4/lambda, k3/lambda). Throws
/// NumericalError when k2 >= 0.
OptimalParams k_to_optimal_params(const KCoefficients& k, double lambda);

/// Linear score Psi(x, a) = a_coef * a + x_coef * x + constant.
struct LinearScore {
    double a_coef = 0.0;
    double x_coef = 0.0;
    double constant = 0.0;

    double operator()(double x, double a) const noexcept { return a_coef * a + x_coef * x + constant; }

    static LinearScore from_params(const ScoreParams& v);
    static LinearScore optimal(const KCoefficients& k, double lambda);
};

/// Exact discounted, score-regularized Q-function of a fixed linear score
/// with constant action diffusion sigma_a; solves the 6x6 linear system of
/// the policy-evaluation PDE. The result is meaningful when the closed-loop
/// second moments grow slower than e^{beta t}.
KCoefficients evaluate_linear_score(const LqParams& p, const LinearScore& score,
                                    double sigma_a = 1.4142135623730951);

}  // namespace cqsm
