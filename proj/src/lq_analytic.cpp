#include "cqsm/lq_analytic.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "cqsm/errors.hpp"
#include "cqsm/roots.hpp"

namespace cqsm {
namespace {

constexpr double kScanLo = -50.0;
constexpr double kScanHi = 50.0;
constexpr double kScanStep = 0.25;
constexpr double kRootTol = 1e-12;
// Degenerate problems (M = 0 with no cross terms) have k0 = 0 and sit on the
// boundary of concavity; accept them within this slack.
constexpr double kConcavitySlack = 1e-12;

// Coefficients implied by a trial k4: x^2 equation gives k0, the a^2
// equation (through varpi) gives the negative branch of k2.
struct Partial {
    double k0;
    double k2;
};

std::optional<Partial> partial_from_k4(const LqParams& p, double k4) {
    const double kappa = p.beta - 2.0 * p.A - p.C * p.C;
    const double k0 = (k4 * k4 / p.lambda - p.M) / kappa;
    const double varpi = k4 * p.B + 0.5 * p.D * p.D * k0;
    const double radicand = 0.25 * p.beta * p.beta + (p.N - 2.0 * varpi) / p.lambda;
    if (!(radicand >= 0.0)) return std::nullopt;
    const double k2 = 0.5 * p.beta * p.lambda - p.lambda * std::sqrt(radicand);
    return Partial{k0, k2};
}

double xa_residual(const LqParams& p, double k0, double k2, double k4) {
    return p.beta * k4 - k0 * p.B - k4 * p.A - k2 * k4 / p.lambda - k0 * p.C * p.D + p.R;
}

KCoefficients back_substitute(const LqParams& p, double k4, const Partial& part) {
    KCoefficients k;
    k.k0 = part.k0;
    k.k2 = part.k2;
    k.k4 = k4;
    // x and a equations are linear in (k1, k3):
    //   (beta - A) k1 - (k4/lambda) k3 = -P
    //   -B k1 + (beta - k2/lambda) k3  = -Pp
    const double a11 = p.beta - p.A, a12 = -k4 / p.lambda;
    const double a21 = -p.B, a22 = p.beta - k.k2 / p.lambda;
    const double det = a11 * a22 - a12 * a21;
    if (std::abs(det) < 1e-300) throw NumericalError("solve_lq: singular linear system for (k1, k3)");
    k.k1 = (-p.P * a22 + p.Pp * a12) / det;
    k.k3 = (-p.Pp * a11 + p.P * a21) / det;
    k.k5 = (k.k2 + k.k3 * k.k3 / (2.0 * p.lambda)) / p.beta;
    return k;
}

}  // namespace

bool is_concave(const KCoefficients& k) noexcept {
    return k.k0 < 0.0 && k.k2 < 0.0 && k.k0 * k.k2 - k.k4 * k.k4 > 0.0;
}

std::array<double, 6> coefficient_residuals(const KCoefficients& k, const LqParams& p) {
    const double l = p.lambda;
    return {
        0.5 * p.beta * k.k0 - p.A * k.k0 - k.k4 * k.k4 / (2.0 * l) - 0.5 * p.C * p.C * k.k0 + 0.5 * p.M,
        p.beta * k.k1 - p.A * k.k1 - k.k3 * k.k4 / l + p.P,
        0.5 * p.beta * k.k2 - k.k4 * p.B - k.k2 * k.k2 / (2.0 * l) - 0.5 * k.k0 * p.D * p.D + 0.5 * p.N,
        p.beta * k.k3 - p.B * k.k1 - k.k2 * k.k3 / l + p.Pp,
        p.beta * k.k4 - k.k0 * p.B - k.k4 * p.A - k.k2 * k.k4 / l - k.k0 * p.C * p.D + p.R,
        p.beta * k.k5 - k.k2 - k.k3 * k.k3 / (2.0 * l),
    };
}

LqSolution solve_lq_detailed(const LqParams& p) {
    validate(p);

    const PartialFn f = [&p](double k4) -> std::optional<double> {
        const auto part = partial_from_k4(p, k4);
        if (!part) return std::nullopt;
        return xa_residual(p, part->k0, part->k2, k4);
    };

    const std::vector<Root> roots = find_roots(f, kScanLo, kScanHi, kScanStep, kRootTol);

    std::optional<KCoefficients> best;
    double best_margin = -1.0;
    int concave = 0;
    for (const Root& r : roots) {
        const auto part = partial_from_k4(p, r.x);
        if (!part) continue;
        const KCoefficients k = back_substitute(p, r.x, *part);
        const double margin = k.k0 * k.k2 - k.k4 * k.k4;
        const bool ok = k.k2 < 0.0 && k.k0 <= kConcavitySlack && margin >= -kConcavitySlack;
        if (!ok) continue;
        ++concave;
        if (!best || margin > best_margin) {
            best = k;
            best_margin = margin;
        }
    }
    if (!best) {
        std::ostringstream msg;
        msg << "solve_lq: no concave solution (" << roots.size() << " roots of the xa equation in k4 in ["
            << kScanLo << ", " << kScanHi << "])";
        throw NumericalError(msg.str());
    }

    LqSolution sol{*best, concave, {}};
    if (concave > 1) {
        sol.warning = "multiple concave roots (" + std::to_string(concave) +
                      "); kept the one with the largest concavity margin";
    }
    return sol;
}

KCoefficients solve_lq(const LqParams& p) { return solve_lq_detailed(p).k; }

double q_star(const KCoefficients& k, double x, double a) noexcept {
    return 0.5 * k.k0 * x * x + k.k1 * x + 0.5 * k.k2 * a * a + k.k3 * a + k.k4 * x * a + k.k5;
}

double optimal_score(const KCoefficients& k, double lambda, double x, double a) noexcept {
    return (k.k2 * a + k.k3 + k.k4 * x) / lambda;
}

double hjb_residual(const KCoefficients& k, const LqParams& p, double x, double a, double sigma_a) {
    const double q = q_star(k, x, a);
    const double qx = k.k0 * x + k.k1 + k.k4 * a;
    const double qa = k.k2 * a + k.k3 + k.k4 * x;
    const double sx = p.C * x + p.D * a;
    return p.beta * q - qx * (p.A * x + p.B * a) - qa * qa / (2.0 * p.lambda) - 0.5 * sx * sx * k.k0 -
           0.5 * sigma_a * sigma_a * k.k2 - lq_reward(p, x, a);
}

OptimalParams k_to_optimal_params(const KCoefficients& k, double lambda) {
    if (!(k.k2 < 0.0)) throw NumericalError("k_to_optimal_params: k2 must be negative");
    OptimalParams out;
    out.theta.theta = k.as_array();
    out.v.v = {std::log(-k.k2 / lambda), k.k4 / lambda, k.k3 / lambda};
    return out;
}

LinearScore LinearScore::from_params(const ScoreParams& v) { return {-std::exp(v[0]), v[1], v[2]}; }

LinearScore LinearScore::optimal(const KCoefficients& k, double lambda) {
    return {k.k2 / lambda, k.k4 / lambda, k.k3 / lambda};
}

KCoefficients evaluate_linear_score(const LqParams& p, const LinearScore& s, double sigma_a) {
    // Unknowns c = (c0..c5) of the quadratic Q; rows are the x^2, a^2, xa,
    // x, a and constant coefficients of the generator equation
    //   beta Q - Q_x b - Q_a Psi - sigma_X^2 Q_xx/2 - sigma_a^2 Q_aa/2 = r - lambda Psi^2 / 2.
    const double sa = s.a_coef, sx = s.x_coef, sc = s.constant, l = p.lambda;
    Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> rhs;

    m(0, 0) = 0.5 * p.beta - p.A - 0.5 * p.C * p.C;
    m(0, 4) = -sx;
    rhs(0) = -0.5 * p.M - 0.5 * l * sx * sx;

    m(1, 2) = 0.5 * p.beta - sa;
    m(1, 4) = -p.B;
    m(1, 0) = -0.5 * p.D * p.D;
    rhs(1) = -0.5 * p.N - 0.5 * l * sa * sa;

    m(2, 4) = p.beta - p.A - sa;
    m(2, 0) = -p.B - p.C * p.D;
    m(2, 2) = -sx;
    rhs(2) = -p.R - l * sa * sx;

    m(3, 1) = p.beta - p.A;
    m(3, 3) = -sx;
    m(3, 4) = -sc;
    rhs(3) = -p.P - l * sx * sc;

    m(4, 3) = p.beta - sa;
    m(4, 1) = -p.B;
    m(4, 2) = -sc;
    rhs(4) = -p.Pp - l * sa * sc;

    m(5, 5) = p.beta;
    m(5, 3) = -sc;
    m(5, 2) = -0.5 * sigma_a * sigma_a;
    rhs(5) = -0.5 * l * sc * sc;

    Eigen::FullPivLU<Eigen::Matrix<double, 6, 6>> lu(m);
    if (!lu.isInvertible()) throw NumericalError("evaluate_linear_score: singular evaluation system");
    const Eigen::Matrix<double, 6, 1> c = lu.solve(rhs);
    return {c(0), c(1), c(2), c(3), c(4), c(5)};
}

}  // namespace cqsm
