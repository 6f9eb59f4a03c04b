#include "cqsm/policy.hpp"

#include <algorithm>
#include <cmath>

namespace cqsm {

bool QParams::finite() const noexcept {
    return std::all_of(theta.begin(), theta.end(), [](double t) { return std::isfinite(t); });
}

bool ScoreParams::finite() const noexcept {
    return std::all_of(v.begin(), v.end(), [](double t) { return std::isfinite(t); });
}

double q_theta(const QParams& th, double x, double a) noexcept {
    return 0.5 * th[0] * x * x + th[1] * x + 0.5 * th[2] * a * a + th[3] * a + th[4] * x * a + th[5];
}

std::array<double, 6> grad_theta_q(const QParams&, double x, double a) noexcept {
    return {0.5 * x * x, x, 0.5 * a * a, a, x * a, 1.0};
}

double grad_a_q(const QParams& th, double x, double a) noexcept { return th[2] * a + th[3] + th[4] * x; }

double psi_v(const ScoreParams& v, double x, double a) noexcept {
    return -std::exp(v[0]) * a + v[1] * x + v[2];
}

std::array<double, 3> grad_v_psi(const ScoreParams& v, double x, double a) noexcept {
    return {-std::exp(v[0]) * a, x, 1.0};
}

}  // namespace cqsm
