#pragma once

// Linear-in-features critic and log-parameterized linear actor.
//
//   Q^theta(x, a) = 1/2 th0 x^2 + th1 x + 1/2 th2 a^2 + th3 a + th4 x a + th5
//   Psi^v(x, a)   = -exp(v_log) a + v_x x + v_c

#include <array>

namespace cqsm {

struct QParams {
    std::array<double, 6> theta{};

    double& operator[](std::size_t i) { return theta[i]; }
    double operator[](std::size_t i) const { return theta[i]; }
    bool finite() const noexcept;
};

struct ScoreParams {
    std::array<double, 3> v{};  // (v_log, v_x, v_c)

    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
    double v_log() const noexcept { return v[0]; }
    double v_x() const noexcept { return v[1]; }
    double v_c() const noexcept { return v[2]; }
    bool finite() const noexcept;
};

double q_theta(const QParams& theta, double x, double a) noexcept;

/// Feature vector (x^2/2, x, a^2/2, a, x a, 1); independent of theta.
std::array<double, 6> grad_theta_q(const QParams& theta, double x, double a) noexcept;

double grad_a_q(const QParams& theta, double x, double a) noexcept;

double psi_v(const ScoreParams& v, double x, double a) noexcept;

std::array<double, 3> grad_v_psi(const ScoreParams& v, double x, double a) noexcept;

}  // namespace cqsm
