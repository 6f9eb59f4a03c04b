#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace cqsm {

/// A scalar function that may be undefined at some points (returns nullopt).
using PartialFn = std::function<std::optional<double>(double)>;

struct Root {
    double x;
    double residual;
    int iterations;
};

/// Refines a sign-changing bracket [lo, hi] by secant steps, falling back to
/// bisection whenever the secant point leaves the bracket or the bracket
/// fails to halve. Stops when |f| <= tol or the bracket collapses.
std::optional<Root> refine_bracket(const PartialFn& f, double lo, double hi, double f_lo, double f_hi,
                                   double tol, int max_iter = 200);

/// Scans [lo, hi] on a uniform grid and refines every sign change between
/// consecutive defined grid points. Exact zeros on the grid are roots.
std::vector<Root> find_roots(const PartialFn& f, double lo, double hi, double step, double tol);

}  // namespace cqsm
