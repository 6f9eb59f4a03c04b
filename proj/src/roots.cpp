#include "cqsm/roots.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cqsm {

std::optional<Root> refine_bracket(const PartialFn& f, double lo, double hi, double f_lo, double f_hi,
                                   double tol, int max_iter) {
    if (f_lo == 0.0) return Root{lo, 0.0, 0};
    if (f_hi == 0.0) return Root{hi, 0.0, 0};
    if ((f_lo > 0.0) == (f_hi > 0.0)) return std::nullopt;

    double best_x = std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
    double best_f = std::min(std::abs(f_lo), std::abs(f_hi));
    double width = hi - lo;
    for (int it = 1; it <= max_iter; ++it) {
        double cand = hi - f_hi * (hi - lo) / (f_hi - f_lo);
        const bool secant_ok = std::isfinite(cand) && cand > lo && cand < hi;
        if (!secant_ok) cand = 0.5 * (lo + hi);

        std::optional<double> fc = f(cand);
        if (!fc) {
            cand = 0.5 * (lo + hi);
            fc = f(cand);
            if (!fc) return std::nullopt;
        }
        if (std::abs(*fc) < best_f) {
            best_f = std::abs(*fc);
            best_x = cand;
        }
        if (std::abs(*fc) <= tol) return Root{cand, *fc, it};

        if ((*fc > 0.0) == (f_lo > 0.0)) {
            lo = cand;
            f_lo = *fc;
        } else {
            hi = cand;
            f_hi = *fc;
        }

        // Secant steps that stall on one side get replaced by a bisection.
        const double new_width = hi - lo;
        if (new_width > 0.5 * width) {
            const double mid = 0.5 * (lo + hi);
            if (auto fm = f(mid)) {
                if (std::abs(*fm) < best_f) {
                    best_f = std::abs(*fm);
                    best_x = mid;
                }
                if (std::abs(*fm) <= tol) return Root{mid, *fm, it};
                if ((*fm > 0.0) == (f_lo > 0.0)) {
                    lo = mid;
                    f_lo = *fm;
                } else {
                    hi = mid;
                    f_hi = *fm;
                }
            }
        }
        width = hi - lo;
        if (width <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(lo))) {
            return Root{best_x, best_f, it};
        }
    }
    return Root{best_x, best_f, max_iter};
}

std::vector<Root> find_roots(const PartialFn& f, double lo, double hi, double step, double tol) {
    if (!(step > 0.0) || !(hi > lo)) throw std::invalid_argument("find_roots: bad scan interval");
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    std::vector<Root> roots;
    bool has_prev = false;
    double prev_x = 0.0, prev_f = 0.0;
    for (long i = 0; i <= n; ++i) {
        const double x = lo + static_cast<double>(i) * step;
        const std::optional<double> fx = f(x);
        if (!fx || !std::isfinite(*fx)) {
            has_prev = false;
            continue;
        }
        if (*fx == 0.0) {
            roots.push_back({x, 0.0, 0});
        } else if (has_prev && prev_f != 0.0 && ((prev_f > 0.0) != (*fx > 0.0))) {
            if (auto r = refine_bracket(f, prev_x, x, prev_f, *fx, tol)) roots.push_back(*r);
        }
        has_prev = true;
        prev_x = x;
        prev_f = *fx;
    }
    return roots;
}

}  // namespace cqsm
