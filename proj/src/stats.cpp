#include "cqsm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace cqsm {

double RunningMoments::stddev() const noexcept { return std::sqrt(variance()); }

double RunningMoments::std_error() const noexcept {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

double mean(std::span<const double> xs) noexcept {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) noexcept {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

double jackknife_se(std::span<const double> xs) noexcept {
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    double total = 0.0;
    for (double x : xs) total += x;
    const double nm1 = static_cast<double>(n - 1);
    double loo_mean = 0.0;
    for (double x : xs) loo_mean += (total - x) / nm1;
    loo_mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : xs) {
        const double d = (total - x) / nm1 - loo_mean;
        ss += d * d;
    }
    return std::sqrt(nm1 / static_cast<double>(n) * ss);
}

double ks_statistic_normal(std::span<const double> xs, double mu, double sigma) {
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double cdf = 0.5 * std::erfc(-(sorted[i] - mu) / (sigma * std::sqrt(2.0)));
        d = std::max({d, cdf - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - cdf});
    }
    return d;
}

}  // namespace cqsm
