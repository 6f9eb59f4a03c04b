#pragma once

#include <cstddef>
#include <span>

namespace cqsm {

/// Single-pass mean / sample variance accumulator (Welford).
class RunningMoments {
public:
    void add(double x) noexcept {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }

    std::size_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    double variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double stddev() const noexcept;
    double std_error() const noexcept;

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

double mean(std::span<const double> xs) noexcept;

/// Two-pass sample variance.
double sample_variance(std::span<const double> xs) noexcept;

/// Leave-one-out jackknife standard error of the mean.
double jackknife_se(std::span<const double> xs) noexcept;

/// Kolmogorov-Smirnov distance between the sample and N(mu, sigma^2).
double ks_statistic_normal(std::span<const double> xs, double mu, double sigma);

}  // namespace cqsm
