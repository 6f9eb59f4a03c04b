#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace cqsm {

/// Seeded stream of independent standard Gaussian variates.
///
/// Two sources built from the same seed produce bit-identical sequences.
/// A source is owned by one simulation at a time; it is not thread-safe.
class NoiseSource {
public:
    explicit NoiseSource(std::uint64_t seed);

    std::uint64_t seed() const noexcept { return seed_; }

    double gaussian();
    void fill_gaussian(std::span<double> out);
    double uniform01();

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Derives a well-separated child seed, e.g. one per trajectory of a batch.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

}  // namespace cqsm
