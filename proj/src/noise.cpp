#include "cqsm/noise.hpp"

namespace cqsm {

NoiseSource::NoiseSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

double NoiseSource::gaussian() { return normal_(engine_); }

void NoiseSource::fill_gaussian(std::span<double> out) {
    for (double& z : out) z = normal_(engine_);
}

double NoiseSource::uniform01() { return uniform_(engine_); }

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
    // splitmix64 finalizer over the combined key
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace cqsm
