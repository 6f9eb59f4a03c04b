#pragma once

// Flat `key = value` experiment configuration with dotted section prefixes:
//
//   # comment
//   lq.A = -1.0
//   algo.dt = 0.1
//   experiment.n_seeds = 5
//
// Unknown keys, duplicate keys and malformed values are ConfigErrors.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "cqsm/cqsm_online.hpp"
#include "cqsm/lq_env.hpp"

namespace cqsm {

enum class Theta0Mode { zeros, explicit_values };
enum class V0Mode { uniform01, explicit_values };
enum class LearningMode { online, offline };

struct MartingaleOptions {
    std::size_t n_traj = 500;
    std::string test = "one";  // one | feature:<i> | lagged:<lag>:<power>
    double q_offset = 0.0;     // added to the analytic Q of the optimal score
    std::string score = "optimal";  // optimal | v0
};

struct SampleOptions {
    double x = 0.0;
    std::size_t n_samples = 10000;
    std::string score = "optimal";  // optimal | v0
};

struct ExperimentConfig {
    LqParams lq;
    AlgoConfig algo;
    std::size_t n_seeds = 5;
    std::uint64_t base_seed = 0;
    std::size_t parallel = 1;
    LearningMode mode = LearningMode::online;
    std::size_t episodes = 100;  // offline mode only; algo.n_steps is the episode length
    Theta0Mode theta0_mode = Theta0Mode::zeros;
    QParams theta0;
    V0Mode v0_mode = V0Mode::uniform01;
    ScoreParams v0;
    std::filesystem::path output_dir = "out";
    MartingaleOptions martingale;
    SampleOptions sample;

    /// The configuration of the LQ experiments: dt 0.1, rates 0.01, theta0 = 0,
    /// v0 ~ U[0, 1], 5 seeds, T = 10^4. Actions come from a
    /// warm-started Langevin chain of 20 steps of 0.01 at each new state.
    static ExperimentConfig reference();
};

/// Keys in the reserved `manifest.` section are accepted and returned here.
using ManifestFields = std::map<std::string, std::string>;

ExperimentConfig parse_config(std::string_view text, ManifestFields* manifest = nullptr);
ExperimentConfig load_config(const std::filesystem::path& path, ManifestFields* manifest = nullptr);

/// Canonical rendering: every key, fixed order, round-trip precision.
std::string to_config_text(const ExperimentConfig& cfg);

/// Hex SHA-256 of the canonical rendering.
std::string config_hash(const ExperimentConfig& cfg);

std::string sha256_hex(std::string_view data);

/// Throws ConfigError when any section is invalid.
void validate(const ExperimentConfig& cfg);

}  // namespace cqsm
