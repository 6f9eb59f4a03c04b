#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cqsm/config.hpp"
#include "cqsm/cqsm_online.hpp"

namespace cqsm {

inline constexpr std::string_view kArtifactVersion = "0.1.0";

/// Cumulative time average avg[k] = sum_{i <= k} r_i dt / ((k + 1) dt).
std::vector<double> running_avg_reward(std::span<const double> reward_rates, double dt);

struct InitialParams {
    QParams theta;
    ScoreParams v;
};

/// theta0 / v0 for one seed; uniform draws come from a stream derived from
/// the seed, independent of the environment noise.
InitialParams initial_params(const ExperimentConfig& cfg, std::uint64_t seed);

struct SeedResult {
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    LearningRecord record;
};

/// Cross-seed statistics at one recorded step. Index 0..5 theta, 6..8 v,
/// 9 running average reward.
struct SummaryRow {
    std::size_t step = 0;
    double t = 0.0;
    std::array<double, 10> mean{};
    std::array<double, 10> stddev{};
};

struct RunSummary {
    std::vector<SeedResult> seeds;
    std::vector<SummaryRow> series;  // over successful seeds only

    std::size_t n_ok() const noexcept;
};

/// Runs n_seeds independent learning runs (seeds base_seed, base_seed + 1, ...)
/// with up to cfg.parallel concurrent workers. Divergent seeds are recorded,
/// not fatal. When write_files is set, emits seed_<seed>.csv, summary.csv,
/// final.csv and manifest.txt under cfg.output_dir.
RunSummary run_experiment(const ExperimentConfig& cfg, bool write_files = true);

/// One-pass (Welford) mean and sample standard deviation across seeds.
std::vector<SummaryRow> summarize(const std::vector<SeedResult>& seeds);

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& series);
void write_final_csv(std::ostream& os, const std::vector<SeedResult>& seeds);

/// Manifest = canonical config plus manifest.* keys (command, version,
/// config hash, seeds). It is itself a loadable config.
std::string manifest_text(const ExperimentConfig& cfg, std::string_view command);
void write_manifest(const ExperimentConfig& cfg, std::string_view command);

}  // namespace cqsm
