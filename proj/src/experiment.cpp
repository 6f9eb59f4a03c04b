#include "cqsm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "cqsm/cqsm_offline.hpp"
#include "cqsm/csv.hpp"
#include "cqsm/errors.hpp"
#include "cqsm/noise.hpp"
#include "cqsm/stats.hpp"

namespace cqsm {
namespace {

constexpr std::uint64_t kInitStream = 0x1D1715EEDULL;

std::array<double, 10> row_values(const RecordRow& row) {
    std::array<double, 10> v{};
    for (std::size_t i = 0; i < 6; ++i) v[i] = row.theta[i];
    for (std::size_t i = 0; i < 3; ++i) v[6 + i] = row.v[i];
    v[9] = row.running_avg_reward.value_or(0.0);
    return v;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

SeedResult run_one(const ExperimentConfig& cfg, std::uint64_t seed) {
    SeedResult res;
    res.seed = seed;
    AlgoConfig algo = cfg.algo;
    algo.seed = seed;
    const InitialParams init = initial_params(cfg, seed);
    try {
        res.record = cfg.mode == LearningMode::online ? run_cqsm(algo, cfg.lq, init.theta, init.v)
                                                      : run_offline(algo, cfg.lq, init.theta, init.v, cfg.episodes);
        res.ok = true;
    } catch (const NumericalError& e) {
        res.error = e.what();
    }
    return res;
}

}  // namespace

std::vector<double> running_avg_reward(std::span<const double> reward_rates, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("running_avg_reward: dt must be positive");
    std::vector<double> out;
    out.reserve(reward_rates.size());
    double total = 0.0;
    for (std::size_t k = 0; k < reward_rates.size(); ++k) {
        total += reward_rates[k] * dt;
        out.push_back(total / (static_cast<double>(k + 1) * dt));
    }
    return out;
}

InitialParams initial_params(const ExperimentConfig& cfg, std::uint64_t seed) {
    InitialParams init;
    if (cfg.theta0_mode == Theta0Mode::explicit_values) init.theta = cfg.theta0;
    if (cfg.v0_mode == V0Mode::explicit_values) {
        init.v = cfg.v0;
    } else {
        NoiseSource draws(derive_seed(seed, kInitStream));
        for (double& e : init.v.v) e = draws.uniform01();
    }
    return init;
}

std::size_t RunSummary::n_ok() const noexcept {
    return static_cast<std::size_t>(std::count_if(seeds.begin(), seeds.end(), [](const SeedResult& s) { return s.ok; }));
}

std::vector<SummaryRow> summarize(const std::vector<SeedResult>& seeds) {
    std::vector<const SeedResult*> ok;
    for (const auto& s : seeds) {
        if (s.ok) ok.push_back(&s);
    }
    std::vector<SummaryRow> series;
    if (ok.empty()) return series;
    std::size_t n_rows = ok.front()->record.rows.size();
    for (const auto* s : ok) n_rows = std::min(n_rows, s->record.rows.size());

    for (std::size_t r = 0; r < n_rows; ++r) {
        std::array<RunningMoments, 10> acc;
        for (const auto* s : ok) {
            const auto vals = row_values(s->record.rows[r]);
            for (std::size_t i = 0; i < 10; ++i) acc[i].add(vals[i]);
        }
        SummaryRow row;
        row.step = ok.front()->record.rows[r].step;
        row.t = ok.front()->record.rows[r].t;
        for (std::size_t i = 0; i < 10; ++i) {
            row.mean[i] = acc[i].mean();
            row.stddev[i] = acc[i].stddev();
        }
        series.push_back(row);
    }
    return series;
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& series) {
    static const char* names[10] = {"theta0", "theta1", "theta2", "theta3", "theta4",
                                    "theta5", "v0",     "v1",     "v2",     "running_avg_reward"};
    CsvWriter csv(os);
    std::vector<std::string> header{"step", "t"};
    for (const char* n : names) {
        header.push_back(std::string(n) + "_mean");
        header.push_back(std::string(n) + "_lo");
        header.push_back(std::string(n) + "_hi");
    }
    csv.header(header);
    for (const SummaryRow& row : series) {
        csv.field(static_cast<long long>(row.step));
        csv.field(row.t);
        for (std::size_t i = 0; i < 10; ++i) {
            csv.field(row.mean[i]);
            csv.field(row.mean[i] - 2.0 * row.stddev[i]);
            csv.field(row.mean[i] + 2.0 * row.stddev[i]);
        }
        csv.end_row();
    }
}

void write_final_csv(std::ostream& os, const std::vector<SeedResult>& seeds) {
    CsvWriter csv(os);
    csv.header({"seed", "status", "theta0", "theta1", "theta2", "theta3", "theta4", "theta5", "v0", "v1", "v2",
                "final_running_avg_reward", "error"});
    for (const SeedResult& s : seeds) {
        csv.field(static_cast<long long>(s.seed));
        csv.field(std::string_view(s.ok ? "ok" : "diverged"));
        if (s.ok) {
            for (double t : s.record.final_theta.theta) csv.field(t);
            for (double v : s.record.final_v.v) csv.field(v);
            csv.field(s.record.final_running_avg_reward);
            csv.empty_field();
        } else {
            for (int i = 0; i < 10; ++i) csv.empty_field();
            std::string msg = s.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            csv.field(std::string_view(msg));
        }
        csv.end_row();
    }
}

std::string manifest_text(const ExperimentConfig& cfg, std::string_view command) {
    std::ostringstream os;
    os << "# cqsm run manifest; load with --config or `cqsm replay`\n";
    os << "manifest.command = " << command << '\n';
    os << "manifest.version = " << kArtifactVersion << '\n';
    os << "manifest.config_hash = " << config_hash(cfg) << '\n';
    os << "manifest.seeds = ";
    for (std::size_t i = 0; i < cfg.n_seeds; ++i) os << (i ? " " : "") << cfg.base_seed + i;
    os << '\n';
    os << to_config_text(cfg);
    return os.str();
}

void write_manifest(const ExperimentConfig& cfg, std::string_view command) {
    std::filesystem::create_directories(cfg.output_dir);
    write_file(cfg.output_dir / "manifest.txt", manifest_text(cfg, command));
}

RunSummary run_experiment(const ExperimentConfig& cfg, bool write_files) {
    validate(cfg);
    if (write_files) std::filesystem::create_directories(cfg.output_dir);

    RunSummary summary;
    summary.seeds.resize(cfg.n_seeds);
    std::atomic<std::size_t> next{0};
    std::mutex failure_mutex;
    std::exception_ptr failure;
    auto worker = [&] {
        try {
            for (std::size_t i = next++; i < cfg.n_seeds; i = next++) {
                summary.seeds[i] = run_one(cfg, cfg.base_seed + i);
                if (write_files && summary.seeds[i].ok) {
                    std::ostringstream os;
                    write_learning_record_csv(os, summary.seeds[i].record);
                    write_file(cfg.output_dir / ("seed_" + std::to_string(cfg.base_seed + i) + ".csv"), os.str());
                }
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = cfg.n_seeds;
        }
    };
    const std::size_t n_workers = std::min(cfg.parallel, cfg.n_seeds);
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    summary.series = summarize(summary.seeds);
    if (write_files) {
        std::ostringstream s1, s2;
        write_summary_csv(s1, summary.series);
        write_final_csv(s2, summary.seeds);
        write_file(cfg.output_dir / "summary.csv", s1.str());
        write_file(cfg.output_dir / "final.csv", s2.str());
        write_manifest(cfg, "run");
    }
    return summary;
}

}  // namespace cqsm
