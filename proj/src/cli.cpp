#include "cqsm/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "cqsm/config.hpp"
#include "cqsm/csv.hpp"
#include "cqsm/errors.hpp"
#include "cqsm/experiment.hpp"
#include "cqsm/lq_analytic.hpp"
#include "cqsm/martingale.hpp"
#include "cqsm/samplers.hpp"
#include "cqsm/stats.hpp"

namespace cqsm {
namespace {

struct CommonOptions {
    std::string config_path;
    std::optional<std::size_t> seeds;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> parallel;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "Experiment config (key = value lines) or a run manifest");
    cmd->add_option("--seeds", o.seeds, "Number of seeds");
    cmd->add_option("--out", o.out_dir, "Output directory");
    cmd->add_option("--parallel", o.parallel, "Concurrent seeds");
}

ExperimentConfig resolve_config(const CommonOptions& o) {
    ExperimentConfig cfg = o.config_path.empty() ? ExperimentConfig::reference() : load_config(o.config_path);
    if (o.seeds) cfg.n_seeds = *o.seeds;
    if (o.out_dir) cfg.output_dir = *o.out_dir;
    if (o.parallel) cfg.parallel = *o.parallel;
    return cfg;
}

std::string sig8(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.8g", v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
}

// ---------------------------------------------------------------- solve-lq

int cmd_solve_lq(const ExperimentConfig& cfg, bool write_files, std::ostream& out) {
    const LqSolution sol = solve_lq_detailed(cfg.lq);
    const KCoefficients& k = sol.k;
    const OptimalParams opt = k_to_optimal_params(k, cfg.lq.lambda);
    const auto res = coefficient_residuals(k, cfg.lq);
    double max_res = 0.0;
    for (double r : res) max_res = std::max(max_res, std::abs(r));

    const auto ks = k.as_array();
    out << "# analytic LQ solution\n";
    for (std::size_t i = 0; i < 6; ++i) out << "k" << i << " = " << sig8(ks[i]) << '\n';
    for (std::size_t i = 0; i < 6; ++i) out << "theta*" << i << " = " << sig8(opt.theta[i]) << '\n';
    for (std::size_t i = 0; i < 3; ++i) out << "v*" << i << " = " << sig8(opt.v[i]) << '\n';
    out << "max_residual = " << sig8(max_res) << '\n';
    if (!sol.warning.empty()) out << "warning: " << sol.warning << '\n';

    std::ostringstream csv_text;
    CsvWriter csv(csv_text);
    csv.header({"name", "value"});
    for (std::size_t i = 0; i < 6; ++i) {
        csv.field(std::string_view("k" + std::to_string(i)));
        csv.field(ks[i]);
        csv.end_row();
    }
    for (std::size_t i = 0; i < 6; ++i) {
        csv.field(std::string_view("theta" + std::to_string(i)));
        csv.field(opt.theta[i]);
        csv.end_row();
    }
    for (std::size_t i = 0; i < 3; ++i) {
        csv.field(std::string_view("v" + std::to_string(i)));
        csv.field(opt.v[i]);
        csv.end_row();
    }
    csv.field(std::string_view("max_residual"));
    csv.field(max_res);
    csv.end_row();

    out << "\n# csv\n" << csv_text.str();
    if (write_files) {
        write_text(cfg.output_dir / "solve_lq.csv", csv_text.str());
        write_manifest(cfg, "solve-lq");
    }
    return kExitOk;
}

// ------------------------------------------------------- check-martingale

LinearScore chosen_score(const ExperimentConfig& cfg, const std::string& which) {
    if (which == "optimal") return LinearScore::optimal(solve_lq(cfg.lq), cfg.lq.lambda);
    return LinearScore::from_params(initial_params(cfg, cfg.base_seed).v);
}

struct ParsedTest {
    std::optional<simd::TestFeature> batched;
    TestFn fn;
};

ParsedTest parse_test(const std::string& spec) {
    if (spec == "one") return {simd::TestFeature{-1}, constant_test()};
    if (spec.starts_with("feature:")) {
        const int i = std::stoi(spec.substr(8));
        if (i < 0 || i > 5) throw ConfigError("martingale.test feature index must be in [0, 5]");
        return {simd::TestFeature{i}, critic_feature_test(static_cast<std::size_t>(i))};
    }
    if (spec.starts_with("lagged:")) {
        const auto rest = spec.substr(7);
        const auto colon = rest.find(':');
        if (colon == std::string::npos) throw ConfigError("martingale.test lagged form is lagged:<lag>:<power>");
        const auto lag = static_cast<std::size_t>(std::stoul(rest.substr(0, colon)));
        const int power = std::stoi(rest.substr(colon + 1));
        return {std::nullopt, lagged_state_test(lag, power)};
    }
    throw ConfigError("martingale.test must be one, feature:<i> or lagged:<lag>:<power>");
}

int cmd_check_martingale(const ExperimentConfig& cfg, bool write_files, std::ostream& out) {
    const LinearScore score = chosen_score(cfg, cfg.martingale.score);
    KCoefficients q = evaluate_linear_score(cfg.lq, score, cfg.algo.sampler.sigma_a);
    q.k5 += cfg.martingale.q_offset;

    ParsedTest test;
    try {
        test = parse_test(cfg.martingale.test);
    } catch (const std::logic_error&) {
        throw ConfigError("malformed martingale.test '" + cfg.martingale.test + "'");
    }

    ResidualReport report;
    std::string path_kind;
    if (test.batched && cfg.algo.sampler.kind == SamplerKind::direct_sde) {
        report = orthogonality_residual_lq(q, score, *test.batched, cfg.lq, cfg.algo, cfg.martingale.n_traj);
        path_kind = "batched/" + std::string(simd::backend_name(simd::default_backend()));
    } else {
        const QFn qfn = [q](double x, double a) { return q_star(q, x, a); };
        report = orthogonality_residual(qfn, score, test.fn, cfg.lq, cfg.algo, cfg.martingale.n_traj);
        path_kind = "generic";
    }

    out << "# martingale orthogonality check (" << path_kind << ")\n";
    out << "score: " << cfg.martingale.score << ", q_offset: " << format_real(cfg.martingale.q_offset)
        << ", test: " << cfg.martingale.test << ", T: " << format_real(cfg.algo.horizon())
        << ", dt: " << format_real(cfg.algo.dt) << '\n';
    print_report(out, report);
    out << "consistent_at_3sigma: " << (std::abs(report.z_score) < 3.0 ? "yes" : "no") << '\n';
    std::ostringstream csv;
    write_report_csv(csv, report);
    out << "\n# csv\n" << csv.str();
    if (write_files) {
        write_text(cfg.output_dir / "martingale.csv", csv.str());
        write_manifest(cfg, "check-martingale");
    }
    return kExitOk;
}

// --------------------------------------------------------- sample-actions

int cmd_sample_actions(const ExperimentConfig& cfg, bool write_files, std::ostream& out) {
    const LinearScore score = chosen_score(cfg, cfg.sample.score);
    const double x = cfg.sample.x;
    NoiseSource noise(cfg.base_seed);
    std::vector<double> samples;
    if (cfg.algo.sampler.kind == SamplerKind::ddpm) {
        const NoiseSchedule schedule = make_linear_schedule(cfg.algo.sampler.ddpm_steps, cfg.algo.sampler.ddpm_beta_start,
                                                            cfg.algo.sampler.ddpm_beta_end);
        samples.reserve(cfg.sample.n_samples);
        for (std::size_t i = 0; i < cfg.sample.n_samples; ++i) samples.push_back(ddpm_sample(score, x, schedule, noise));
    } else {
        LangevinOptions opt;
        opt.dt = cfg.algo.sampler.langevin_dt;
        samples = langevin_chain(score, x, cfg.algo.a0, cfg.sample.n_samples, opt, noise);
    }

    const double m = mean(samples);
    const double var = sample_variance(samples);
    // Stationary law of da = Psi dt + sqrt(2) dB for a linear score.
    const double target_mean = -(score.x_coef * x + score.constant) / score.a_coef;
    const double target_var = -1.0 / score.a_coef;
    out << "# action samples at x = " << format_real(x) << " (" << to_string(cfg.algo.sampler.kind) << ")\n";
    out << "n_samples:       " << samples.size() << '\n';
    out << "mean:            " << format_real(m) << '\n';
    out << "variance:        " << format_real(var) << '\n';
    out << "boltzmann_mean:  " << format_real(target_mean) << '\n';
    out << "boltzmann_var:   " << format_real(target_var) << '\n';
    out << "ks_vs_boltzmann: " << format_real(ks_statistic_normal(samples, target_mean, std::sqrt(target_var))) << '\n';

    if (write_files) {
        std::ostringstream csv_text;
        CsvWriter csv(csv_text);
        csv.header({"index", "a"});
        for (std::size_t i = 0; i < samples.size(); ++i) {
            csv.field(static_cast<long long>(i));
            csv.field(samples[i]);
            csv.end_row();
        }
        write_text(cfg.output_dir / "samples.csv", csv_text.str());
        write_manifest(cfg, "sample-actions");
    }
    return kExitOk;
}

// -------------------------------------------------------------------- run

int cmd_run(const ExperimentConfig& cfg, std::ostream& out) {
    const RunSummary summary = run_experiment(cfg, true);
    out << "# " << (cfg.mode == LearningMode::online ? "online" : "offline") << " CQSM, " << cfg.n_seeds
        << " seed(s), output in " << cfg.output_dir.string() << '\n';
    for (const SeedResult& s : summary.seeds) {
        out << "seed " << s.seed << ": ";
        if (!s.ok) {
            out << "diverged (" << s.error << ")\n";
            continue;
        }
        out << "theta = [";
        for (std::size_t i = 0; i < 6; ++i) out << (i ? ", " : "") << sig8(s.record.final_theta[i]);
        out << "], v = [";
        for (std::size_t i = 0; i < 3; ++i) out << (i ? ", " : "") << sig8(s.record.final_v[i]);
        out << "], running_avg_reward = " << sig8(s.record.final_running_avg_reward) << '\n';
    }
    return summary.n_ok() > 0 ? kExitOk : kExitNumerical;
}

int dispatch(const std::string& command, const ExperimentConfig& cfg, bool write_files, std::ostream& out) {
    if (command == "run") return cmd_run(cfg, out);
    validate(cfg);
    if (command == "solve-lq") return cmd_solve_lq(cfg, write_files, out);
    if (command == "check-martingale") return cmd_check_martingale(cfg, write_files, out);
    if (command == "sample-actions") return cmd_sample_actions(cfg, write_files, out);
    throw ConfigError("unknown command '" + command + "'");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Continuous-time Q-score matching laboratory"};
    app.require_subcommand(1);

    CommonOptions run_o, solve_o, mart_o, sample_o;
    auto* run = app.add_subcommand("run", "Multi-seed learning experiment");
    add_common(run, run_o);
    auto* solve = app.add_subcommand("solve-lq", "Closed-form LQ Q-function and optimal parameters");
    add_common(solve, solve_o);
    auto* mart = app.add_subcommand("check-martingale", "Martingale orthogonality diagnostic");
    add_common(mart, mart_o);
    auto* sample = app.add_subcommand("sample-actions", "Action sampler diagnostics");
    add_common(sample, sample_o);

    std::string manifest_path;
    std::optional<std::string> replay_out;
    auto* replay = app.add_subcommand("replay", "Re-run a command from its manifest");
    replay->add_option("--manifest", manifest_path, "manifest.txt written by a previous run")->required();
    replay->add_option("--out", replay_out, "Output directory (defaults to the manifest's)");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    if (!argv_rev.empty()) argv_rev.pop_back();  // program name
    try {
        app.parse(argv_rev);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (replay->parsed()) {
            ManifestFields fields;
            ExperimentConfig cfg = load_config(manifest_path, &fields);
            const auto it = fields.find("manifest.command");
            if (it == fields.end()) throw ConfigError("manifest has no manifest.command entry");
            if (replay_out) cfg.output_dir = *replay_out;
            return dispatch(it->second, cfg, true, out);
        }
        struct Entry {
            CLI::App* app;
            CommonOptions* opts;
            const char* name;
        };
        for (const Entry& e : {Entry{run, &run_o, "run"}, Entry{solve, &solve_o, "solve-lq"},
                               Entry{mart, &mart_o, "check-martingale"}, Entry{sample, &sample_o, "sample-actions"}}) {
            if (e.app->parsed()) {
                const ExperimentConfig cfg = resolve_config(*e.opts);
                return dispatch(e.name, cfg, e.opts->out_dir.has_value(), out);
            }
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitConfig;
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args(argv, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace cqsm
