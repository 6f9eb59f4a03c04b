#include "cqsm/config.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "cqsm/errors.hpp"

namespace cqsm {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_real(std::string_view key, std::string_view text) {
    const std::string s(text);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw ConfigError("'" + std::string(key) + "': expected a real number, got '" + s + "'");
    }
    return v;
}

std::uint64_t parse_uint(std::string_view key, std::string_view text) {
    std::uint64_t v = 0;
    const auto* begin = text.data();
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(begin, end, v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != end) {
        throw ConfigError("'" + std::string(key) + "': expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return v;
}

template <std::size_t N>
std::array<double, N> parse_list(std::string_view key, std::string_view text) {
    std::array<double, N> out{};
    std::size_t i = 0;
    while (true) {
        const auto comma = text.find(',');
        const auto item = trim(text.substr(0, comma));
        if (i >= N) throw ConfigError("'" + std::string(key) + "': expected " + std::to_string(N) + " values");
        out[i++] = parse_real(key, item);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    if (i != N) throw ConfigError("'" + std::string(key) + "': expected " + std::to_string(N) + " values");
    return out;
}

std::string real_text(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <std::size_t N>
std::string list_text(const std::array<double, N>& xs) {
    std::string s;
    for (std::size_t i = 0; i < N; ++i) {
        if (i) s += ", ";
        s += real_text(xs[i]);
    }
    return s;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view key, std::string_view value)>;

template <typename T>
Setter real_field(T ExperimentConfig::*section, double T::*field) {
    return [=](ExperimentConfig& c, std::string_view k, std::string_view v) { (c.*section).*field = parse_real(k, v); };
}

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = [] {
        std::map<std::string, Setter, std::less<>> t;
        t["lq.A"] = real_field(&ExperimentConfig::lq, &LqParams::A);
        t["lq.B"] = real_field(&ExperimentConfig::lq, &LqParams::B);
        t["lq.C"] = real_field(&ExperimentConfig::lq, &LqParams::C);
        t["lq.D"] = real_field(&ExperimentConfig::lq, &LqParams::D);
        t["lq.M"] = real_field(&ExperimentConfig::lq, &LqParams::M);
        t["lq.N"] = real_field(&ExperimentConfig::lq, &LqParams::N);
        t["lq.R"] = real_field(&ExperimentConfig::lq, &LqParams::R);
        t["lq.P"] = real_field(&ExperimentConfig::lq, &LqParams::P);
        t["lq.Pp"] = real_field(&ExperimentConfig::lq, &LqParams::Pp);
        t["lq.beta"] = real_field(&ExperimentConfig::lq, &LqParams::beta);
        t["lq.lambda"] = real_field(&ExperimentConfig::lq, &LqParams::lambda);

        t["algo.dt"] = real_field(&ExperimentConfig::algo, &AlgoConfig::dt);
        t["algo.alpha_theta"] = real_field(&ExperimentConfig::algo, &AlgoConfig::alpha_theta);
        t["algo.alpha_v"] = real_field(&ExperimentConfig::algo, &AlgoConfig::alpha_v);
        t["algo.beta"] = real_field(&ExperimentConfig::algo, &AlgoConfig::beta);
        t["algo.lambda"] = real_field(&ExperimentConfig::algo, &AlgoConfig::lambda);
        t["algo.x0"] = real_field(&ExperimentConfig::algo, &AlgoConfig::x0);
        t["algo.a0"] = real_field(&ExperimentConfig::algo, &AlgoConfig::a0);
        t["algo.n_steps"] = [](ExperimentConfig& c, auto k, auto v) { c.algo.n_steps = parse_uint(k, v); };
        t["algo.seed"] = [](ExperimentConfig& c, auto k, auto v) { c.algo.seed = parse_uint(k, v); };
        t["algo.record_every"] = [](ExperimentConfig& c, auto k, auto v) { c.algo.record_every = parse_uint(k, v); };
        t["algo.sampler"] = [](ExperimentConfig& c, auto, auto v) { c.algo.sampler.kind = parse_sampler(v); };
        t["algo.sigma_a"] = [](ExperimentConfig& c, auto k, auto v) { c.algo.sampler.sigma_a = parse_real(k, v); };
        t["algo.langevin_dt"] = [](ExperimentConfig& c, auto k, auto v) { c.algo.sampler.langevin_dt = parse_real(k, v); };
        t["algo.langevin_steps"] = [](ExperimentConfig& c, auto k, auto v) {
            c.algo.sampler.langevin_steps = parse_uint(k, v);
        };
        t["algo.ddpm_steps"] = [](ExperimentConfig& c, auto k, auto v) { c.algo.sampler.ddpm_steps = parse_uint(k, v); };
        t["algo.ddpm_beta_start"] = [](ExperimentConfig& c, auto k, auto v) {
            c.algo.sampler.ddpm_beta_start = parse_real(k, v);
        };
        t["algo.ddpm_beta_end"] = [](ExperimentConfig& c, auto k, auto v) {
            c.algo.sampler.ddpm_beta_end = parse_real(k, v);
        };

        t["experiment.n_seeds"] = [](ExperimentConfig& c, auto k, auto v) { c.n_seeds = parse_uint(k, v); };
        t["experiment.base_seed"] = [](ExperimentConfig& c, auto k, auto v) { c.base_seed = parse_uint(k, v); };
        t["experiment.parallel"] = [](ExperimentConfig& c, auto k, auto v) { c.parallel = parse_uint(k, v); };
        t["experiment.episodes"] = [](ExperimentConfig& c, auto k, auto v) { c.episodes = parse_uint(k, v); };
        t["experiment.output_dir"] = [](ExperimentConfig& c, auto, auto v) { c.output_dir = std::string(v); };
        t["experiment.mode"] = [](ExperimentConfig& c, auto, auto v) {
            if (v == "online") c.mode = LearningMode::online;
            else if (v == "offline") c.mode = LearningMode::offline;
            else throw ConfigError("experiment.mode must be online or offline");
        };

        t["init.theta0_mode"] = [](ExperimentConfig& c, auto, auto v) {
            if (v == "zeros") c.theta0_mode = Theta0Mode::zeros;
            else if (v == "explicit") c.theta0_mode = Theta0Mode::explicit_values;
            else throw ConfigError("init.theta0_mode must be zeros or explicit");
        };
        t["init.theta0"] = [](ExperimentConfig& c, auto k, auto v) { c.theta0.theta = parse_list<6>(k, v); };
        t["init.v0_mode"] = [](ExperimentConfig& c, auto, auto v) {
            if (v == "uniform01") c.v0_mode = V0Mode::uniform01;
            else if (v == "explicit") c.v0_mode = V0Mode::explicit_values;
            else throw ConfigError("init.v0_mode must be uniform01 or explicit");
        };
        t["init.v0"] = [](ExperimentConfig& c, auto k, auto v) { c.v0.v = parse_list<3>(k, v); };

        t["martingale.n_traj"] = [](ExperimentConfig& c, auto k, auto v) { c.martingale.n_traj = parse_uint(k, v); };
        t["martingale.test"] = [](ExperimentConfig& c, auto, auto v) { c.martingale.test = std::string(v); };
        t["martingale.q_offset"] = [](ExperimentConfig& c, auto k, auto v) { c.martingale.q_offset = parse_real(k, v); };
        t["martingale.score"] = [](ExperimentConfig& c, auto, auto v) { c.martingale.score = std::string(v); };

        t["sample.x"] = [](ExperimentConfig& c, auto k, auto v) { c.sample.x = parse_real(k, v); };
        t["sample.n_samples"] = [](ExperimentConfig& c, auto k, auto v) { c.sample.n_samples = parse_uint(k, v); };
        t["sample.score"] = [](ExperimentConfig& c, auto, auto v) { c.sample.score = std::string(v); };
        return t;
    }();
    return table;
}

}  // namespace

ExperimentConfig ExperimentConfig::reference() {
    ExperimentConfig c;
    c.algo.dt = 0.1;
    c.algo.n_steps = 100000;
    c.algo.alpha_theta = 0.01;
    c.algo.alpha_v = 0.01;
    c.algo.record_every = 1000;
    c.algo.sampler.kind = SamplerKind::langevin;
    c.algo.sampler.langevin_steps = 20;
    return c;
}

ExperimentConfig parse_config(std::string_view text, ManifestFields* manifest) {
    ExperimentConfig cfg;
    std::set<std::string, std::less<>> seen;
    bool algo_beta_set = false;
    bool algo_lambda_set = false;

    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (!seen.insert(std::string(key)).second) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");
        }
        if (key.starts_with("manifest.")) {
            if (manifest) (*manifest)[std::string(key)] = std::string(value);
            continue;
        }
        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
        }
        try {
            it->second(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (key == "algo.beta") algo_beta_set = true;
        if (key == "algo.lambda") algo_lambda_set = true;
    }
    if (!algo_beta_set) cfg.algo.beta = cfg.lq.beta;
    if (!algo_lambda_set) cfg.algo.lambda = cfg.lq.lambda;
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, ManifestFields* manifest) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), manifest);
}

std::string to_config_text(const ExperimentConfig& c) {
    std::ostringstream os;
    auto kv = [&os](std::string_view k, const std::string& v) { os << k << " = " << v << '\n'; };
    kv("lq.A", real_text(c.lq.A));
    kv("lq.B", real_text(c.lq.B));
    kv("lq.C", real_text(c.lq.C));
    kv("lq.D", real_text(c.lq.D));
    kv("lq.M", real_text(c.lq.M));
    kv("lq.N", real_text(c.lq.N));
    kv("lq.R", real_text(c.lq.R));
    kv("lq.P", real_text(c.lq.P));
    kv("lq.Pp", real_text(c.lq.Pp));
    kv("lq.beta", real_text(c.lq.beta));
    kv("lq.lambda", real_text(c.lq.lambda));
    kv("algo.dt", real_text(c.algo.dt));
    kv("algo.n_steps", std::to_string(c.algo.n_steps));
    kv("algo.alpha_theta", real_text(c.algo.alpha_theta));
    kv("algo.alpha_v", real_text(c.algo.alpha_v));
    kv("algo.beta", real_text(c.algo.beta));
    kv("algo.lambda", real_text(c.algo.lambda));
    kv("algo.seed", std::to_string(c.algo.seed));
    kv("algo.sampler", std::string(to_string(c.algo.sampler.kind)));
    kv("algo.sigma_a", real_text(c.algo.sampler.sigma_a));
    kv("algo.langevin_dt", real_text(c.algo.sampler.langevin_dt));
    kv("algo.langevin_steps", std::to_string(c.algo.sampler.langevin_steps));
    kv("algo.ddpm_steps", std::to_string(c.algo.sampler.ddpm_steps));
    kv("algo.ddpm_beta_start", real_text(c.algo.sampler.ddpm_beta_start));
    kv("algo.ddpm_beta_end", real_text(c.algo.sampler.ddpm_beta_end));
    kv("algo.record_every", std::to_string(c.algo.record_every));
    kv("algo.x0", real_text(c.algo.x0));
    kv("algo.a0", real_text(c.algo.a0));
    kv("experiment.n_seeds", std::to_string(c.n_seeds));
    kv("experiment.base_seed", std::to_string(c.base_seed));
    kv("experiment.parallel", std::to_string(c.parallel));
    kv("experiment.mode", c.mode == LearningMode::online ? "online" : "offline");
    kv("experiment.episodes", std::to_string(c.episodes));
    kv("experiment.output_dir", c.output_dir.string());
    kv("init.theta0_mode", c.theta0_mode == Theta0Mode::zeros ? "zeros" : "explicit");
    kv("init.theta0", list_text(c.theta0.theta));
    kv("init.v0_mode", c.v0_mode == V0Mode::uniform01 ? "uniform01" : "explicit");
    kv("init.v0", list_text(c.v0.v));
    kv("martingale.n_traj", std::to_string(c.martingale.n_traj));
    kv("martingale.test", c.martingale.test);
    kv("martingale.q_offset", real_text(c.martingale.q_offset));
    kv("martingale.score", c.martingale.score);
    kv("sample.x", real_text(c.sample.x));
    kv("sample.n_samples", std::to_string(c.sample.n_samples));
    kv("sample.score", c.sample.score);
    return os.str();
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

std::string config_hash(const ExperimentConfig& cfg) { return sha256_hex(to_config_text(cfg)); }

void validate(const ExperimentConfig& cfg) {
    validate(cfg.lq);
    validate(cfg.algo);
    if (cfg.n_seeds < 1) throw ConfigError("experiment.n_seeds must be >= 1");
    if (cfg.parallel < 1) throw ConfigError("experiment.parallel must be >= 1");
    if (!cfg.theta0.finite() || !cfg.v0.finite()) throw ConfigError("init parameters must be finite");
    if (cfg.martingale.score != "optimal" && cfg.martingale.score != "v0") {
        throw ConfigError("martingale.score must be optimal or v0");
    }
    if (cfg.sample.score != "optimal" && cfg.sample.score != "v0") {
        throw ConfigError("sample.score must be optimal or v0");
    }
}

}  // namespace cqsm
