#include "fcms/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fcms/errors.hpp"
#include "fcms/version.hpp"

namespace fcms::io {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, "config error: " + key + " = '" + value +
                                   "' is not a number");
    }
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        if (!value.empty() && value.front() == '-') throw std::invalid_argument("negative");
        return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
        throw ConfigError(key, "config error: " + key + " = '" + value +
                                   "' is not a non-negative integer");
    }
}

void reject(const std::string& key, const std::string& value, const char* requirement) {
    throw ConfigError(key, "config error: " + key + " = " + value + " violates " +
                               requirement);
}

}  // namespace

const std::map<std::string, std::string>& config_keys() {
    static const std::map<std::string, std::string> keys = {
        {"kind", "model kind: reduced|pair|saturated|perturbed|meanfield"},
        {"beta", "coupling strength (> 0)"},
        {"gamma", "dissipation rate (0 < gamma < 1)"},
        {"eta", "agent responsiveness (> 0)"},
        {"alpha", "per-agent damping, comma list (entries >= 0; empty = all zero)"},
        {"noise-sigma", "noise standard deviation (>= 0)"},
        {"noise-bound", "noise truncation in sigma units (> 0)"},
        {"noise-target", "noise injection point: disagreement|per-agent"},
        {"epsilon", "perturbation amplitude (>= 0)"},
        {"sigma-fn", "perturbation shape: cubic|sin-d"},
        {"s0", "initial environment value"},
        {"d0", "initial disagreement"},
        {"x1", "initial action of agent 1 (pair runs)"},
        {"x2", "initial action of agent 2 (pair runs)"},
        {"n-agents", "population size for mean-field runs (>= 2)"},
        {"betas", "comma list of coupling values for sweeps"},
        {"n-list", "comma list of population sizes for scale runs"},
        {"t-max", "number of steps (>= 1)"},
        {"burn-in", "samples discarded before estimation"},
        {"radius", "half-width of the invariance probe box (> 0)"},
        {"samples", "number of probe initial conditions (>= 1)"},
        {"extent", "phase-portrait grid half-width (> 0)"},
        {"grid-n", "phase-portrait grid points per axis (>= 2)"},
        {"overlay-steps", "phase-portrait overlay length"},
        {"scale-mode", "scale experiment mode: deterministic|noisy"},
        {"replicates", "seed replicates for noisy scale runs (>= 1)"},
        {"variant", "ablate variant: coupling|persistence|dissipation|unresponsive|memory-blind"},
        {"constant-g", "constant incentive for the memory-blind variant"},
        {"s0-alt", "second S0 for the persistence insensitivity check"},
        {"eps-rec", "recovery threshold, relative (0 < eps-rec < 1)"},
        {"seed", "PRNG seed"},
        {"out-dir", "output directory"},
        {"format", "tabular output format: csv|json"},
    };
    return keys;
}

void apply_key_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "kind") cfg.kind = value;
    else if (key == "beta") cfg.beta = parse_double(key, value);
    else if (key == "gamma") cfg.gamma = parse_double(key, value);
    else if (key == "eta") cfg.eta = parse_double(key, value);
    else if (key == "alpha") cfg.alpha = value;
    else if (key == "noise-sigma") cfg.noise_sigma = parse_double(key, value);
    else if (key == "noise-bound") cfg.noise_bound = parse_double(key, value);
    else if (key == "noise-target") cfg.noise_target = value;
    else if (key == "epsilon") cfg.epsilon = parse_double(key, value);
    else if (key == "sigma-fn") cfg.sigma_fn = value;
    else if (key == "s0") cfg.s0 = parse_double(key, value);
    else if (key == "d0") cfg.d0 = parse_double(key, value);
    else if (key == "x1") cfg.x1 = parse_double(key, value);
    else if (key == "x2") cfg.x2 = parse_double(key, value);
    else if (key == "n-agents") cfg.n_agents = parse_uint(key, value);
    else if (key == "betas") cfg.betas = value;
    else if (key == "n-list") cfg.n_list = value;
    else if (key == "t-max") cfg.t_max = parse_uint(key, value);
    else if (key == "burn-in") cfg.burn_in = parse_uint(key, value);
    else if (key == "radius") cfg.radius = parse_double(key, value);
    else if (key == "samples") cfg.samples = parse_uint(key, value);
    else if (key == "extent") cfg.extent = parse_double(key, value);
    else if (key == "grid-n") cfg.grid_n = parse_uint(key, value);
    else if (key == "overlay-steps") cfg.overlay_steps = parse_uint(key, value);
    else if (key == "scale-mode") cfg.scale_mode = value;
    else if (key == "replicates") cfg.replicates = parse_uint(key, value);
    else if (key == "variant") cfg.variant = value;
    else if (key == "constant-g") cfg.constant_g = parse_double(key, value);
    else if (key == "s0-alt") cfg.s0_alt = parse_double(key, value);
    else if (key == "eps-rec") cfg.eps_rec = parse_double(key, value);
    else if (key == "seed") cfg.seed = parse_uint(key, value);
    else if (key == "out-dir") cfg.out_dir = value;
    else if (key == "format") cfg.format = value;
    else throw ConfigError(key, "config error: unknown key '" + key + "'");
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config", "config error: cannot open file " + path.string());
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config", "config error: " + path.string() + ":" +
                                            std::to_string(line_no) +
                                            " is not a 'key = value' line");
        }
        apply_key_value(cfg, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
}

std::vector<double> parse_double_list(const std::string& csv, const std::string& key) {
    std::vector<double> values;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string token = trim(item);
        if (token.empty()) continue;
        values.push_back(parse_double(key, token));
    }
    if (values.empty()) throw ConfigError(key, "config error: " + key + " is empty");
    return values;
}

std::vector<std::size_t> parse_size_list(const std::string& csv, const std::string& key) {
    std::vector<std::size_t> values;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string token = trim(item);
        if (token.empty()) continue;
        values.push_back(static_cast<std::size_t>(parse_uint(key, token)));
    }
    if (values.empty()) throw ConfigError(key, "config error: " + key + " is empty");
    return values;
}

void validate_config(const RunConfig& cfg) {
    if (!model_kind_from_string(cfg.kind)) {
        reject("kind", cfg.kind, "one of reduced|pair|saturated|perturbed|meanfield");
    }
    if (!(cfg.beta > 0.0)) reject("beta", format_double(cfg.beta), "beta > 0");
    if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) {
        reject("gamma", format_double(cfg.gamma), "0 < gamma < 1");
    }
    if (!(cfg.eta > 0.0)) reject("eta", format_double(cfg.eta), "eta > 0");
    if (!cfg.alpha.empty()) {
        for (double a : parse_double_list(cfg.alpha, "alpha")) {
            if (!(a >= 0.0)) reject("alpha", format_double(a), "alpha entries >= 0");
        }
    }
    if (!(cfg.noise_sigma >= 0.0)) {
        reject("noise-sigma", format_double(cfg.noise_sigma), "noise-sigma >= 0");
    }
    if (!(cfg.noise_bound > 0.0)) {
        reject("noise-bound", format_double(cfg.noise_bound), "noise-bound > 0");
    }
    if (!cfg.noise_target.empty() && cfg.noise_target != "disagreement" &&
        cfg.noise_target != "per-agent") {
        reject("noise-target", cfg.noise_target, "disagreement|per-agent");
    }
    if (!(cfg.epsilon >= 0.0)) reject("epsilon", format_double(cfg.epsilon), "epsilon >= 0");
    if (cfg.sigma_fn != "cubic" && cfg.sigma_fn != "sin-d") {
        reject("sigma-fn", cfg.sigma_fn, "cubic|sin-d");
    }
    if (cfg.n_agents < 2) reject("n-agents", std::to_string(cfg.n_agents), "n-agents >= 2");
    if (cfg.t_max < 1) reject("t-max", std::to_string(cfg.t_max), "t-max >= 1");
    if (!(cfg.radius > 0.0)) reject("radius", format_double(cfg.radius), "radius > 0");
    if (cfg.samples < 1) reject("samples", std::to_string(cfg.samples), "samples >= 1");
    if (!(cfg.extent > 0.0)) reject("extent", format_double(cfg.extent), "extent > 0");
    if (cfg.grid_n < 2) reject("grid-n", std::to_string(cfg.grid_n), "grid-n >= 2");
    if (cfg.scale_mode != "deterministic" && cfg.scale_mode != "noisy") {
        reject("scale-mode", cfg.scale_mode, "deterministic|noisy");
    }
    if (cfg.variant != "coupling" && cfg.variant != "persistence" &&
        cfg.variant != "dissipation" && cfg.variant != "unresponsive" &&
        cfg.variant != "memory-blind") {
        reject("variant", cfg.variant,
               "coupling|persistence|dissipation|unresponsive|memory-blind");
    }
    if (!(cfg.eps_rec > 0.0 && cfg.eps_rec < 1.0)) {
        reject("eps-rec", format_double(cfg.eps_rec), "0 < eps-rec < 1");
    }
    if (cfg.format != "csv" && cfg.format != "json") {
        reject("format", cfg.format, "csv|json");
    }
}

ModelParams to_model_params(const RunConfig& cfg) {
    std::vector<double> alpha;
    if (!cfg.alpha.empty()) alpha = parse_double_list(cfg.alpha, "alpha");
    return ModelParams(cfg.beta, cfg.gamma, cfg.eta, std::move(alpha), cfg.noise_sigma,
                       cfg.noise_bound, cfg.epsilon);
}

NoiseSpec to_noise_spec(const RunConfig& cfg, ModelKind kind) {
    NoiseSpec spec;
    spec.sigma = cfg.noise_sigma;
    spec.bound = cfg.noise_bound;
    spec.seed = cfg.seed;
    if (cfg.noise_target == "per-agent") {
        spec.target = NoiseTarget::PerAgent;
    } else if (cfg.noise_target == "disagreement") {
        spec.target = NoiseTarget::Disagreement;
    } else {
        spec.target = (kind == ModelKind::Pair || kind == ModelKind::Meanfield)
                          ? NoiseTarget::PerAgent
                          : NoiseTarget::Disagreement;
    }
    return spec;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void emit_csv(const CsvTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");

    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out << ',';
        out << table.columns[c];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, std::monostate>) {
                        // empty cell
                    } else if constexpr (std::is_same_v<T, double>) {
                        out << format_double(v);
                    } else if constexpr (std::is_same_v<T, std::string>) {
                        out << v;
                    } else {
                        out << v;
                    }
                },
                row[c]);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failure on " + path.string());
}

namespace {

json metadata_json(const RunMetadata& meta) {
    json j;
    j["tool_version"] = meta.tool_version;
    j["command"] = meta.command;
    j["prng"] = meta.prng;
    j["seed"] = meta.seed;
    j["diverged"] = meta.diverged;
    json cfg;
    for (const auto& [k, v] : meta.config) cfg[k] = v;
    j["config"] = cfg;
    return j;
}

json complex_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

}  // namespace

RunMetadata make_metadata(const RunConfig& cfg) {
    RunMetadata meta;
    meta.tool_version = kVersion;
    meta.command = cfg.command;
    meta.prng = NoiseStream::generator_id();
    meta.seed = cfg.seed;

    meta.config["command"] = cfg.command;
    meta.config["kind"] = cfg.kind;
    meta.config["beta"] = format_double(cfg.beta);
    meta.config["gamma"] = format_double(cfg.gamma);
    meta.config["eta"] = format_double(cfg.eta);
    meta.config["alpha"] = cfg.alpha;
    meta.config["noise-sigma"] = format_double(cfg.noise_sigma);
    meta.config["noise-bound"] = format_double(cfg.noise_bound);
    meta.config["noise-target"] = cfg.noise_target;
    meta.config["epsilon"] = format_double(cfg.epsilon);
    meta.config["sigma-fn"] = cfg.sigma_fn;
    meta.config["s0"] = format_double(cfg.s0);
    meta.config["d0"] = format_double(cfg.d0);
    meta.config["x1"] = format_double(cfg.x1);
    meta.config["x2"] = format_double(cfg.x2);
    meta.config["n-agents"] = std::to_string(cfg.n_agents);
    meta.config["betas"] = cfg.betas;
    meta.config["n-list"] = cfg.n_list;
    meta.config["t-max"] = std::to_string(cfg.t_max);
    meta.config["burn-in"] = std::to_string(cfg.burn_in);
    meta.config["radius"] = format_double(cfg.radius);
    meta.config["samples"] = std::to_string(cfg.samples);
    meta.config["extent"] = format_double(cfg.extent);
    meta.config["grid-n"] = std::to_string(cfg.grid_n);
    meta.config["overlay-steps"] = std::to_string(cfg.overlay_steps);
    meta.config["scale-mode"] = cfg.scale_mode;
    meta.config["replicates"] = std::to_string(cfg.replicates);
    meta.config["variant"] = cfg.variant;
    meta.config["constant-g"] = format_double(cfg.constant_g);
    meta.config["s0-alt"] = cfg.s0_alt ? format_double(*cfg.s0_alt) : "";
    meta.config["eps-rec"] = format_double(cfg.eps_rec);
    meta.config["seed"] = std::to_string(cfg.seed);
    meta.config["out-dir"] = cfg.out_dir;
    meta.config["format"] = cfg.format;
    return meta;
}

void emit_json(const std::string& report_body, const RunMetadata& meta,
               const std::filesystem::path& path) {
    json root;
    root["metadata"] = metadata_json(meta);
    root["report"] = json::parse(report_body);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << root.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failure on " + path.string());
}

std::string spectral_report_body(const SpectralReport& report) {
    json j;
    j["beta_c"] = report.beta_c;
    j["criterion_satisfied"] = report.criterion_satisfied;
    json eigs = json::array();
    for (const auto& z : report.eigenvalues) eigs.push_back(complex_json(z));
    j["eigenvalues"] = eigs;
    j["rho"] = report.rho;
    j["stable"] = report.stable;
    j["tau_theory"] = report.tau_theory ? json(*report.tau_theory) : json(nullptr);
    return j.dump();
}

std::string trajectory_body(const Trajectory& traj) {
    json j;
    j["kind"] = to_string(traj.kind);
    j["t"] = [&] {
        std::vector<std::size_t> t(traj.size());
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = i;
        return t;
    }();
    j["s"] = traj.s;
    j["d"] = traj.d;
    j["g1"] = traj.g1;
    j["g2"] = traj.g2;
    j["l_global"] = traj.l_global;
    if (!traj.x1.empty()) {
        j["x1"] = traj.x1;
        j["x2"] = traj.x2;
    }
    if (!traj.xbar.empty()) j["xbar"] = traj.xbar;
    j["seed"] = traj.seed ? json(*traj.seed) : json(nullptr);
    j["diverged_at"] = traj.diverged_at ? json(*traj.diverged_at) : json(nullptr);
    return j.dump();
}

std::string ews_body(const EwsReport& report) {
    json points = json::array();
    for (const auto& point : report.points) {
        json j;
        j["beta"] = point.beta;
        j["variance"] = point.variance;
        j["lag1_ac"] = point.lag1_ac;
        j["tau_theory"] = point.tau_theory;
        j["tau_measured"] = point.tau_measured;
        j["sample_count"] = point.sample_count;
        j["burn_in"] = point.burn_in;
        points.push_back(j);
    }
    json j;
    j["points"] = points;
    j["t_max"] = report.t_max;
    j["sigma"] = report.spec.sigma;
    j["bound"] = report.spec.bound;
    return j.dump();
}

std::string sweep_body(const experiments::SweepResult& result) {
    json points = json::array();
    for (const auto& point : result.points) {
        json j;
        j["beta"] = point.beta;
        j["regime"] = experiments::to_string(point.regime);
        j["rho"] = point.rho;
        j["final_abs_d"] = point.final_abs_d;
        j["converged"] = point.converged;
        j["diverged_at"] = point.diverged_at ? json(*point.diverged_at) : json(nullptr);
        j["tau_theory"] = point.tau_theory ? json(*point.tau_theory) : json(nullptr);
        points.push_back(j);
    }
    json j;
    j["points"] = points;
    return j.dump();
}

std::string invariance_body(const experiments::InvarianceReport& report) {
    json j;
    j["samples"] = report.samples;
    j["radius"] = report.radius;
    j["bound_ratio"] = report.bound_ratio;
    j["absorbed_fraction"] = report.absorbed_fraction;
    j["max_final_norm"] = report.max_final_norm;
    j["t_max"] = report.t_max;
    return j.dump();
}

std::string scale_body(const experiments::ScaleResult& result) {
    json points = json::array();
    for (const auto& point : result.points) {
        json j;
        j["n"] = point.n;
        j["variance"] = point.variance;
        points.push_back(j);
    }
    json j;
    j["points"] = points;
    j["mode"] = result.mode == experiments::ScaleMode::Deterministic ? "deterministic"
                                                                     : "noisy";
    j["slope"] = result.slope ? json(*result.slope) : json(nullptr);
    j["seed"] = result.seed;
    j["replicates"] = result.replicates;
    return j.dump();
}

CsvTable trajectory_table(const Trajectory& traj) {
    CsvTable table;
    table.columns = {"t", "S", "d", "G1", "G2", "L_global"};
    table.rows.reserve(traj.size());
    for (std::size_t t = 0; t < traj.size(); ++t) {
        table.rows.push_back({static_cast<std::uint64_t>(t), traj.s[t], traj.d[t],
                              traj.g1[t], traj.g2[t], traj.l_global[t]});
    }
    return table;
}

CsvTable ews_table(const EwsReport& report) {
    CsvTable table;
    table.columns = {"beta", "variance", "lag1_ac", "tau_theory", "tau_measured"};
    table.rows.reserve(report.points.size());
    for (const auto& point : report.points) {
        table.rows.push_back({point.beta, point.variance, point.lag1_ac, point.tau_theory,
                              point.tau_measured});
    }
    return table;
}

CsvTable sweep_table(const experiments::SweepResult& result) {
    CsvTable table;
    table.columns = {"beta", "regime", "rho", "final_abs_d", "converged", "diverged_at",
                     "tau_theory"};
    table.rows.reserve(result.points.size());
    for (const auto& point : result.points) {
        std::vector<CsvValue> row = {point.beta, experiments::to_string(point.regime),
                                     point.rho, point.final_abs_d,
                                     std::string(point.converged ? "true" : "false")};
        row.push_back(point.diverged_at
                          ? CsvValue(static_cast<std::uint64_t>(*point.diverged_at))
                          : CsvValue(std::monostate{}));
        row.push_back(point.tau_theory ? CsvValue(*point.tau_theory)
                                       : CsvValue(std::monostate{}));
        table.rows.push_back(std::move(row));
    }
    return table;
}

CsvTable scale_table(const experiments::ScaleResult& result) {
    CsvTable table;
    table.columns = {"N", "variance"};
    for (const auto& point : result.points) {
        table.rows.push_back({static_cast<std::uint64_t>(point.n), point.variance});
    }
    return table;
}

CsvTable phase_grid_table(const experiments::PhaseField& field) {
    CsvTable table;
    table.columns = {"S", "d", "dS", "dd"};
    table.rows.reserve(field.s.size());
    for (std::size_t i = 0; i < field.s.size(); ++i) {
        table.rows.push_back({field.s[i], field.d[i], field.ds[i], field.dd[i]});
    }
    return table;
}

namespace {

namespace fs = std::filesystem;

struct RunOutput {
    std::vector<std::string> files;
    bool diverged = false;
    int exit_code = kExitOk;
};

void write_tabular(const RunConfig& cfg, const RunMetadata& meta, const CsvTable& table,
                   const std::string& body, const std::string& stem, RunOutput& out) {
    const fs::path dir(cfg.out_dir);
    if (cfg.format == "json") {
        const fs::path path = dir / (stem + ".json");
        emit_json(body, meta, path);
        out.files.push_back(path.filename().string());
    } else {
        const fs::path path = dir / (stem + ".csv");
        emit_csv(table, path);
        out.files.push_back(path.filename().string());
    }
}

StateInit initial_state(const RunConfig& cfg, ModelKind kind) {
    switch (kind) {
        case ModelKind::Pair:
            return PairState{cfg.x1, cfg.x2, cfg.s0};
        case ModelKind::Meanfield: {
            PopulationState st;
            st.x.resize(cfg.n_agents);
            st.s.assign(cfg.n_agents, 0.0);
            std::mt19937_64 rng(cfg.seed);
            for (auto& v : st.x) v = 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
            return st;
        }
        default:
            return ReducedState{cfg.s0, cfg.d0};
    }
}

RunOutput dispatch(const RunConfig& cfg, const RunMetadata& meta_in) {
    RunOutput out;
    RunMetadata meta = meta_in;
    const ModelParams params = to_model_params(cfg);

    if (cfg.command == "eigen") {
        const SpectralReport report = params.alpha().size() > 1 && !params.alpha_homogeneous()
                                          ? spectral_report_full(params)
                                          : spectral_report(params);
        const fs::path path = fs::path(cfg.out_dir) / "spectral.json";
        emit_json(spectral_report_body(report), meta, path);
        out.files.push_back("spectral.json");
    } else if (cfg.command == "simulate") {
        const ModelKind kind = *model_kind_from_string(cfg.kind);
        const SigmaFn sigma =
            cfg.sigma_fn == "sin-d" ? SigmaFn(sigma_sin_disagreement)
                                    : SigmaFn(sigma_cubic_damping);
        const Trajectory traj =
            simulate(kind, initial_state(cfg, kind), params, cfg.t_max, cfg.seed, sigma);
        meta.diverged = out.diverged = traj.diverged();
        write_tabular(cfg, meta, trajectory_table(traj), trajectory_body(traj),
                      "trajectory", out);
        if (traj.diverged()) out.exit_code = kExitDivergence;
    } else if (cfg.command == "sweep") {
        const auto betas = parse_double_list(cfg.betas, "betas");
        const auto result = experiments::bifurcation_sweep(params, betas, cfg.t_max, cfg.d0);
        for (const auto& point : result.points) {
            if (point.diverged_at) meta.diverged = out.diverged = true;
        }
        write_tabular(cfg, meta, sweep_table(result), sweep_body(result), "sweep", out);
    } else if (cfg.command == "ews") {
        if (!(cfg.noise_sigma > 0.0)) {
            throw ConfigError("noise-sigma", "config error: ews needs noise-sigma > 0");
        }
        const auto betas = parse_double_list(cfg.betas, "betas");
        const NoiseSpec spec = to_noise_spec(cfg, ModelKind::Reduced);
        const auto report = ews_sweep(params, betas, spec, cfg.t_max, cfg.burn_in);
        write_tabular(cfg, meta, ews_table(report), ews_body(report), "ews", out);
    } else if (cfg.command == "ablate") {
        const ReducedState init{cfg.s0, cfg.d0};
        Trajectory traj;
        std::string extra_body;
        if (cfg.variant == "coupling") {
            traj = experiments::ablate_coupling(params, init, cfg.t_max);
        } else if (cfg.variant == "persistence") {
            traj = experiments::ablate_persistence(params, init, cfg.t_max);
            if (cfg.s0_alt) {
                const std::size_t step = experiments::persistence_insensitivity_step(
                    params, traj.d, cfg.s0, *cfg.s0_alt);
                extra_body = "{\"insensitive_from\": " + std::to_string(step) + "}";
            }
        } else if (cfg.variant == "dissipation") {
            traj = experiments::ablate_dissipation(params, init, cfg.t_max);
        } else {
            const auto variant = cfg.variant == "unresponsive"
                                     ? experiments::NecessityVariant::UnresponsiveAgents
                                     : experiments::NecessityVariant::MemoryBlindIncentives;
            auto result =
                experiments::necessity_check(variant, params, init, cfg.t_max, cfg.constant_g);
            traj = std::move(result.trajectory);
            extra_body = std::string("{\"verdict\": \"") + result.verdict + "\"}";
        }
        meta.diverged = out.diverged = traj.diverged();
        write_tabular(cfg, meta, trajectory_table(traj), trajectory_body(traj),
                      "ablate_" + cfg.variant, out);
        if (!extra_body.empty()) {
            const fs::path path = fs::path(cfg.out_dir) / "ablate_result.json";
            emit_json(extra_body, meta, path);
            out.files.push_back("ablate_result.json");
        }
    } else if (cfg.command == "invariance") {
        const auto report = experiments::forward_invariance_probe(params, cfg.radius,
                                                                  cfg.samples, cfg.t_max);
        const fs::path path = fs::path(cfg.out_dir) / "invariance.json";
        emit_json(invariance_body(report), meta, path);
        out.files.push_back("invariance.json");
    } else if (cfg.command == "phase") {
        experiments::PortraitKind kind;
        if (cfg.kind == "reduced") kind = experiments::PortraitKind::Reduced;
        else if (cfg.kind == "saturated") kind = experiments::PortraitKind::Saturated;
        else throw ConfigError("kind", "config error: phase needs kind reduced|saturated");
        const auto field = experiments::phase_portrait(
            kind, params, cfg.extent, cfg.grid_n, ReducedState{cfg.s0, cfg.d0},
            cfg.overlay_steps);
        const fs::path grid_path = fs::path(cfg.out_dir) / "phase_grid.csv";
        emit_csv(phase_grid_table(field), grid_path);
        out.files.push_back("phase_grid.csv");
        const fs::path overlay_path = fs::path(cfg.out_dir) / "phase_overlay.csv";
        emit_csv(trajectory_table(field.overlay), overlay_path);
        out.files.push_back("phase_overlay.csv");
    } else if (cfg.command == "scale") {
        if (cfg.scale_mode == "noisy" && cfg.burn_in + 2 >= cfg.t_max) {
            throw ConfigError("burn-in",
                              "config error: scale needs burn-in + 2 < t-max");
        }
        const auto n_values = parse_size_list(cfg.n_list, "n-list");
        const auto mode = cfg.scale_mode == "deterministic"
                              ? experiments::ScaleMode::Deterministic
                              : experiments::ScaleMode::Noisy;
        const double sigma = cfg.noise_sigma > 0.0 ? cfg.noise_sigma : 0.01;
        const auto result = experiments::scalability_sweep(
            params, n_values, mode, cfg.t_max, cfg.seed, cfg.replicates, cfg.burn_in,
            sigma);
        write_tabular(cfg, meta, scale_table(result), scale_body(result), "scale", out);
    } else {
        throw ConfigError("command", "config error: unknown subcommand '" + cfg.command +
                                         "'");
    }
    return out;
}

}  // namespace

int run(const RunConfig& cfg) {
    validate_config(cfg);
    std::filesystem::create_directories(cfg.out_dir);

    const auto start = std::chrono::steady_clock::now();
    const RunMetadata meta = make_metadata(cfg);
    const RunOutput out = dispatch(cfg, meta);
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start;

    json root = metadata_json(meta);
    root["diverged"] = out.diverged;
    root["duration_seconds"] = elapsed.count();
    root["outputs"] = out.files;
    std::ofstream meta_out(std::filesystem::path(cfg.out_dir) / "run_metadata.json",
                           std::ios::binary);
    meta_out << root.dump(2) << '\n';

    return out.exit_code;
}

}  // namespace fcms::io
