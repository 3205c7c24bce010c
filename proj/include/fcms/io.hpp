#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fcms/ews.hpp"
#include "fcms/experiments.hpp"
#include "fcms/simulate.hpp"
#include "fcms/spectral.hpp"

namespace fcms::io {

/// Exit-code taxonomy.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalError = 3;
inline constexpr int kExitDivergence = 4;

/// Flat run configuration: built-in baseline defaults, overlaid by a
/// `key = value` config file, overlaid by command-line flags. Keys are
/// the long flag names. Unknown keys are rejected.
struct RunConfig {
    std::string command;  // simulate|eigen|sweep|ews|ablate|invariance|phase|scale

    // model
    std::string kind = "reduced";
    double beta = 0.5;
    double gamma = 0.1;
    double eta = 0.01;
    std::string alpha = "";  // comma list; empty = all zero
    double noise_sigma = 0.0;
    double noise_bound = 3.0;
    std::string noise_target = "";  // disagreement|per-agent; empty = per kind
    double epsilon = 0.0;
    std::string sigma_fn = "cubic";  // cubic|sin-d

    // initial conditions
    double s0 = 0.0;
    double d0 = 2.0;
    double x1 = 1.0;
    double x2 = -1.0;
    std::uint64_t n_agents = 100;

    // experiment arguments
    std::string betas = "0.5,1.0,1.41,1.55";
    std::string n_list = "100,1000,10000,100000";
    std::uint64_t t_max = 2000;
    std::uint64_t burn_in = 1000;
    double radius = 1.0;
    std::uint64_t samples = 256;
    double extent = 2.0;
    std::uint64_t grid_n = 21;
    std::uint64_t overlay_steps = 500;
    std::string scale_mode = "noisy";  // deterministic|noisy
    std::uint64_t replicates = 8;
    std::string variant = "coupling";  // ablate variant
    double constant_g = 0.0;
    std::optional<double> s0_alt;  // second S0 for the persistence check
    double eps_rec = 0.36787944117144233;

    // output
    std::uint64_t seed = 42;
    std::string out_dir = "out";
    std::string format = "csv";  // csv|json
};

/// The known keys (long flag names) with one-line help text.
const std::map<std::string, std::string>& config_keys();

/// Parse a flat `key = value` file ('#' comments, blank lines allowed)
/// onto cfg. Unknown keys, malformed lines and un-parseable values throw
/// ConfigError with the offending key.
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// Set one key from its string form; throws ConfigError on unknown key or
/// bad value. The layering entry point shared by the file parser and CLI.
void apply_key_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Range-check the assembled config (same checks as ModelParams /
/// NoiseSpec, surfaced as ConfigError with field-level messages).
void validate_config(const RunConfig& cfg);

ModelParams to_model_params(const RunConfig& cfg);
NoiseSpec to_noise_spec(const RunConfig& cfg, ModelKind kind);
std::vector<double> parse_double_list(const std::string& csv, const std::string& key);
std::vector<std::size_t> parse_size_list(const std::string& csv, const std::string& key);

// --- serialization ---------------------------------------------------

using CsvValue = std::variant<std::monostate, double, std::int64_t, std::uint64_t, std::string>;

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<CsvValue>> rows;
};

/// Render a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

/// UTF-8 CSV: header row, comma separators, '%.17g' floats, row order
/// preserved, final newline. Empty cells for absent values.
void emit_csv(const CsvTable& table, const std::filesystem::path& path);

/// Deterministic run provenance embedded in every data JSON under the
/// top-level "metadata" key. Wall-clock duration is written only to the
/// sibling run_metadata.json so data files stay byte-identical across
/// reruns of the same (config, seed).
struct RunMetadata {
    std::string tool_version;
    std::string command;
    std::string prng;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> config;  // full resolved echo
    bool diverged = false;
};

RunMetadata make_metadata(const RunConfig& cfg);

/// Serialize `report_body` (a JSON object rendered by the typed builders
/// below) as {"metadata": ..., "report": ...} with sorted keys and
/// round-trip-exact numbers.
void emit_json(const std::string& report_body, const RunMetadata& meta,
               const std::filesystem::path& path);

// Typed JSON bodies (sorted keys, full precision).
std::string spectral_report_body(const SpectralReport& report);
std::string trajectory_body(const Trajectory& traj);
std::string ews_body(const EwsReport& report);
std::string sweep_body(const experiments::SweepResult& result);
std::string invariance_body(const experiments::InvarianceReport& report);
std::string scale_body(const experiments::ScaleResult& result);

CsvTable trajectory_table(const Trajectory& traj);
CsvTable ews_table(const EwsReport& report);
CsvTable sweep_table(const experiments::SweepResult& result);
CsvTable scale_table(const experiments::ScaleResult& result);
CsvTable phase_grid_table(const experiments::PhaseField& field);

/// Dispatch a validated config to the library and write the data files
/// plus run metadata into cfg.out_dir. Returns an exit code: divergence
/// in sweep-style runs is data (exit 0); a diverged plain simulation
/// returns kExitDivergence after writing its files.
int run(const RunConfig& cfg);

}  // namespace fcms::io
