#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fcms/errors.hpp"
#include "fcms/io.hpp"
#include "fcms/version.hpp"

namespace {

// Layering: built-in defaults <- config file <- command-line flags. The
// config file is applied before CLI11 parses, so flags win.
std::string config_path_from_argv(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config") return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return "";
}

}  // namespace

int main(int argc, char** argv) {
    fcms::io::RunConfig cfg;

    const std::string config_path = config_path_from_argv(argc, argv);
    if (!config_path.empty()) {
        try {
            fcms::io::apply_config_file(cfg, config_path);
        } catch (const fcms::ConfigError& e) {
            std::cerr << e.what() << "\n";
            return fcms::io::kExitConfigError;
        }
    }

    CLI::App app{"FCMS simulation and stability-analysis toolkit"};
    app.set_version_flag("--version", fcms::kVersion);
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_dummy;
    app.add_option("--config", config_dummy,
                   "flat 'key = value' config file ('#' comments); flags override");

    app.add_option("--kind", cfg.kind, "model kind: reduced|pair|saturated|perturbed|meanfield");
    app.add_option("--beta", cfg.beta, "coupling strength (> 0)");
    app.add_option("--gamma", cfg.gamma, "dissipation rate (0 < gamma < 1)");
    app.add_option("--eta", cfg.eta, "agent responsiveness (> 0)");
    app.add_option("--alpha", cfg.alpha, "per-agent damping, comma list");
    app.add_option("--noise-sigma", cfg.noise_sigma, "noise standard deviation (>= 0)");
    app.add_option("--noise-bound", cfg.noise_bound, "noise truncation in sigma units (> 0)");
    app.add_option("--noise-target", cfg.noise_target, "disagreement|per-agent");
    app.add_option("--epsilon", cfg.epsilon, "perturbation amplitude (>= 0)");
    app.add_option("--sigma-fn", cfg.sigma_fn, "perturbation shape: cubic|sin-d");
    app.add_option("--s0", cfg.s0, "initial environment value");
    app.add_option("--d0", cfg.d0, "initial disagreement");
    app.add_option("--x1", cfg.x1, "initial action of agent 1 (pair runs)");
    app.add_option("--x2", cfg.x2, "initial action of agent 2 (pair runs)");
    app.add_option("--n-agents", cfg.n_agents, "population size for mean-field runs");
    app.add_option("--betas", cfg.betas, "comma list of coupling values for sweeps");
    app.add_option("--n-list", cfg.n_list, "comma list of population sizes");
    app.add_option("--t-max", cfg.t_max, "number of steps (>= 1)");
    app.add_option("--burn-in", cfg.burn_in, "samples discarded before estimation");
    app.add_option("--radius", cfg.radius, "invariance probe box half-width");
    app.add_option("--samples", cfg.samples, "invariance probe sample count");
    app.add_option("--extent", cfg.extent, "phase grid half-width");
    app.add_option("--grid-n", cfg.grid_n, "phase grid points per axis");
    app.add_option("--overlay-steps", cfg.overlay_steps, "phase overlay length");
    app.add_option("--scale-mode", cfg.scale_mode, "deterministic|noisy");
    app.add_option("--replicates", cfg.replicates, "seed replicates for noisy scale runs");
    app.add_option("--variant", cfg.variant,
                   "ablate variant: coupling|persistence|dissipation|unresponsive|memory-blind");
    app.add_option("--constant-g", cfg.constant_g, "constant incentive (memory-blind)");
    double s0_alt = 0.0;
    auto* s0_alt_opt = app.add_option("--s0-alt", s0_alt,
                                      "second S0 for the persistence check");
    app.add_option("--eps-rec", cfg.eps_rec, "recovery threshold (0, 1)");
    app.add_option("--seed", cfg.seed, "PRNG seed");
    app.add_option("--out-dir", cfg.out_dir, "output directory");
    app.add_option("--format", cfg.format, "csv|json");

    app.add_subcommand("simulate", "run one trajectory of the selected model kind");
    app.add_subcommand("eigen", "spectral report at one parameter point");
    app.add_subcommand("sweep", "deterministic bifurcation sweep over a beta grid");
    app.add_subcommand("ews", "early-warning indicators along a subcritical beta grid");
    app.add_subcommand("ablate", "structural ablations and trivial-coupling checks");
    app.add_subcommand("invariance", "boundedness/absorption probe");
    app.add_subcommand("phase", "phase-portrait grid plus trajectory overlay");
    app.add_subcommand("scale", "population-size scaling experiment");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? fcms::io::kExitOk : fcms::io::kExitConfigError;
    }

    if (s0_alt_opt->count() > 0) cfg.s0_alt = s0_alt;
    for (const auto* sub : app.get_subcommands()) cfg.command = sub->get_name();

    try {
        return fcms::io::run(cfg);
    } catch (const fcms::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return fcms::io::kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return fcms::io::kExitConfigError;
    } catch (const fcms::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return fcms::io::kExitDivergence;
    } catch (const fcms::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return fcms::io::kExitNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return fcms::io::kExitNumericalError;
    }
}
