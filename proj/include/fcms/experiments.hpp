#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fcms/params.hpp"
#include "fcms/simulate.hpp"
#include "fcms/spectral.hpp"

namespace fcms::experiments {

enum class RegimeLabel { Subcritical, CriticalBand, Supercritical };

std::string to_string(RegimeLabel label);

/// rho < 0.99 -> subcritical; 0.99 <= rho < 1 -> critical band;
/// rho >= 1 -> supercritical.
inline constexpr double kCriticalBandFloor = 0.99;
RegimeLabel classify_regime(double rho) noexcept;

/// A trajectory counts as converged when |d| stays below this threshold
/// over the final window of the run.
inline constexpr double kConvergenceTol = 1e-6;

struct SweepPoint {
    double beta = 0.0;
    RegimeLabel regime = RegimeLabel::Subcritical;
    double rho = 0.0;
    double final_abs_d = 0.0;
    bool converged = false;
    std::optional<std::size_t> diverged_at;
    std::optional<double> tau_theory;
};

struct SweepResult {
    std::vector<SweepPoint> points;  // ordered by beta
};

/// Deterministic reduced runs from (0, d0) across a beta grid with regime
/// labels, spectral radii and convergence metrics. Divergence is data,
/// not an error.
SweepResult bifurcation_sweep(const ModelParams& p, std::span<const double> betas,
                              std::size_t t_max, double d0);

/// beta forced to 0: S decays geometrically at rate (1-gamma), d is inert.
Trajectory ablate_coupling(const ModelParams& p, const ReducedState& init,
                           std::size_t t_max);

/// Memoryless environment S' = beta d (no S_t dependence).
Trajectory ablate_persistence(const ModelParams& p, const ReducedState& init,
                              std::size_t t_max);

/// Open-loop probe of A.5.2-style history insensitivity: drive the
/// memoryless environment with one fixed disagreement history from two
/// different S0; returns the first step from which the two S-sequences
/// are bitwise identical (always 1 for the memoryless map).
std::size_t persistence_insensitivity_step(const ModelParams& p,
                                           std::span<const double> d_history,
                                           double s0_a, double s0_b);

/// gamma forced to 0: stress accumulates without decay and the spectral
/// radius sqrt(1 + 4 eta beta^2) exceeds 1 for any eta, beta > 0.
Trajectory ablate_dissipation(const ModelParams& p, const ReducedState& init,
                              std::size_t t_max);

enum class NecessityVariant { UnresponsiveAgents, MemoryBlindIncentives };

struct NecessityResult {
    Trajectory trajectory;
    bool s_mediated = false;  // whether the d-path depends on S at all
    std::string verdict;
};

/// Trivial-coupling checks: eta = 0 (agents ignore incentives) or a
/// constant incentive pair (c, -c) replacing the S-derived field. The
/// verdict "no incentive-mediated coordination" is issued when the d-path
/// is provably independent of the environment trace.
NecessityResult necessity_check(NecessityVariant variant, const ModelParams& p,
                                const ReducedState& init, std::size_t t_max,
                                double constant_g = 0.0);

struct HistoryProfile {
    std::vector<double> state_gap;      // ||state_a - state_b||_inf at equal t
    std::vector<double> incentive_gap;  // |G1_a - G1_b| at equal t
    Trajectory run_a;
    Trajectory run_b;
};

/// Two pair runs from the same x0 but different S0; reports per-step state
/// and incentive gaps. s0_a == s0_b is an error.
HistoryProfile history_sensitivity(const ModelParams& p, std::pair<double, double> x0,
                                   double s0_a, double s0_b, std::size_t t_max);

struct InvarianceReport {
    std::size_t samples = 0;
    double radius = 0.0;
    double bound_ratio = 0.0;        // max_t ||state||_inf / radius over all samples
    double absorbed_fraction = 0.0;  // fraction ending inside the radius/10 box
    double max_final_norm = 0.0;
    std::size_t t_max = 0;
};

/// Boundedness/absorption probe over a Halton (bases 2, 3) sample of the
/// box [-radius, radius]^2. Requires stable parameters.
InvarianceReport forward_invariance_probe(const ModelParams& p, double radius,
                                          std::size_t samples, std::size_t t_max);

enum class PortraitKind { Reduced, Saturated };

struct PhaseField {
    std::size_t grid_n = 0;
    double extent = 0.0;
    std::vector<double> s;   // grid point coordinates
    std::vector<double> d;
    std::vector<double> ds;  // one-step displacements
    std::vector<double> dd;
    Trajectory overlay;
};

/// One-step displacement field on a uniform (S, d) grid plus a trajectory
/// overlay from overlay_start.
PhaseField phase_portrait(PortraitKind kind, const ModelParams& p, double extent,
                          std::size_t grid_n, const ReducedState& overlay_start,
                          std::size_t overlay_steps = 500);

/// Values of the |d| local maxima of a trajectory (spiral envelope probes).
std::vector<double> abs_d_extrema(const Trajectory& traj);

/// Final |d| of a saturated run. Requires stable parameters.
double nonlinear_convergence(const ModelParams& p, const ReducedState& init,
                             std::size_t t_max);

enum class ScaleMode { Deterministic, Noisy };

struct ScalePoint {
    std::size_t n = 0;
    double variance = 0.0;
};

struct ScaleResult {
    std::vector<ScalePoint> points;
    ScaleMode mode = ScaleMode::Deterministic;
    std::optional<double> slope;  // log-log fit, noisy mode
    std::uint64_t seed = 0;
    std::size_t replicates = 1;
};

/// Population-size sweep. Deterministic mode: uniform random init in
/// [-1, 1], final cross-sectional variance of x. Noisy mode: per-agent
/// bounded noise of fixed sigma from a synchronized start; variance of
/// the population-mean series over the post-burn-in window, averaged over
/// seed replicates, with a log-log slope fit against N.
ScaleResult scalability_sweep(const ModelParams& p, std::span<const std::size_t> n_values,
                              ScaleMode mode, std::size_t t_max, std::uint64_t seed,
                              std::size_t replicates = 8, std::size_t burn_in = 0,
                              double noise_sigma = 0.01);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace fcms::experiments
