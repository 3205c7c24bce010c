#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fcms/noise.hpp"
#include "fcms/params.hpp"
#include "fcms/state.hpp"
#include "fcms/steppers.hpp"

namespace fcms {

enum class ModelKind { Reduced, Pair, Saturated, Perturbed, Meanfield };

std::string to_string(ModelKind kind);
std::optional<ModelKind> model_kind_from_string(const std::string& name);

/// Trajectories are truncated and flagged as diverged once any state entry
/// goes non-finite or exceeds this magnitude. Supercritical runs escape
/// this radius long before 64-bit floats overflow.
inline constexpr double kEscapeRadius = 1e9;

/// Time-indexed record of a run, stored column-wise. Index t runs 0..T
/// contiguously; when diverged_at is set the offending step is the last
/// record kept.
///
/// Per-kind conventions: for the reduced family (s, d) is the full state;
/// for pair runs x1/x2 carry the agent snapshot; for mean-field runs s is
/// the mean trace and d the cross-sectional standard deviation of x.
struct Trajectory {
    std::vector<double> s;
    std::vector<double> d;
    std::vector<double> g1;
    std::vector<double> g2;
    std::vector<double> l_global;
    std::vector<double> x1;    // pair runs only
    std::vector<double> x2;    // pair runs only
    std::vector<double> xbar;  // mean-field runs only

    ModelKind kind = ModelKind::Reduced;
    std::optional<ModelParams> params;
    std::optional<std::uint64_t> seed;   // present iff noise was active
    std::optional<std::size_t> diverged_at;

    std::size_t size() const noexcept { return d.size(); }
    std::size_t last_t() const noexcept { return d.empty() ? 0 : d.size() - 1; }
    double final_d() const { return d.back(); }
    bool diverged() const noexcept { return diverged_at.has_value(); }
};

using StateInit = std::variant<ReducedState, PairState, PopulationState>;

/// Applies the selected stepper t_max times, recording every step
/// (t = 0 is the initial state). With p.noise_sigma() > 0, truncated
/// Gaussian noise is added after each deterministic update: on d for the
/// reduced family, per agent on x otherwise. Non-finite or escaping
/// states truncate the run and set diverged_at instead of throwing.
Trajectory simulate(ModelKind kind, const StateInit& init, const ModelParams& p,
                    std::size_t t_max,
                    std::optional<std::uint64_t> seed = std::nullopt,
                    const SigmaFn& sigma = sigma_cubic_damping);

/// Reduced-family run with an explicit noise specification; the engine
/// behind simulate() and the EWS sweeps.
Trajectory noisy_simulate(const ModelParams& p, const NoiseSpec& spec,
                          const ReducedState& init, std::size_t t_max);

}  // namespace fcms
