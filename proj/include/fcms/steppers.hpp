#pragma once

#include <functional>
#include <utility>

#include "fcms/params.hpp"
#include "fcms/state.hpp"

namespace fcms {

/// Nonlinear perturbation term sigma(S, d) for the perturbed environment
/// update S' = (1-gamma)S + beta d + epsilon sigma(S, d).
using SigmaFn = std::function<double(double, double)>;

/// Built-in perturbations: cubic damping and a transcendental coupling.
double sigma_cubic_damping(double s, double d);
double sigma_sin_disagreement(double s, double d);

namespace detail {

// Arithmetic kernels shared by every stepper. All cross-stepper bitwise
// equivalences (pair vs reduced projection, mean-field at N = 2 vs pair)
// hold because the same expressions are evaluated in the same order.
inline double env_update(double s, double coupling, double beta, double gamma) noexcept {
    return (1.0 - gamma) * s + beta * coupling;
}

inline double local_incentive(double s, double beta) noexcept {
    return -2.0 * beta * s;
}

inline double agent_update(double x, double g, double eta, double alpha) noexcept {
    return (1.0 - eta * alpha) * x + eta * g;
}

// Raw linear coefficients. gamma and beta may be zero here; the ablation
// variants (A.8-style beta = 0, A.10-style gamma = 0) run through this
// layer, below the ModelParams range checks.
struct LinearCoeffs {
    double beta;
    double gamma;
    double eta;
    double alpha1 = 0.0;
    double alpha2 = 0.0;

    static LinearCoeffs from(const ModelParams& p);
};

ReducedState reduced_step_raw(const ReducedState& st, const LinearCoeffs& c) noexcept;

// Memoryless environment: S' = beta d (no dependence on S).
ReducedState memoryless_step_raw(const ReducedState& st, const LinearCoeffs& c) noexcept;

// Constant incentive pair (g, -g) replacing the S-derived field.
ReducedState constant_incentive_step_raw(const ReducedState& st, const LinearCoeffs& c,
                                         double g) noexcept;

ReducedState saturated_step_raw(const ReducedState& st, const LinearCoeffs& c) noexcept;

}  // namespace detail

/// One step of the reduced (S, d) system:
///   S' = (1 - gamma) S + beta d
///   d' = (1 - eta alpha) d - 4 eta beta S
/// Requires homogeneous alpha. Throws DivergenceError on non-finite input.
ReducedState reduced_step(const ReducedState& st, const ModelParams& p);

/// Incentive pair (G1, G2) = (-2 beta s, +2 beta s). G2 is the exact
/// negation of G1, so the components sum to zero exactly.
std::pair<double, double> incentive_field(double s, const ModelParams& p);

/// Global coordination signal L = s^2.
double global_signal(double s);

/// One step of the full two-agent loop. The environment update uses the
/// pre-update disagreement; both agents see the pre-update S.
PairState pair_step(const PairState& st, const ModelParams& p);

/// Reduced step with the environment response saturated:
///   S' = (1 - gamma) tanh(S) + beta d.
/// The d-update is identical to reduced_step.
ReducedState saturated_step(const ReducedState& st, const ModelParams& p);

/// Reduced step with an additional perturbation term epsilon sigma(S, d)
/// on the environment update. epsilon = 0 reduces exactly to reduced_step.
ReducedState perturbed_step(const ReducedState& st, const ModelParams& p,
                            const SigmaFn& sigma = sigma_cubic_damping);

/// One step of the N-agent mean-field loop:
///   xbar = mean(x)
///   S_i' = (1 - gamma) S_i + 2 beta (x_i - xbar)
///   x_i' = x_i + eta (-2 beta S_i)
/// Updates in place; all reductions run in ascending agent order.
void meanfield_step_inplace(PopulationState& st, const ModelParams& p);

/// Value-returning wrapper around meanfield_step_inplace.
PopulationState meanfield_step(const PopulationState& st, const ModelParams& p);

}  // namespace fcms
