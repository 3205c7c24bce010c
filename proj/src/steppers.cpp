#include "fcms/steppers.hpp"

#include <cmath>
#include <stdexcept>

#include "fcms/errors.hpp"

namespace fcms {

double sigma_cubic_damping(double s, double /*d*/) { return -(s * s * s); }

double sigma_sin_disagreement(double /*s*/, double d) { return std::sin(d); }

namespace detail {

LinearCoeffs LinearCoeffs::from(const ModelParams& p) {
    return LinearCoeffs{p.beta(), p.gamma(), p.eta(), p.alpha_at(0), p.alpha_at(1)};
}

// The d-update runs through the same agent-space kernels as pair_step:
// d/2 plays the role of x1 on the antisymmetric manifold (halving and
// doubling are exact), so projecting a pair step and stepping the
// projection give bitwise-identical results there. Algebraically this is
// d' = (1 - eta alpha) d - 4 eta beta S.
ReducedState reduced_step_raw(const ReducedState& st, const LinearCoeffs& c) noexcept {
    const double g1 = local_incentive(st.s, c.beta);
    const double half_next = agent_update(0.5 * st.d, g1, c.eta, c.alpha1);
    return ReducedState{env_update(st.s, st.d, c.beta, c.gamma), 2.0 * half_next};
}

ReducedState memoryless_step_raw(const ReducedState& st, const LinearCoeffs& c) noexcept {
    const double g1 = local_incentive(st.s, c.beta);
    const double half_next = agent_update(0.5 * st.d, g1, c.eta, c.alpha1);
    return ReducedState{c.beta * st.d, 2.0 * half_next};
}

ReducedState constant_incentive_step_raw(const ReducedState& st, const LinearCoeffs& c,
                                         double g) noexcept {
    const double half_next = agent_update(0.5 * st.d, g, c.eta, c.alpha1);
    return ReducedState{env_update(st.s, st.d, c.beta, c.gamma), 2.0 * half_next};
}

ReducedState saturated_step_raw(const ReducedState& st, const LinearCoeffs& c) noexcept {
    const double g1 = local_incentive(st.s, c.beta);
    const double half_next = agent_update(0.5 * st.d, g1, c.eta, c.alpha1);
    return ReducedState{env_update(std::tanh(st.s), st.d, c.beta, c.gamma),
                        2.0 * half_next};
}

}  // namespace detail

ReducedState reduced_step(const ReducedState& st, const ModelParams& p) {
    require_finite(st);
    auto c = detail::LinearCoeffs::from(p);
    c.alpha1 = c.alpha2 = p.alpha_scalar();
    return detail::reduced_step_raw(st, c);
}

std::pair<double, double> incentive_field(double s, const ModelParams& p) {
    if (!std::isfinite(s)) throw DivergenceError("s", "non-finite environment value");
    const double g1 = detail::local_incentive(s, p.beta());
    return {g1, -g1};
}

double global_signal(double s) { return s * s; }

PairState pair_step(const PairState& st, const ModelParams& p) {
    require_finite(st);
    if (p.alpha().size() > 2) {
        throw std::invalid_argument("pair_step: alpha must have at most 2 entries");
    }
    const double g1 = detail::local_incentive(st.s, p.beta());
    return PairState{
        detail::agent_update(st.x1, g1, p.eta(), p.alpha_at(0)),
        detail::agent_update(st.x2, -g1, p.eta(), p.alpha_at(1)),
        detail::env_update(st.s, st.x1 - st.x2, p.beta(), p.gamma()),
    };
}

ReducedState saturated_step(const ReducedState& st, const ModelParams& p) {
    require_finite(st);
    auto c = detail::LinearCoeffs::from(p);
    c.alpha1 = c.alpha2 = p.alpha_scalar();
    return detail::saturated_step_raw(st, c);
}

ReducedState perturbed_step(const ReducedState& st, const ModelParams& p,
                            const SigmaFn& sigma) {
    require_finite(st);
    ReducedState next = reduced_step(st, p);
    if (p.epsilon() == 0.0) return next;
    const double perturbation = sigma(st.s, st.d);
    if (!std::isfinite(perturbation)) {
        throw DivergenceError("sigma", "perturbation sigma(S, d) returned a non-finite value");
    }
    next.s += p.epsilon() * perturbation;
    return next;
}

void meanfield_step_inplace(PopulationState& st, const ModelParams& p) {
    const std::size_t n = st.x.size();
    if (n < 2) throw std::invalid_argument("meanfield_step: population size must be >= 2");
    if (st.s.size() != n) {
        throw std::invalid_argument("meanfield_step: x and s must have identical length");
    }
    require_finite(st);

    const double beta = p.beta();
    const double gamma = p.gamma();
    const double eta = p.eta();
    const double mean = population_mean(st);

    for (std::size_t i = 0; i < n; ++i) {
        const double xi = st.x[i];
        const double si = st.s[i];
        const double gi = detail::local_incentive(si, beta);
        st.x[i] = detail::agent_update(xi, gi, eta, 0.0);
        st.s[i] = detail::env_update(si, 2.0 * (xi - mean), beta, gamma);
    }
}

PopulationState meanfield_step(const PopulationState& st, const ModelParams& p) {
    PopulationState next = st;
    meanfield_step_inplace(next, p);
    return next;
}

}  // namespace fcms
