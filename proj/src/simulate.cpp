#include "fcms/simulate.hpp"

#include <cmath>
#include <stdexcept>

namespace fcms {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Reduced: return "reduced";
        case ModelKind::Pair: return "pair";
        case ModelKind::Saturated: return "saturated";
        case ModelKind::Perturbed: return "perturbed";
        case ModelKind::Meanfield: return "meanfield";
    }
    return "unknown";
}

std::optional<ModelKind> model_kind_from_string(const std::string& name) {
    if (name == "reduced") return ModelKind::Reduced;
    if (name == "pair") return ModelKind::Pair;
    if (name == "saturated") return ModelKind::Saturated;
    if (name == "perturbed") return ModelKind::Perturbed;
    if (name == "meanfield") return ModelKind::Meanfield;
    return std::nullopt;
}

namespace {

bool escaped(double v) noexcept {
    return !std::isfinite(v) || std::abs(v) > kEscapeRadius;
}

struct ReducedFamilyEngine {
    const ModelParams& p;
    detail::LinearCoeffs coeffs;
    ModelKind kind;
    const SigmaFn* sigma;

    ReducedState step(const ReducedState& st, bool& bad) const {
        ReducedState next;
        switch (kind) {
            case ModelKind::Saturated:
                next = detail::saturated_step_raw(st, coeffs);
                break;
            case ModelKind::Perturbed: {
                next = detail::reduced_step_raw(st, coeffs);
                if (p.epsilon() != 0.0) {
                    const double perturbation = (*sigma)(st.s, st.d);
                    if (!std::isfinite(perturbation)) {
                        bad = true;
                        return next;
                    }
                    next.s += p.epsilon() * perturbation;
                }
                break;
            }
            default:
                next = detail::reduced_step_raw(st, coeffs);
                break;
        }
        return next;
    }
};

void reserve_columns(Trajectory& traj, std::size_t t_max) {
    const std::size_t cap = t_max + 1;
    traj.s.reserve(cap);
    traj.d.reserve(cap);
    traj.g1.reserve(cap);
    traj.g2.reserve(cap);
    traj.l_global.reserve(cap);
}

void record_reduced(Trajectory& traj, const ReducedState& st, double beta) {
    const double g1 = detail::local_incentive(st.s, beta);
    traj.s.push_back(st.s);
    traj.d.push_back(st.d);
    traj.g1.push_back(g1);
    traj.g2.push_back(-g1);
    traj.l_global.push_back(global_signal(st.s));
}

Trajectory run_reduced_family(ModelKind kind, const ReducedState& init,
                              const ModelParams& p, const NoiseSpec& spec,
                              std::size_t t_max, const SigmaFn& sigma) {
    require_finite(init);
    auto coeffs = detail::LinearCoeffs::from(p);
    coeffs.alpha1 = coeffs.alpha2 = p.alpha_scalar();
    const ReducedFamilyEngine engine{p, coeffs, kind, &sigma};

    Trajectory traj;
    traj.kind = kind;
    traj.params = p;
    const bool noisy = spec.sigma > 0.0;
    if (noisy) traj.seed = spec.seed;
    NoiseStream stream(spec);
    reserve_columns(traj, t_max);

    ReducedState st = init;
    record_reduced(traj, st, p.beta());
    for (std::size_t t = 1; t <= t_max; ++t) {
        bool bad = false;
        ReducedState next = engine.step(st, bad);
        if (noisy) next.d += stream.draw();
        record_reduced(traj, next, p.beta());
        if (bad || escaped(next.s) || escaped(next.d)) {
            traj.diverged_at = t;
            break;
        }
        st = next;
    }
    return traj;
}

Trajectory run_pair(const PairState& init, const ModelParams& p, const NoiseSpec& spec,
                    std::size_t t_max) {
    require_finite(init);
    Trajectory traj;
    traj.kind = ModelKind::Pair;
    traj.params = p;
    const bool noisy = spec.sigma > 0.0;
    if (noisy) traj.seed = spec.seed;
    NoiseStream stream(spec);
    reserve_columns(traj, t_max);
    traj.x1.reserve(t_max + 1);
    traj.x2.reserve(t_max + 1);

    auto record = [&](const PairState& st) {
        const double g1 = detail::local_incentive(st.s, p.beta());
        traj.s.push_back(st.s);
        traj.d.push_back(st.x1 - st.x2);
        traj.g1.push_back(g1);
        traj.g2.push_back(-g1);
        traj.l_global.push_back(global_signal(st.s));
        traj.x1.push_back(st.x1);
        traj.x2.push_back(st.x2);
    };

    PairState st = init;
    record(st);
    for (std::size_t t = 1; t <= t_max; ++t) {
        PairState next = pair_step(st, p);
        if (noisy) {
            if (spec.target == NoiseTarget::PerAgent) {
                next.x1 += stream.draw();
                next.x2 += stream.draw();
            } else {
                const double xi = stream.draw();
                next.x1 += 0.5 * xi;
                next.x2 -= 0.5 * xi;
            }
        }
        record(next);
        if (escaped(next.x1) || escaped(next.x2) || escaped(next.s)) {
            traj.diverged_at = t;
            break;
        }
        st = next;
    }
    return traj;
}

Trajectory run_meanfield(const PopulationState& init, const ModelParams& p,
                         const NoiseSpec& spec, std::size_t t_max) {
    const std::size_t n = init.x.size();
    if (n < 2 || init.s.size() != n) {
        throw std::invalid_argument(
            "meanfield run: need x and s of identical length >= 2");
    }
    require_finite(init);

    Trajectory traj;
    traj.kind = ModelKind::Meanfield;
    traj.params = p;
    const bool noisy = spec.sigma > 0.0;
    if (noisy) traj.seed = spec.seed;
    NoiseStream stream(spec);
    reserve_columns(traj, t_max);
    traj.xbar.reserve(t_max + 1);

    const double beta = p.beta();
    const double gamma = p.gamma();
    const double eta = p.eta();
    const double inv_n = 1.0 / static_cast<double>(n);

    PopulationState st = init;

    // Cross-sectional stats of the current state, refreshed each pass.
    double mean = population_mean(st);
    double dev_sq = 0.0;
    double s_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = st.x[i] - mean;
        dev_sq += e * e;
        s_sum += st.s[i];
    }

    auto record = [&](double m, double var_times_n, double s_total) {
        const double s_mean = s_total * inv_n;
        const double g1 = detail::local_incentive(s_mean, beta);
        traj.s.push_back(s_mean);
        traj.d.push_back(std::sqrt(var_times_n * inv_n));
        traj.g1.push_back(g1);
        traj.g2.push_back(-g1);
        traj.l_global.push_back(global_signal(s_mean));
        traj.xbar.push_back(m);
    };

    record(mean, dev_sq, s_sum);
    for (std::size_t t = 1; t <= t_max; ++t) {
        double next_sum = 0.0;
        double next_s_sum = 0.0;
        double max_abs = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double xi = st.x[i];
            const double si = st.s[i];
            const double gi = detail::local_incentive(si, beta);
            double x_next = detail::agent_update(xi, gi, eta, 0.0);
            if (noisy) x_next += stream.draw();
            const double s_next = detail::env_update(si, 2.0 * (xi - mean), beta, gamma);
            st.x[i] = x_next;
            st.s[i] = s_next;
            next_sum += x_next;
            next_s_sum += s_next;
            max_abs = std::max(max_abs, std::max(std::abs(x_next), std::abs(s_next)));
        }
        mean = next_sum * inv_n;
        dev_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = st.x[i] - mean;
            dev_sq += e * e;
        }
        record(mean, dev_sq, next_s_sum);
        if (!std::isfinite(max_abs) || max_abs > kEscapeRadius) {
            traj.diverged_at = t;
            break;
        }
    }
    return traj;
}

NoiseTarget default_target(ModelKind kind) {
    switch (kind) {
        case ModelKind::Pair:
        case ModelKind::Meanfield:
            return NoiseTarget::PerAgent;
        default:
            return NoiseTarget::Disagreement;
    }
}

}  // namespace

Trajectory simulate(ModelKind kind, const StateInit& init, const ModelParams& p,
                    std::size_t t_max, std::optional<std::uint64_t> seed,
                    const SigmaFn& sigma) {
    if (t_max < 1) throw std::invalid_argument("simulate: t_max must be >= 1");

    NoiseSpec spec;
    spec.sigma = p.noise_sigma();
    spec.bound = p.noise_bound();
    spec.target = default_target(kind);
    spec.seed = seed.value_or(0);

    switch (kind) {
        case ModelKind::Reduced:
        case ModelKind::Saturated:
        case ModelKind::Perturbed: {
            const auto* st = std::get_if<ReducedState>(&init);
            if (!st) {
                throw std::invalid_argument(
                    "simulate: " + to_string(kind) + " needs a ReducedState init");
            }
            return run_reduced_family(kind, *st, p, spec, t_max, sigma);
        }
        case ModelKind::Pair: {
            const auto* st = std::get_if<PairState>(&init);
            if (!st) throw std::invalid_argument("simulate: pair needs a PairState init");
            return run_pair(*st, p, spec, t_max);
        }
        case ModelKind::Meanfield: {
            const auto* st = std::get_if<PopulationState>(&init);
            if (!st) {
                throw std::invalid_argument(
                    "simulate: meanfield needs a PopulationState init");
            }
            return run_meanfield(*st, p, spec, t_max);
        }
    }
    throw std::invalid_argument("simulate: unknown model kind");
}

Trajectory noisy_simulate(const ModelParams& p, const NoiseSpec& spec,
                          const ReducedState& init, std::size_t t_max) {
    if (t_max < 1) throw std::invalid_argument("noisy_simulate: t_max must be >= 1");
    spec.validate();
    return run_reduced_family(ModelKind::Reduced, init, p, spec, t_max,
                              sigma_cubic_damping);
}

}  // namespace fcms
