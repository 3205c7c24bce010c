#include "fcms/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "fcms/errors.hpp"
#include "fcms/ews.hpp"
#include "fcms/noise.hpp"

namespace fcms::experiments {

std::string to_string(RegimeLabel label) {
    switch (label) {
        case RegimeLabel::Subcritical: return "subcritical";
        case RegimeLabel::CriticalBand: return "critical_band";
        case RegimeLabel::Supercritical: return "supercritical";
    }
    return "unknown";
}

RegimeLabel classify_regime(double rho) noexcept {
    if (rho >= 1.0) return RegimeLabel::Supercritical;
    if (rho >= kCriticalBandFloor) return RegimeLabel::CriticalBand;
    return RegimeLabel::Subcritical;
}

namespace {

// Reduced-family run under an arbitrary step map, with the usual
// truncate-and-flag divergence handling. g_of_s supplies the recorded
// incentive pair.
template <typename StepFn, typename IncentiveFn>
Trajectory run_custom(const ModelParams& p, const ReducedState& init, std::size_t t_max,
                      StepFn&& step, IncentiveFn&& g_of_s) {
    require_finite(init);
    Trajectory traj;
    traj.kind = ModelKind::Reduced;
    traj.params = p;

    auto record = [&](const ReducedState& st) {
        const auto [g1, g2] = g_of_s(st.s);
        traj.s.push_back(st.s);
        traj.d.push_back(st.d);
        traj.g1.push_back(g1);
        traj.g2.push_back(g2);
        traj.l_global.push_back(global_signal(st.s));
    };

    ReducedState st = init;
    record(st);
    for (std::size_t t = 1; t <= t_max; ++t) {
        const ReducedState next = step(st);
        record(next);
        if (!std::isfinite(next.s) || !std::isfinite(next.d) ||
            std::abs(next.s) > kEscapeRadius || std::abs(next.d) > kEscapeRadius) {
            traj.diverged_at = t;
            break;
        }
        st = next;
    }
    return traj;
}

double tail_max_abs_d(const Trajectory& traj, std::size_t window) {
    const std::size_t n = traj.d.size();
    const std::size_t begin = n > window ? n - window : 0;
    double m = 0.0;
    for (std::size_t i = begin; i < n; ++i) m = std::max(m, std::abs(traj.d[i]));
    return m;
}

double halton(std::size_t index, unsigned base) {
    double f = 1.0;
    double r = 0.0;
    std::size_t i = index;
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

}  // namespace

SweepResult bifurcation_sweep(const ModelParams& p, std::span<const double> betas,
                              std::size_t t_max, double d0) {
    if (betas.empty()) throw std::invalid_argument("bifurcation_sweep: empty beta grid");

    std::vector<double> grid(betas.begin(), betas.end());
    std::sort(grid.begin(), grid.end());

    SweepResult result;
    result.points.reserve(grid.size());
    for (double beta : grid) {
        const ModelParams pb = p.with_beta(beta).with_noise(0.0);
        const double rho = spectral_radius(reduced_jacobian(pb));

        SweepPoint point;
        point.beta = beta;
        point.rho = rho;
        point.regime = classify_regime(rho);
        if (rho < 1.0) point.tau_theory = -1.0 / std::log(rho);

        const Trajectory traj =
            simulate(ModelKind::Reduced, ReducedState{0.0, d0}, pb, t_max);
        point.final_abs_d = std::abs(traj.final_d());
        point.diverged_at = traj.diverged_at;
        point.converged =
            !traj.diverged() && tail_max_abs_d(traj, 100) < kConvergenceTol;
        result.points.push_back(point);
    }
    return result;
}

Trajectory ablate_coupling(const ModelParams& p, const ReducedState& init,
                           std::size_t t_max) {
    detail::LinearCoeffs c{0.0, p.gamma(), p.eta(), p.alpha_scalar(), p.alpha_scalar()};
    return run_custom(
        p, init, t_max, [&](const ReducedState& st) { return detail::reduced_step_raw(st, c); },
        [](double) { return std::pair<double, double>{0.0, 0.0}; });
}

Trajectory ablate_persistence(const ModelParams& p, const ReducedState& init,
                              std::size_t t_max) {
    auto c = detail::LinearCoeffs::from(p);
    c.alpha1 = c.alpha2 = p.alpha_scalar();
    return run_custom(
        p, init, t_max,
        [&](const ReducedState& st) { return detail::memoryless_step_raw(st, c); },
        [&](double s) {
            const double g1 = detail::local_incentive(s, p.beta());
            return std::pair<double, double>{g1, -g1};
        });
}

std::size_t persistence_insensitivity_step(const ModelParams& p,
                                           std::span<const double> d_history,
                                           double s0_a, double s0_b) {
    if (d_history.empty()) {
        throw std::invalid_argument("persistence_insensitivity_step: empty history");
    }
    const double beta = p.beta();
    std::vector<double> sa(d_history.size() + 1);
    std::vector<double> sb(d_history.size() + 1);
    sa[0] = s0_a;
    sb[0] = s0_b;
    for (std::size_t t = 0; t < d_history.size(); ++t) {
        sa[t + 1] = beta * d_history[t];
        sb[t + 1] = beta * d_history[t];
    }
    std::size_t first = sa.size();
    for (std::size_t t = sa.size(); t-- > 0;) {
        if (sa[t] == sb[t]) {
            first = t;
        } else {
            break;
        }
    }
    return first;
}

Trajectory ablate_dissipation(const ModelParams& p, const ReducedState& init,
                              std::size_t t_max) {
    detail::LinearCoeffs c{p.beta(), 0.0, p.eta(), p.alpha_scalar(), p.alpha_scalar()};
    return run_custom(
        p, init, t_max, [&](const ReducedState& st) { return detail::reduced_step_raw(st, c); },
        [&](double s) {
            const double g1 = detail::local_incentive(s, p.beta());
            return std::pair<double, double>{g1, -g1};
        });
}

NecessityResult necessity_check(NecessityVariant variant, const ModelParams& p,
                                const ReducedState& init, std::size_t t_max,
                                double constant_g) {
    NecessityResult result;

    auto run_variant = [&](const ReducedState& start) {
        if (variant == NecessityVariant::UnresponsiveAgents) {
            detail::LinearCoeffs c{p.beta(), p.gamma(), 0.0, p.alpha_scalar(),
                                   p.alpha_scalar()};
            return run_custom(
                p, start, t_max,
                [&](const ReducedState& st) { return detail::reduced_step_raw(st, c); },
                [&](double s) {
                    const double g1 = detail::local_incentive(s, p.beta());
                    return std::pair<double, double>{g1, -g1};
                });
        }
        auto c = detail::LinearCoeffs::from(p);
        c.alpha1 = c.alpha2 = p.alpha_scalar();
        return run_custom(
            p, start, t_max,
            [&](const ReducedState& st) {
                return detail::constant_incentive_step_raw(st, c, constant_g);
            },
            [&](double) { return std::pair<double, double>{constant_g, -constant_g}; });
    };

    result.trajectory = run_variant(init);

    // The d-path is S-mediated iff changing only S0 can change it.
    const Trajectory shifted = run_variant(ReducedState{init.s + 1.0, init.d});
    result.s_mediated = false;
    const std::size_t n = std::min(result.trajectory.d.size(), shifted.d.size());
    for (std::size_t t = 0; t < n; ++t) {
        if (result.trajectory.d[t] != shifted.d[t]) {
            result.s_mediated = true;
            break;
        }
    }
    result.verdict = result.s_mediated ? "incentive-mediated coordination present"
                                       : "no incentive-mediated coordination";
    return result;
}

HistoryProfile history_sensitivity(const ModelParams& p, std::pair<double, double> x0,
                                   double s0_a, double s0_b, std::size_t t_max) {
    if (s0_a == s0_b) {
        throw std::invalid_argument("history_sensitivity: s0_a and s0_b must differ");
    }
    const ModelParams pd = p.with_noise(0.0);
    HistoryProfile profile;
    profile.run_a = simulate(ModelKind::Pair, PairState{x0.first, x0.second, s0_a}, pd,
                             t_max);
    profile.run_b = simulate(ModelKind::Pair, PairState{x0.first, x0.second, s0_b}, pd,
                             t_max);

    const std::size_t n = std::min(profile.run_a.size(), profile.run_b.size());
    profile.state_gap.reserve(n);
    profile.incentive_gap.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double gx1 = std::abs(profile.run_a.x1[t] - profile.run_b.x1[t]);
        const double gx2 = std::abs(profile.run_a.x2[t] - profile.run_b.x2[t]);
        const double gs = std::abs(profile.run_a.s[t] - profile.run_b.s[t]);
        profile.state_gap.push_back(std::max({gx1, gx2, gs}));
        profile.incentive_gap.push_back(std::abs(profile.run_a.g1[t] - profile.run_b.g1[t]));
    }
    return profile;
}

InvarianceReport forward_invariance_probe(const ModelParams& p, double radius,
                                          std::size_t samples, std::size_t t_max) {
    if (!stability_criterion(p)) {
        throw std::invalid_argument("forward_invariance_probe: parameters must satisfy "
                                    "the stability criterion");
    }
    if (!(radius > 0.0) || samples == 0) {
        throw std::invalid_argument("forward_invariance_probe: need radius > 0 and "
                                    "samples >= 1");
    }

    auto coeffs = detail::LinearCoeffs::from(p);
    coeffs.alpha1 = coeffs.alpha2 = p.alpha_scalar();

    InvarianceReport report;
    report.samples = samples;
    report.radius = radius;
    report.t_max = t_max;

    double max_ratio = 0.0;
    double max_final = 0.0;
    std::size_t absorbed = 0;
    const double inner = radius / 10.0;

    for (std::size_t i = 1; i <= samples; ++i) {
        ReducedState st{radius * (2.0 * halton(i, 2) - 1.0),
                        radius * (2.0 * halton(i, 3) - 1.0)};
        double peak = std::max(std::abs(st.s), std::abs(st.d));
        for (std::size_t t = 0; t < t_max; ++t) {
            st = detail::reduced_step_raw(st, coeffs);
            peak = std::max(peak, std::max(std::abs(st.s), std::abs(st.d)));
        }
        const double final_norm = std::max(std::abs(st.s), std::abs(st.d));
        max_ratio = std::max(max_ratio, peak / radius);
        max_final = std::max(max_final, final_norm);
        if (final_norm <= inner) ++absorbed;
    }

    report.bound_ratio = max_ratio;
    report.absorbed_fraction =
        static_cast<double>(absorbed) / static_cast<double>(samples);
    report.max_final_norm = max_final;
    return report;
}

PhaseField phase_portrait(PortraitKind kind, const ModelParams& p, double extent,
                          std::size_t grid_n, const ReducedState& overlay_start,
                          std::size_t overlay_steps) {
    if (grid_n < 2) throw std::invalid_argument("phase_portrait: grid_n must be >= 2");
    if (!(extent > 0.0)) throw std::invalid_argument("phase_portrait: extent must be > 0");

    auto coeffs = detail::LinearCoeffs::from(p);
    coeffs.alpha1 = coeffs.alpha2 = p.alpha_scalar();
    const bool saturated = kind == PortraitKind::Saturated;

    PhaseField field;
    field.grid_n = grid_n;
    field.extent = extent;
    const std::size_t cells = grid_n * grid_n;
    field.s.reserve(cells);
    field.d.reserve(cells);
    field.ds.reserve(cells);
    field.dd.reserve(cells);

    const double step_width = 2.0 * extent / static_cast<double>(grid_n - 1);
    for (std::size_t i = 0; i < grid_n; ++i) {
        const double s = -extent + static_cast<double>(i) * step_width;
        for (std::size_t j = 0; j < grid_n; ++j) {
            const double d = -extent + static_cast<double>(j) * step_width;
            const ReducedState st{s, d};
            const ReducedState next = saturated ? detail::saturated_step_raw(st, coeffs)
                                                : detail::reduced_step_raw(st, coeffs);
            field.s.push_back(s);
            field.d.push_back(d);
            field.ds.push_back(next.s - s);
            field.dd.push_back(next.d - d);
        }
    }

    field.overlay = simulate(saturated ? ModelKind::Saturated : ModelKind::Reduced,
                             overlay_start, p.with_noise(0.0), overlay_steps);
    return field;
}

std::vector<double> abs_d_extrema(const Trajectory& traj) {
    std::vector<double> extrema;
    const auto& d = traj.d;
    for (std::size_t t = 1; t + 1 < d.size(); ++t) {
        const double prev = std::abs(d[t - 1]);
        const double cur = std::abs(d[t]);
        const double next = std::abs(d[t + 1]);
        if (cur >= prev && cur > next) extrema.push_back(cur);
    }
    return extrema;
}

double nonlinear_convergence(const ModelParams& p, const ReducedState& init,
                             std::size_t t_max) {
    if (!stability_criterion(p)) {
        throw std::invalid_argument(
            "nonlinear_convergence: parameters must satisfy the stability criterion");
    }
    const Trajectory traj =
        simulate(ModelKind::Saturated, init, p.with_noise(0.0), t_max);
    return std::abs(traj.final_d());
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("loglog_slope: need matching series of length >= 2");
    }
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ScaleResult scalability_sweep(const ModelParams& p, std::span<const std::size_t> n_values,
                              ScaleMode mode, std::size_t t_max, std::uint64_t seed,
                              std::size_t replicates, std::size_t burn_in,
                              double noise_sigma) {
    if (n_values.empty()) throw std::invalid_argument("scalability_sweep: empty N list");
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        if (n_values[i] < 2) {
            throw std::invalid_argument("scalability_sweep: every N must be >= 2");
        }
        if (i > 0 && n_values[i] <= n_values[i - 1]) {
            throw std::invalid_argument("scalability_sweep: N list must be ascending");
        }
    }
    if (replicates == 0) replicates = 1;

    ScaleResult result;
    result.mode = mode;
    result.seed = seed;
    result.replicates = mode == ScaleMode::Deterministic ? 1 : replicates;
    result.points.reserve(n_values.size());

    for (std::size_t idx = 0; idx < n_values.size(); ++idx) {
        const std::size_t n = n_values[idx];
        if (mode == ScaleMode::Deterministic) {
            PopulationState init;
            init.x.resize(n);
            init.s.assign(n, 0.0);
            std::mt19937_64 rng(derive_seed(seed, idx));
            for (auto& v : init.x) v = 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;

            const Trajectory traj =
                simulate(ModelKind::Meanfield, init, p.with_noise(0.0), t_max);
            const double final_std = traj.d.back();
            result.points.push_back(ScalePoint{n, final_std * final_std});
        } else {
            const ModelParams pn = p.with_noise(noise_sigma, p.noise_bound());
            double acc = 0.0;
            for (std::size_t r = 0; r < result.replicates; ++r) {
                PopulationState init;
                init.x.assign(n, 0.0);
                init.s.assign(n, 0.0);
                const std::uint64_t run_seed = derive_seed(derive_seed(seed, idx), r);
                const Trajectory traj =
                    simulate(ModelKind::Meanfield, init, pn, t_max, run_seed);
                acc += variance_estimator(traj.xbar, burn_in);
            }
            result.points.push_back(
                ScalePoint{n, acc / static_cast<double>(result.replicates)});
        }
    }

    if (mode == ScaleMode::Noisy && result.points.size() >= 2) {
        std::vector<double> xs, ys;
        for (const auto& point : result.points) {
            xs.push_back(static_cast<double>(point.n));
            ys.push_back(point.variance);
        }
        result.slope = loglog_slope(xs, ys);
    }
    return result;
}

}  // namespace fcms::experiments
