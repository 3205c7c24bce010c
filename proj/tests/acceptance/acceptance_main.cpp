// Acceptance suite: one check per numbered criterion, each printed as a
// single pass/fail line with its key measurements and runtime.
//
// Usage: fcms_acceptance [criterion-number]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fcms/ews.hpp"
#include "fcms/experiments.hpp"
#include "fcms/simulate.hpp"
#include "fcms/spectral.hpp"

using namespace fcms;
using namespace fcms::experiments;

namespace {

const ModelParams kBaseline = ModelParams::baseline();

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& label) {
        if (!ok) {
            pass = false;
            detail << "  FAILED: " << label;
        }
    }
};

double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double cov = n * sxy - sx * sy;
    const double vx = n * sxx - sx * sx;
    const double vy = n * syy - sy * sy;
    return (cov * cov) / (vx * vy);
}

// 1. Critical threshold: beta_c = 1.5811 +- 0.0001 and rho(J(beta_c)) = 1
//    within 1e-10.
Outcome criterion_1() {
    Outcome out;
    const auto report = spectral_report(kBaseline);
    const double beta_c = report.beta_c;
    out.require(std::abs(beta_c - 1.5811) <= 1e-4, "beta_c within 1e-4 of 1.5811");
    const double rho_c = spectral_radius(reduced_jacobian(kBaseline.with_beta(beta_c)));
    out.require(std::abs(rho_c - 1.0) <= 1e-10, "rho(beta_c) = 1 within 1e-10");
    out.require(report.stable && report.criterion_satisfied, "baseline stable");
    out.detail << "beta_c=" << beta_c << " |rho(beta_c)-1|=" << std::abs(rho_c - 1.0);
    return out;
}

// 2. Bifurcation regimes across beta = 0.5 / 1.41 / 1.55 / 1.65.
Outcome criterion_2() {
    Outcome out;
    const std::vector<double> grid{0.5, 1.41, 1.55, 1.65};
    const auto result = bifurcation_sweep(kBaseline, grid, 10000, 2.0);
    const RegimeLabel expected[] = {RegimeLabel::Subcritical, RegimeLabel::Subcritical,
                                    RegimeLabel::CriticalBand, RegimeLabel::Supercritical};
    for (int i = 0; i < 4; ++i) {
        const auto& point = result.points[i];
        out.require(point.regime == expected[i],
                    "regime at beta=" + std::to_string(point.beta));
        if (i < 3) {
            out.require(point.converged, "converged at beta=" + std::to_string(point.beta));
        } else {
            out.require(point.diverged_at.has_value() && !point.converged,
                        "diverged at beta=1.65");
        }
        out.detail << to_string(point.regime) << (i < 3 ? "/" : "");
    }
    out.detail << " diverged_at=" << *result.points[3].diverged_at;
    return out;
}

// 3. Critical slowing down: measured recovery times within factor 2 of
//    theory at beta = 0.5 and 1.55, ratio >= 10.
Outcome criterion_3() {
    Outcome out;
    const double tau_low = recovery_time_theory(kBaseline);
    const double tau_high = recovery_time_theory(kBaseline.with_beta(1.55));
    const auto measured_low = static_cast<double>(measure_recovery_time(kBaseline, 1.0));
    const auto measured_high =
        static_cast<double>(measure_recovery_time(kBaseline.with_beta(1.55), 1.0));
    out.require(measured_low >= tau_low / 2 && measured_low <= tau_low * 2,
                "tau(0.5) within factor 2");
    out.require(measured_high >= tau_high / 2 && measured_high <= tau_high * 2,
                "tau(1.55) within factor 2");
    out.require(measured_high / measured_low >= 10.0, "ratio >= 10");
    out.detail << "measured=" << measured_low << "/" << measured_high
               << " theory=" << tau_low << "/" << tau_high
               << " ratio=" << measured_high / measured_low;
    return out;
}

// 4. Deterministic convergence: |d| <= 1e-12 after 2000 steps from d0 = 2
//    with log-linear envelope decay (R^2 >= 0.99).
Outcome criterion_4() {
    Outcome out;
    const auto traj = simulate(ModelKind::Reduced, ReducedState{0.0, 2.0}, kBaseline, 2000);
    out.require(!traj.diverged(), "no divergence");
    out.require(std::abs(traj.final_d()) <= 1e-12, "final |d| <= 1e-12");

    const auto extrema_traj = abs_d_extrema(traj);
    std::vector<double> t_peaks, log_peaks;
    for (std::size_t t = 1; t + 1 < traj.d.size(); ++t) {
        const double cur = std::abs(traj.d[t]);
        if (cur >= std::abs(traj.d[t - 1]) && cur > std::abs(traj.d[t + 1]) && cur > 0) {
            t_peaks.push_back(static_cast<double>(t));
            log_peaks.push_back(std::log(cur));
        }
    }
    const double r2 = r_squared(t_peaks, log_peaks);
    out.require(t_peaks.size() >= 10, "enough envelope extrema");
    out.require(r2 >= 0.99, "log-linear envelope fit R^2 >= 0.99");
    out.detail << "final|d|=" << std::abs(traj.final_d()) << " peaks=" << t_peaks.size()
               << " R2=" << r2;
    return out;
}

// 5. Noise robustness: near-zero mean and stationary variance within 10%
//    of the Lyapunov oracle; the two oracle routes agree within 1e-10.
Outcome criterion_5() {
    Outcome out;
    NoiseSpec spec;
    spec.sigma = 0.01;
    spec.seed = 42;
    const std::size_t t_max = 100000;
    const std::size_t burn = 1000;
    const auto traj = noisy_simulate(kBaseline, spec, ReducedState{0.0, 0.0}, t_max);
    out.require(!traj.diverged(), "no divergence");

    const double var = variance_estimator(traj.d, burn);
    const double ac1 = lag1_autocorr(traj.d, burn);
    double mean = 0.0;
    for (std::size_t t = burn; t < traj.d.size(); ++t) mean += traj.d[t];
    mean /= static_cast<double>(traj.d.size() - burn);
    const double n_eff =
        static_cast<double>(traj.d.size() - burn) * (1.0 - ac1) / (1.0 + ac1);
    const double se = std::sqrt(var / n_eff);
    out.require(std::abs(mean) <= 3.0 * se, "|mean(d)| <= 3 standard errors");

    const Matrix2 j = reduced_jacobian(kBaseline);
    const Matrix2 q{0, 0, 0, spec.sigma * spec.sigma};
    const Matrix2 oracle = stationary_cov_oracle(j, q);
    const Matrix2 kron = stationary_cov_kron(j, q);
    const double route_gap =
        std::max({std::abs(oracle.a11 - kron.a11), std::abs(oracle.a12 - kron.a12),
                  std::abs(oracle.a22 - kron.a22)});
    out.require(route_gap <= 1e-10, "dual-method oracle agreement within 1e-10");
    out.require(std::abs(var - oracle.a22) <= 0.10 * oracle.a22,
                "Var(d) within 10% of the oracle");
    out.detail << "mean=" << mean << " (3se=" << 3.0 * se << ") var=" << var
               << " oracle=" << oracle.a22 << " routes=" << route_gap;
    return out;
}

// 6. Early-warning signatures across beta = 0.5 / 1.0 / 1.41 / 1.55:
//    variance and lag-1 AC strictly increasing (at most one inversion of
//    at most 2% relative), AC(1.55) > 0.9.
Outcome criterion_6() {
    Outcome out;
    NoiseSpec spec;
    spec.sigma = 0.01;
    spec.seed = 42;
    const std::vector<double> grid{0.5, 1.0, 1.41, 1.55};
    const auto report = ews_sweep(kBaseline, grid, spec, 4000000, 10000);

    auto check_series = [&](const char* name, auto&& get) {
        int inversions = 0;
        double worst = 0.0;
        for (std::size_t i = 1; i < report.points.size(); ++i) {
            const double prev = get(report.points[i - 1]);
            const double cur = get(report.points[i]);
            if (!(cur > prev)) {
                ++inversions;
                worst = std::max(worst, (prev - cur) / prev);
            }
        }
        const bool ok = inversions == 0 || (inversions == 1 && worst <= 0.02);
        std::ostringstream label;
        label << name << " strictly increasing (<= one inversion of <= 2%; got "
              << inversions << " inversion(s), worst " << worst * 100.0 << "%)";
        out.require(ok, label.str());
    };
    check_series("variance", [](const EwsPoint& point) { return point.variance; });
    check_series("lag-1 AC", [](const EwsPoint& point) { return point.lag1_ac; });
    out.require(report.points.back().lag1_ac > 0.9, "AC(1.55) > 0.9");

    out.detail << "var=";
    for (const auto& point : report.points) out.detail << point.variance << " ";
    out.detail << "ac=";
    for (const auto& point : report.points) out.detail << point.lag1_ac << " ";
    return out;
}

// 7. Nonlinear robustness: saturated run at beta = 1.5 from d0 = 2 reaches
//    |d| <= 1e-10 and the phase-portrait overlay spirals strictly inward.
Outcome criterion_7() {
    Outcome out;
    const auto p = ModelParams::baseline(1.5);
    const double final_d = nonlinear_convergence(p, ReducedState{0.0, 2.0}, 20000);
    out.require(final_d <= 1e-10, "final |d| <= 1e-10");

    const auto field =
        phase_portrait(PortraitKind::Saturated, p, 2.0, 21, ReducedState{0.0, 2.0}, 2000);
    const auto extrema = abs_d_extrema(field.overlay);
    bool decreasing = extrema.size() >= 5;
    for (std::size_t i = 1; i < extrema.size(); ++i) {
        decreasing = decreasing && extrema[i] < extrema[i - 1];
    }
    out.require(decreasing, "strictly decreasing |d| extrema (stable spiral)");
    out.detail << "final|d|=" << final_d << " extrema=" << extrema.size();
    return out;
}

// 8. Linearization agreement: saturated and perturbed (eps = 0.01,
//    sigma = -S^3) runs from a small init match the linear model within
//    1e-18 componentwise for 100 steps.
Outcome criterion_8() {
    Outcome out;
    const ReducedState init{1e-7, 1e-7};  // ||init|| <= 1e-6
    const auto pe = kBaseline.with_epsilon(0.01);
    ReducedState sat = init, pert = init, lin = init;
    double worst_sat = 0.0, worst_pert = 0.0;
    for (int t = 0; t < 100; ++t) {
        sat = saturated_step(sat, kBaseline);
        pert = perturbed_step(pert, pe);
        lin = reduced_step(lin, kBaseline);
        worst_sat = std::max({worst_sat, std::abs(sat.s - lin.s), std::abs(sat.d - lin.d)});
        worst_pert =
            std::max({worst_pert, std::abs(pert.s - lin.s), std::abs(pert.d - lin.d)});
    }
    out.require(worst_sat <= 1e-18, "saturated within 1e-18 of linear");
    out.require(worst_pert <= 1e-18, "perturbed within 1e-18 of linear");
    out.detail << "worst_sat=" << worst_sat << " worst_pert=" << worst_pert;
    return out;
}

// 9. Ablation suite: coupling, persistence, dissipation, and the two
//    trivial-coupling variants.
Outcome criterion_9() {
    Outcome out;

    const auto frozen = ablate_coupling(kBaseline, ReducedState{1.0, 2.0}, 1000);
    bool d_const = true;
    for (double v : frozen.d) d_const = d_const && (v == 2.0);
    out.require(d_const, "beta=0: d bitwise constant");

    const auto memoryless = ablate_persistence(kBaseline, ReducedState{0.0, 2.0}, 1000);
    const auto step =
        persistence_insensitivity_step(kBaseline, memoryless.d, 0.0, 7.0);
    out.require(step <= 2, "persistence removal: S0 forgotten from t <= 2");

    const double rho_undamped =
        spectral_radius(reduced_jacobian_coeffs(0.5, 0.0, 0.01, 0.0));
    out.require(std::abs(rho_undamped - std::sqrt(1.01)) <= 1e-12,
                "gamma=0: rho = sqrt(1 + 4 eta beta^2)");
    out.require(rho_undamped > 1.0, "gamma=0: rho > 1");
    const auto undamped = ablate_dissipation(kBaseline, ReducedState{0.0, 1.0}, 2000);
    double envelope = 0.0;
    for (double v : undamped.d) envelope = std::max(envelope, std::abs(v));
    out.require(envelope > 1.0, "gamma=0: growing |d| envelope");

    const auto unresponsive = necessity_check(NecessityVariant::UnresponsiveAgents,
                                              kBaseline, ReducedState{0.0, 2.0}, 1000);
    bool ur_const = true;
    for (double v : unresponsive.trajectory.d) ur_const = ur_const && (v == 2.0);
    out.require(ur_const && !unresponsive.s_mediated, "eta=0: no S-mediated convergence");

    const auto blind = necessity_check(NecessityVariant::MemoryBlindIncentives,
                                       kBaseline, ReducedState{0.0, 2.0}, 1000, 0.0);
    bool blind_const = true;
    for (double v : blind.trajectory.d) blind_const = blind_const && (v == 2.0);
    out.require(blind_const && !blind.s_mediated,
                "constant G: no S-mediated convergence");

    out.detail << "rho(gamma=0)=" << rho_undamped << " envelope=" << envelope
               << " insensitive_from=" << step;
    return out;
}

// 10. Forward invariance: 256 low-discrepancy starts in [-1, 1]^2 stay
//     within 10x the radius and are absorbed into the 0.1-radius box.
Outcome criterion_10() {
    Outcome out;
    const auto report = forward_invariance_probe(kBaseline, 1.0, 256, 5000);
    out.require(report.bound_ratio <= 10.0, "bounded by 10x initial radius");
    out.require(report.absorbed_fraction == 1.0, "100% absorbed");
    out.require(report.max_final_norm <= 0.1, "final states inside the 0.1 box");
    out.detail << "C=" << report.bound_ratio
               << " absorbed=" << report.absorbed_fraction
               << " max_final=" << report.max_final_norm;
    return out;
}

// 11. Scalability: deterministic N = 1e6 synchronizes to variance <= 1e-12
//     within 2000 steps in under 60 s; the noisy sweep over four decades
//     fits slope -1 +- 0.15; the N = 2 run bitwise-matches the pair model.
Outcome criterion_11() {
    Outcome out;

    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t big[] = {1000000};
    const auto det = scalability_sweep(kBaseline, big, ScaleMode::Deterministic, 2000, 42);
    const double det_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.require(det.points[0].variance <= 1e-12, "N=1e6 variance <= 1e-12");
    out.require(det_seconds < 60.0, "N=1e6 run under 60 s");

    const std::size_t ns[] = {100, 1000, 10000, 100000};
    const auto noisy =
        scalability_sweep(kBaseline, ns, ScaleMode::Noisy, 1000, 42, 8, 0, 0.01);
    out.require(noisy.slope.has_value(), "slope fitted");
    out.require(std::abs(*noisy.slope + 1.0) <= 0.15, "log-log slope -1 +- 0.15");

    PairState pair{1.0, -1.0, 0.0};
    PopulationState pop{{1.0, -1.0}, {0.0, 0.0}};
    bool bitwise = true;
    for (int t = 0; t < 1000 && bitwise; ++t) {
        pair = pair_step(pair, kBaseline);
        meanfield_step_inplace(pop, kBaseline);
        bitwise = pop.x[0] == pair.x1 && pop.x[1] == pair.x2 && pop.s[0] == pair.s &&
                  pop.s[1] == -pair.s;
    }
    out.require(bitwise, "N=2 mean-field bitwise-matches the pair model");

    out.detail << "varN6=" << det.points[0].variance << " (" << det_seconds << " s)"
               << " slope=" << *noisy.slope;
    return out;
}

// 12. Criterion-spectrum-simulation equivalence over 1000 random triples
//     outside a 1% band around 4 eta beta^2 = gamma.
Outcome criterion_12() {
    Outcome out;
    std::mt19937_64 rng(20260811);
    auto unif = [&](double lo, double hi) {
        return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
    };

    int checked = 0;
    int disagreements = 0;
    while (checked < 1000) {
        const double beta = unif(0.3, 3.0);
        const double gamma = unif(0.05, 0.9);
        const double eta = unif(0.005, 0.05);
        if (std::abs(4.0 * eta * beta * beta - gamma) < 0.01 * gamma) continue;
        ++checked;

        const ModelParams p(beta, gamma, eta);
        const bool criterion = stability_criterion(p);
        const bool spectral = spectral_radius(reduced_jacobian(p)) < 1.0;

        const auto traj = simulate(ModelKind::Reduced, ReducedState{0.0, 1.0}, p, 100000);
        double tail = 0.0;
        const std::size_t n = traj.d.size();
        for (std::size_t t = n > 128 ? n - 128 : 0; t < n; ++t) {
            tail = std::max(tail, std::abs(traj.d[t]));
        }
        const bool converged = !traj.diverged() && tail < 1e-6;

        if (criterion != spectral || criterion != converged) ++disagreements;
    }
    out.require(disagreements == 0, "zero disagreements over 1000 triples");
    out.detail << "triples=" << checked << " disagreements=" << disagreements;
    return out;
}

using CriterionFn = std::function<Outcome()>;

struct Criterion {
    int number;
    const char* name;
    double budget_seconds;
    CriterionFn fn;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list = {
        {1, "critical threshold beta_c", 1.0, criterion_1},
        {2, "bifurcation regimes", 5.0, criterion_2},
        {3, "critical slowing down", 5.0, criterion_3},
        {4, "deterministic convergence", 1.0, criterion_4},
        {5, "noise robustness", 10.0, criterion_5},
        {6, "early-warning signatures", 30.0, criterion_6},
        {7, "nonlinear robustness", 5.0, criterion_7},
        {8, "linearization agreement", 1.0, criterion_8},
        {9, "ablation suite", 5.0, criterion_9},
        {10, "forward invariance", 10.0, criterion_10},
        {11, "scalability", 120.0, criterion_11},
        {12, "criterion-spectrum equivalence", 60.0, criterion_12},
    };
    return list;
}

bool run_one(const Criterion& criterion) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
        outcome = criterion.fn();
    } catch (const std::exception& e) {
        outcome.pass = false;
        outcome.detail << "exception: " << e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (seconds > criterion.budget_seconds) {
        outcome.pass = false;
        outcome.detail << "  FAILED: runtime budget " << criterion.budget_seconds
                       << " s exceeded";
    }
    std::printf("[%s] criterion %2d: %s — %s [%.2f s]\n",
                outcome.pass ? "PASS" : "FAIL", criterion.number, criterion.name,
                outcome.detail.str().c_str(), seconds);
    std::fflush(stdout);
    return outcome.pass;
}

}  // namespace

int main(int argc, char** argv) {
    int selected = 0;
    if (argc > 1) selected = std::atoi(argv[1]);

    bool all_pass = true;
    for (const auto& criterion : criteria()) {
        if (selected != 0 && criterion.number != selected) continue;
        all_pass = run_one(criterion) && all_pass;
    }
    return all_pass ? 0 : 1;
}
