#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fcms/ews.hpp"
#include "fcms/experiments.hpp"
#include "fcms/params.hpp"
#include "fcms/simulate.hpp"
#include "fcms/spectral.hpp"
#include "fcms/state.hpp"
#include "fcms/steppers.hpp"
#include "fcms/version.hpp"

namespace py = pybind11;
using namespace fcms;

namespace {

ModelKind kind_from_name(const std::string& name) {
    const auto kind = model_kind_from_string(name);
    if (!kind) throw std::invalid_argument("unknown model kind: " + name);
    return *kind;
}

py::dict spectral_report_dict(const SpectralReport& report) {
    py::dict d;
    d["eigenvalues"] = report.eigenvalues;
    d["rho"] = report.rho;
    d["stable"] = report.stable;
    d["criterion_satisfied"] = report.criterion_satisfied;
    d["beta_c"] = report.beta_c;
    d["tau_theory"] = report.tau_theory ? py::cast(*report.tau_theory) : py::none();
    return d;
}

}  // namespace

PYBIND11_MODULE(_fcms, m) {
    m.doc() = "Feedback-coupled memory system simulation and stability analysis";
    m.attr("__version__") = kVersion;

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<double, double, double, std::vector<double>, double, double,
                      double>(),
             py::arg("beta"), py::arg("gamma"), py::arg("eta"),
             py::arg("alpha") = std::vector<double>{}, py::arg("noise_sigma") = 0.0,
             py::arg("noise_bound") = 3.0, py::arg("epsilon") = 0.0)
        .def_static("baseline", &ModelParams::baseline, py::arg("beta") = 0.5)
        .def_property_readonly("beta", &ModelParams::beta)
        .def_property_readonly("gamma", &ModelParams::gamma)
        .def_property_readonly("eta", &ModelParams::eta)
        .def_property_readonly("alpha", &ModelParams::alpha)
        .def_property_readonly("noise_sigma", &ModelParams::noise_sigma)
        .def_property_readonly("noise_bound", &ModelParams::noise_bound)
        .def_property_readonly("epsilon", &ModelParams::epsilon)
        .def("with_beta", &ModelParams::with_beta)
        .def("with_noise", &ModelParams::with_noise, py::arg("sigma"),
             py::arg("bound") = 3.0)
        .def("with_epsilon", &ModelParams::with_epsilon)
        .def("__repr__", [](const ModelParams& p) {
            return "ModelParams(beta=" + std::to_string(p.beta()) +
                   ", gamma=" + std::to_string(p.gamma()) +
                   ", eta=" + std::to_string(p.eta()) + ")";
        });

    py::class_<ReducedState>(m, "ReducedState")
        .def(py::init<double, double>(), py::arg("s") = 0.0, py::arg("d") = 0.0)
        .def_readwrite("s", &ReducedState::s)
        .def_readwrite("d", &ReducedState::d)
        .def("__repr__", [](const ReducedState& st) {
            return "ReducedState(s=" + std::to_string(st.s) +
                   ", d=" + std::to_string(st.d) + ")";
        });

    py::class_<PairState>(m, "PairState")
        .def(py::init<double, double, double>(), py::arg("x1") = 0.0,
             py::arg("x2") = 0.0, py::arg("s") = 0.0)
        .def_readwrite("x1", &PairState::x1)
        .def_readwrite("x2", &PairState::x2)
        .def_readwrite("s", &PairState::s);

    py::class_<PopulationState>(m, "PopulationState")
        .def(py::init([](std::vector<double> x, std::vector<double> s) {
                 return PopulationState{std::move(x), std::move(s)};
             }),
             py::arg("x"), py::arg("s"))
        .def_readwrite("x", &PopulationState::x)
        .def_readwrite("s", &PopulationState::s)
        .def("__len__", &PopulationState::size);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("s", &Trajectory::s)
        .def_readonly("d", &Trajectory::d)
        .def_readonly("g1", &Trajectory::g1)
        .def_readonly("g2", &Trajectory::g2)
        .def_readonly("l_global", &Trajectory::l_global)
        .def_readonly("x1", &Trajectory::x1)
        .def_readonly("x2", &Trajectory::x2)
        .def_readonly("xbar", &Trajectory::xbar)
        .def_property_readonly("seed",
                               [](const Trajectory& t) -> py::object {
                                   return t.seed ? py::cast(*t.seed) : py::none();
                               })
        .def_property_readonly("diverged_at",
                               [](const Trajectory& t) -> py::object {
                                   return t.diverged_at ? py::cast(*t.diverged_at)
                                                        : py::none();
                               })
        .def_property_readonly("kind",
                               [](const Trajectory& t) { return to_string(t.kind); })
        .def("__len__", &Trajectory::size);

    m.def("disagreement", &disagreement);
    m.def("global_signal", &global_signal, py::arg("s"));
    m.def("incentive_field",
          [](double s, const ModelParams& p) { return incentive_field(s, p); },
          py::arg("s"), py::arg("params"));
    m.def("reduced_step", &reduced_step, py::arg("state"), py::arg("params"));
    m.def("pair_step", &pair_step, py::arg("state"), py::arg("params"));
    m.def("saturated_step", &saturated_step, py::arg("state"), py::arg("params"));
    m.def("perturbed_step",
          [](const ReducedState& st, const ModelParams& p, const std::string& sigma) {
              return perturbed_step(st, p,
                                    sigma == "sin-d" ? SigmaFn(sigma_sin_disagreement)
                                                     : SigmaFn(sigma_cubic_damping));
          },
          py::arg("state"), py::arg("params"), py::arg("sigma") = "cubic");
    m.def("meanfield_step", &meanfield_step, py::arg("state"), py::arg("params"));

    m.def("simulate",
          [](const std::string& kind, py::object init, const ModelParams& p,
             std::size_t t_max, py::object seed, const std::string& sigma) {
              StateInit state;
              if (py::isinstance<ReducedState>(init)) state = init.cast<ReducedState>();
              else if (py::isinstance<PairState>(init)) state = init.cast<PairState>();
              else if (py::isinstance<PopulationState>(init))
                  state = init.cast<PopulationState>();
              else throw std::invalid_argument("init must be a state object");
              std::optional<std::uint64_t> s;
              if (!seed.is_none()) s = seed.cast<std::uint64_t>();
              return simulate(kind_from_name(kind), state, p, t_max, s,
                              sigma == "sin-d" ? SigmaFn(sigma_sin_disagreement)
                                               : SigmaFn(sigma_cubic_damping));
          },
          py::arg("kind"), py::arg("init"), py::arg("params"), py::arg("t_max"),
          py::arg("seed") = py::none(), py::arg("sigma") = "cubic");

    // spectral
    py::class_<Matrix2>(m, "Matrix2")
        .def(py::init<double, double, double, double>(), py::arg("a11"), py::arg("a12"),
             py::arg("a21"), py::arg("a22"))
        .def_readwrite("a11", &Matrix2::a11)
        .def_readwrite("a12", &Matrix2::a12)
        .def_readwrite("a21", &Matrix2::a21)
        .def_readwrite("a22", &Matrix2::a22)
        .def("trace", &Matrix2::trace)
        .def("det", &Matrix2::det);

    m.def("eig2", [](const Matrix2& j) {
        const auto ev = eig2(j);
        return std::vector<Complex>{ev.begin(), ev.end()};
    });
    m.def("reduced_jacobian", &reduced_jacobian, py::arg("params"));
    m.def("full_jacobian_eigenvalues", [](const ModelParams& p) {
        const auto ev = eig_small(full_jacobian(p));
        return std::vector<Complex>{ev.begin(), ev.end()};
    });
    m.def("spectral_radius",
          [](const Matrix2& j) { return spectral_radius(j); });
    m.def("stability_criterion", &stability_criterion, py::arg("params"));
    m.def("critical_beta", &critical_beta, py::arg("params"));
    m.def("lambda_curve",
          [](const ModelParams& p, const std::vector<double>& betas) {
              return lambda_curve(p, betas);
          },
          py::arg("params"), py::arg("betas"));
    m.def("recovery_time_theory", &recovery_time_theory, py::arg("params"));
    m.def("spectral_report",
          [](const ModelParams& p) { return spectral_report_dict(spectral_report(p)); },
          py::arg("params"));

    // stochastic / EWS
    py::class_<NoiseSpec>(m, "NoiseSpec")
        .def(py::init([](double sigma, double bound, const std::string& target,
                         std::uint64_t seed) {
                 NoiseSpec spec;
                 spec.sigma = sigma;
                 spec.bound = bound;
                 spec.target = target == "per-agent" ? NoiseTarget::PerAgent
                                                     : NoiseTarget::Disagreement;
                 spec.seed = seed;
                 spec.validate();
                 return spec;
             }),
             py::arg("sigma"), py::arg("bound") = 3.0,
             py::arg("target") = "disagreement", py::arg("seed") = 0)
        .def_readonly("sigma", &NoiseSpec::sigma)
        .def_readonly("bound", &NoiseSpec::bound)
        .def_readonly("seed", &NoiseSpec::seed);

    m.def("noisy_simulate", &noisy_simulate, py::arg("params"), py::arg("spec"),
          py::arg("init"), py::arg("t_max"));
    m.def("stationary_cov_oracle", &stationary_cov_oracle, py::arg("j"), py::arg("q"));
    m.def("stationary_cov_kron", &stationary_cov_kron, py::arg("j"), py::arg("q"));
    m.def("variance_estimator",
          [](const std::vector<double>& series, std::size_t burn_in) {
              return variance_estimator(series, burn_in);
          },
          py::arg("series"), py::arg("burn_in") = 0);
    m.def("lag1_autocorr",
          [](const std::vector<double>& series, std::size_t burn_in) {
              return lag1_autocorr(series, burn_in);
          },
          py::arg("series"), py::arg("burn_in") = 0);
    m.def("measure_recovery_time", &measure_recovery_time, py::arg("params"),
          py::arg("d0"), py::arg("eps_rec") = 0.36787944117144233);

    py::class_<EwsPoint>(m, "EwsPoint")
        .def_readonly("beta", &EwsPoint::beta)
        .def_readonly("variance", &EwsPoint::variance)
        .def_readonly("lag1_ac", &EwsPoint::lag1_ac)
        .def_readonly("tau_theory", &EwsPoint::tau_theory)
        .def_readonly("tau_measured", &EwsPoint::tau_measured)
        .def_readonly("sample_count", &EwsPoint::sample_count)
        .def_readonly("burn_in", &EwsPoint::burn_in);
    py::class_<EwsReport>(m, "EwsReport")
        .def_readonly("points", &EwsReport::points)
        .def_readonly("t_max", &EwsReport::t_max);
    m.def("ews_sweep",
          [](const ModelParams& p, const std::vector<double>& betas, const NoiseSpec& spec,
             std::size_t t_max, std::size_t burn_in) {
              return ews_sweep(p, betas, spec, t_max, burn_in);
          },
          py::arg("params"), py::arg("betas"), py::arg("spec"), py::arg("t_max"),
          py::arg("burn_in"));

    // experiments
    namespace ex = fcms::experiments;
    py::class_<ex::SweepPoint>(m, "SweepPoint")
        .def_readonly("beta", &ex::SweepPoint::beta)
        .def_readonly("rho", &ex::SweepPoint::rho)
        .def_readonly("final_abs_d", &ex::SweepPoint::final_abs_d)
        .def_readonly("converged", &ex::SweepPoint::converged)
        .def_property_readonly("regime",
                               [](const ex::SweepPoint& p) { return to_string(p.regime); })
        .def_property_readonly("diverged_at",
                               [](const ex::SweepPoint& p) -> py::object {
                                   return p.diverged_at ? py::cast(*p.diverged_at)
                                                        : py::none();
                               })
        .def_property_readonly("tau_theory", [](const ex::SweepPoint& p) -> py::object {
            return p.tau_theory ? py::cast(*p.tau_theory) : py::none();
        });

    m.def("bifurcation_sweep",
          [](const ModelParams& p, const std::vector<double>& betas, std::size_t t_max,
             double d0) { return ex::bifurcation_sweep(p, betas, t_max, d0).points; },
          py::arg("params"), py::arg("betas"), py::arg("t_max") = 10000,
          py::arg("d0") = 2.0);
    m.def("ablate_coupling", &ex::ablate_coupling, py::arg("params"), py::arg("init"),
          py::arg("t_max"));
    m.def("ablate_persistence", &ex::ablate_persistence, py::arg("params"),
          py::arg("init"), py::arg("t_max"));
    m.def("ablate_dissipation", &ex::ablate_dissipation, py::arg("params"),
          py::arg("init"), py::arg("t_max"));
    m.def("nonlinear_convergence", &ex::nonlinear_convergence, py::arg("params"),
          py::arg("init"), py::arg("t_max"));

    py::class_<ex::InvarianceReport>(m, "InvarianceReport")
        .def_readonly("samples", &ex::InvarianceReport::samples)
        .def_readonly("radius", &ex::InvarianceReport::radius)
        .def_readonly("bound_ratio", &ex::InvarianceReport::bound_ratio)
        .def_readonly("absorbed_fraction", &ex::InvarianceReport::absorbed_fraction)
        .def_readonly("max_final_norm", &ex::InvarianceReport::max_final_norm);
    m.def("forward_invariance_probe", &ex::forward_invariance_probe, py::arg("params"),
          py::arg("radius"), py::arg("samples"), py::arg("t_max"));

    py::class_<ex::ScalePoint>(m, "ScalePoint")
        .def_readonly("n", &ex::ScalePoint::n)
        .def_readonly("variance", &ex::ScalePoint::variance);
    m.def("scalability_sweep",
          [](const ModelParams& p, const std::vector<std::size_t>& n_values,
             const std::string& mode, std::size_t t_max, std::uint64_t seed,
             std::size_t replicates, std::size_t burn_in, double noise_sigma) {
              const auto result = ex::scalability_sweep(
                  p, n_values,
                  mode == "deterministic" ? ex::ScaleMode::Deterministic
                                          : ex::ScaleMode::Noisy,
                  t_max, seed, replicates, burn_in, noise_sigma);
              py::dict d;
              d["points"] = result.points;
              d["slope"] = result.slope ? py::cast(*result.slope) : py::none();
              return d;
          },
          py::arg("params"), py::arg("n_values"), py::arg("mode") = "noisy",
          py::arg("t_max") = 1000, py::arg("seed") = 42, py::arg("replicates") = 8,
          py::arg("burn_in") = 0, py::arg("noise_sigma") = 0.01);
}
