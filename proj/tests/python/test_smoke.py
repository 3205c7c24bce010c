"""Smoke tests for the python extension module."""

import math

import pytest

fcms = pytest.importorskip("fcms")


def test_version():
    assert fcms.__version__ == "0.1.0"


def test_params_validation():
    p = fcms.ModelParams.baseline()
    assert p.beta == 0.5
    assert p.gamma == 0.1
    assert p.eta == 0.01
    with pytest.raises(ValueError):
        fcms.ModelParams(beta=0.5, gamma=1.5, eta=0.01)


def test_reduced_step_hand_value():
    p = fcms.ModelParams.baseline()
    nxt = fcms.reduced_step(fcms.ReducedState(s=1.0, d=2.0), p)
    assert nxt.s == pytest.approx(1.9, abs=1e-14)
    assert nxt.d == pytest.approx(1.98, abs=1e-14)


def test_incentive_field_antisymmetry():
    p = fcms.ModelParams.baseline()
    g1, g2 = fcms.incentive_field(1.0, p)
    assert g1 == -1.0 and g2 == 1.0
    assert fcms.global_signal(-3.0) == 9.0


def test_simulate_decay():
    p = fcms.ModelParams.baseline()
    traj = fcms.simulate("reduced", fcms.ReducedState(s=0.0, d=2.0), p, 2000)
    assert len(traj) == 2001
    assert traj.diverged_at is None
    assert abs(traj.d[-1]) <= 1e-12


def test_simulate_divergence_flagged():
    p = fcms.ModelParams.baseline(1.65)
    traj = fcms.simulate("reduced", fcms.ReducedState(s=0.0, d=2.0), p, 10000)
    assert traj.diverged_at is not None
    assert traj.diverged_at < 5000


def test_spectral_report():
    report = fcms.spectral_report(fcms.ModelParams.baseline())
    assert report["rho"] == pytest.approx(math.sqrt(0.91), abs=1e-12)
    assert report["stable"] is True
    assert report["beta_c"] == pytest.approx(1.5811388, abs=1e-6)
    assert report["tau_theory"] == pytest.approx(21.2066, rel=1e-4)


def test_stability_criterion_boundary():
    p = fcms.ModelParams.baseline()
    assert fcms.stability_criterion(p)
    assert not fcms.stability_criterion(p.with_beta(1.65))
    assert not fcms.stability_criterion(p.with_beta(fcms.critical_beta(p)))


def test_meanfield_matches_pair_bitwise():
    p = fcms.ModelParams.baseline()
    pair = fcms.PairState(x1=1.0, x2=-1.0, s=0.0)
    pop = fcms.PopulationState(x=[1.0, -1.0], s=[0.0, 0.0])
    for _ in range(200):
        pair = fcms.pair_step(pair, p)
        pop = fcms.meanfield_step(pop, p)
        assert pop.x[0] == pair.x1
        assert pop.x[1] == pair.x2
        assert pop.s[0] == pair.s


def test_noisy_run_and_oracle():
    p = fcms.ModelParams.baseline()
    spec = fcms.NoiseSpec(sigma=0.01, seed=42)
    traj = fcms.noisy_simulate(p, spec, fcms.ReducedState(), 50000)
    var = fcms.variance_estimator(traj.d, 1000)
    j = fcms.reduced_jacobian(p)
    q = fcms.Matrix2(0.0, 0.0, 0.0, 1e-4)
    oracle = fcms.stationary_cov_oracle(j, q)
    assert var == pytest.approx(oracle.a22, rel=0.15)
    assert fcms.lag1_autocorr(traj.d, 1000) > 0.9


def test_ews_sweep_smoke():
    p = fcms.ModelParams.baseline()
    spec = fcms.NoiseSpec(sigma=0.01, seed=1)
    report = fcms.ews_sweep(p, [0.5], spec, 5000, 500)
    assert len(report.points) == 1
    point = report.points[0]
    assert point.beta == 0.5
    assert point.variance > 0
    assert point.tau_theory == pytest.approx(21.2066, rel=1e-4)


def test_bifurcation_sweep_regimes():
    p = fcms.ModelParams.baseline()
    points = fcms.bifurcation_sweep(p, [0.5, 1.41, 1.55, 1.65], t_max=10000, d0=2.0)
    regimes = [pt.regime for pt in points]
    assert regimes == ["subcritical", "subcritical", "critical_band", "supercritical"]
    assert points[3].diverged_at is not None


def test_scalability_smoke():
    p = fcms.ModelParams.baseline()
    result = fcms.scalability_sweep(p, [64, 256], mode="noisy", t_max=300,
                                    seed=3, replicates=4)
    assert len(result["points"]) == 2
    assert result["slope"] is not None


def test_recovery_time():
    p = fcms.ModelParams.baseline()
    tau = fcms.measure_recovery_time(p, 1.0)
    theory = fcms.recovery_time_theory(p)
    assert theory / 2 <= tau <= theory * 2
