#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fcms/noise.hpp"
#include "fcms/params.hpp"
#include "fcms/simulate.hpp"
#include "fcms/spectral.hpp"

namespace fcms {

/// Stationary covariance P of X' = J X + W, W ~ N(0, Q), by fixed-point
/// iteration on P = J P J^T + Q. Residual contract:
/// ||P - JPJ^T - Q||_max <= 1e-12 ||Q||_max. Throws NumericalError when
/// rho(J) >= 1 (no stationary solution).
Matrix2 stationary_cov_oracle(const Matrix2& j, const Matrix2& q);

/// Independent route to the same covariance: the 4x4 linear solve
/// (I - J (x) J) vec(P) = vec(Q). Used to cross-check the oracle.
Matrix2 stationary_cov_kron(const Matrix2& j, const Matrix2& q);

/// Unbiased sample variance over the post-burn-in samples.
/// Requires series.size() > burn_in + 2.
double variance_estimator(std::span<const double> series, std::size_t burn_in);

/// Pearson correlation of (z_t, z_{t+1}) over the post-burn-in samples.
/// Throws NumericalError on a constant (zero-variance) tail.
double lag1_autocorr(std::span<const double> series, std::size_t burn_in);

/// Noiseless recovery time: first step t at which |d_t| < eps_rec |d0|
/// holds for one full rotation period ceil(2 pi / theta) of the dominant
/// eigenvalue, starting from (S, d) = (0, d0). Throws on unstable
/// parameters, d0 = 0, eps_rec outside (0, 1), or no recovery within 1e7
/// steps. Default eps_rec = 1/e makes the measurement comparable to the
/// theoretical e-folding time.
std::size_t measure_recovery_time(const ModelParams& p, double d0,
                                  double eps_rec = 0.36787944117144233);

struct EwsPoint {
    double beta = 0.0;
    double variance = 0.0;
    double lag1_ac = 0.0;
    double tau_theory = 0.0;
    double tau_measured = 0.0;
    std::size_t sample_count = 0;
    std::size_t burn_in = 0;
};

struct EwsReport {
    std::vector<EwsPoint> points;
    NoiseSpec spec;
    std::size_t t_max = 0;
};

/// Early-warning indicators along an ascending subcritical beta grid:
/// per-beta noisy run (stream seed derived from spec.seed and the grid
/// index), variance and lag-1 autocorrelation of d, plus theoretical and
/// measured recovery times. Any beta >= beta_c is a precondition error
/// listing the offenders.
EwsReport ews_sweep(const ModelParams& p, std::span<const double> betas,
                    const NoiseSpec& spec, std::size_t t_max, std::size_t burn_in);

}  // namespace fcms
