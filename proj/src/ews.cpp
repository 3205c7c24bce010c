#include "fcms/ews.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fcms/errors.hpp"

namespace fcms {

namespace {

Matrix2 propagate(const Matrix2& j, const Matrix2& p) {
    // J P J^T for symmetric P.
    const double a = j.a11, b = j.a12, c = j.a21, d = j.a22;
    const double p11 = p.a11, p12 = p.a12, p22 = p.a22;
    Matrix2 out;
    out.a11 = a * a * p11 + 2.0 * a * b * p12 + b * b * p22;
    out.a12 = a * c * p11 + (a * d + b * c) * p12 + b * d * p22;
    out.a21 = out.a12;
    out.a22 = c * c * p11 + 2.0 * c * d * p12 + d * d * p22;
    return out;
}

double max_abs(const Matrix2& m) {
    return std::max({std::abs(m.a11), std::abs(m.a12), std::abs(m.a21), std::abs(m.a22)});
}

}  // namespace

Matrix2 stationary_cov_oracle(const Matrix2& j, const Matrix2& q) {
    const double rho = spectral_radius(j);
    if (rho >= 1.0) {
        std::ostringstream msg;
        msg << "stationary covariance does not exist: rho = " << rho << " >= 1";
        throw NumericalError(msg.str());
    }

    const double q_scale = max_abs(q);
    const double tol = 1e-12 * q_scale;

    Matrix2 p = q;
    constexpr int kMaxIterations = 400000;
    for (int it = 0; it < kMaxIterations; ++it) {
        const Matrix2 jpjt = propagate(j, p);
        const Matrix2 next{jpjt.a11 + q.a11, jpjt.a12 + q.a12, jpjt.a21 + q.a21,
                           jpjt.a22 + q.a22};
        const double residual =
            std::max({std::abs(next.a11 - p.a11), std::abs(next.a12 - p.a12),
                      std::abs(next.a22 - p.a22)});
        p = next;
        if (residual <= tol) {
            // Contract check against the defining equation.
            const Matrix2 back = propagate(j, p);
            const double defect =
                std::max({std::abs(p.a11 - back.a11 - q.a11),
                          std::abs(p.a12 - back.a12 - q.a12),
                          std::abs(p.a22 - back.a22 - q.a22)});
            if (defect <= 10.0 * std::max(tol, 1e-300)) return p;
        }
    }
    throw NumericalError("stationary_cov_oracle: fixed-point iteration did not converge");
}

Matrix2 stationary_cov_kron(const Matrix2& j, const Matrix2& q) {
    const double rho = spectral_radius(j);
    if (rho >= 1.0) {
        throw NumericalError("stationary covariance does not exist: rho >= 1");
    }

    // (I - J (x) J) vec(P) = vec(Q); vec is row-major (p11, p12, p21, p22).
    const double jm[2][2] = {{j.a11, j.a12}, {j.a21, j.a22}};
    const double qv[4] = {q.a11, q.a12, q.a21, q.a22};
    double a[4][5];
    for (int i = 0; i < 2; ++i) {
        for (int jj = 0; jj < 2; ++jj) {
            const int row = 2 * i + jj;
            for (int k = 0; k < 2; ++k) {
                for (int l = 0; l < 2; ++l) {
                    const int col = 2 * k + l;
                    a[row][col] = (row == col ? 1.0 : 0.0) - jm[i][k] * jm[jj][l];
                }
            }
            a[row][4] = qv[row];
        }
    }

    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        if (a[pivot][col] == 0.0) {
            throw NumericalError("stationary_cov_kron: singular system");
        }
        if (pivot != col) std::swap(a[pivot], a[col]);
        for (int r = col + 1; r < 4; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 5; ++c) a[r][c] -= f * a[col][c];
        }
    }
    double x[4];
    for (int r = 3; r >= 0; --r) {
        double acc = a[r][4];
        for (int c = r + 1; c < 4; ++c) acc -= a[r][c] * x[c];
        x[r] = acc / a[r][r];
    }

    const double off = 0.5 * (x[1] + x[2]);
    return Matrix2{x[0], off, off, x[3]};
}

double variance_estimator(std::span<const double> series, std::size_t burn_in) {
    if (series.size() <= burn_in + 2) {
        throw std::invalid_argument("variance_estimator: insufficient samples");
    }
    const auto tail = series.subspan(burn_in);
    const double n = static_cast<double>(tail.size());
    double mean = 0.0;
    for (double v : tail) mean += v;
    mean /= n;
    double acc = 0.0;
    for (double v : tail) {
        const double e = v - mean;
        acc += e * e;
    }
    return acc / (n - 1.0);
}

double lag1_autocorr(std::span<const double> series, std::size_t burn_in) {
    if (series.size() <= burn_in + 2) {
        throw std::invalid_argument("lag1_autocorr: insufficient samples");
    }
    const auto tail = series.subspan(burn_in);
    const std::size_t m = tail.size() - 1;  // number of (z_t, z_{t+1}) pairs

    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
        mean_x += tail[t];
        mean_y += tail[t + 1];
    }
    mean_x /= static_cast<double>(m);
    mean_y /= static_cast<double>(m);

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
        const double ex = tail[t] - mean_x;
        const double ey = tail[t + 1] - mean_y;
        sxy += ex * ey;
        sxx += ex * ex;
        syy += ey * ey;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw NumericalError("lag1_autocorr: undefined for a constant series");
    }
    return sxy / std::sqrt(sxx * syy);
}

std::size_t measure_recovery_time(const ModelParams& p, double d0, double eps_rec) {
    if (!stability_criterion(p)) {
        throw std::invalid_argument(
            "measure_recovery_time: parameters are not subcritical");
    }
    if (d0 == 0.0) {
        throw std::invalid_argument("measure_recovery_time: d0 must be nonzero");
    }
    if (!(eps_rec > 0.0 && eps_rec < 1.0)) {
        throw std::invalid_argument("measure_recovery_time: eps_rec must be in (0, 1)");
    }

    const auto ev = eig2(reduced_jacobian(p));
    const double theta = std::abs(std::arg(ev[0]));
    const std::size_t period =
        theta > 1e-12 ? static_cast<std::size_t>(
                            std::ceil(2.0 * std::numbers::pi / theta))
                      : 1;

    auto coeffs = detail::LinearCoeffs::from(p);
    coeffs.alpha1 = coeffs.alpha2 = p.alpha_scalar();
    const double threshold = eps_rec * std::abs(d0);

    ReducedState st{0.0, d0};
    std::size_t below = 0;
    constexpr std::size_t kMaxSteps = 10'000'000;
    for (std::size_t t = 1; t <= kMaxSteps; ++t) {
        st = detail::reduced_step_raw(st, coeffs);
        if (std::abs(st.d) < threshold) {
            if (++below >= period) return t - period + 1;
        } else {
            below = 0;
        }
    }
    throw NumericalError("measure_recovery_time: no sustained recovery within 1e7 steps");
}

EwsReport ews_sweep(const ModelParams& p, std::span<const double> betas,
                    const NoiseSpec& spec, std::size_t t_max, std::size_t burn_in) {
    if (betas.empty()) throw std::invalid_argument("ews_sweep: empty beta grid");
    const double beta_c = critical_beta(p);
    std::ostringstream offenders;
    bool bad = false;
    for (double beta : betas) {
        if (beta >= beta_c) {
            offenders << (bad ? ", " : "") << beta;
            bad = true;
        }
    }
    if (bad) {
        throw std::invalid_argument("ews_sweep: betas not subcritical (beta_c = " +
                                    std::to_string(beta_c) + "): " + offenders.str());
    }
    if (t_max <= burn_in + 2) {
        throw std::invalid_argument("ews_sweep: t_max must exceed burn_in + 2");
    }

    EwsReport report;
    report.spec = spec;
    report.t_max = t_max;
    report.points.reserve(betas.size());
    for (std::size_t i = 0; i < betas.size(); ++i) {
        const ModelParams pb = p.with_beta(betas[i]);
        NoiseSpec point_spec = spec;
        point_spec.target = NoiseTarget::Disagreement;
        point_spec.seed = derive_seed(spec.seed, i);

        const Trajectory traj = noisy_simulate(pb, point_spec, ReducedState{0.0, 0.0},
                                               t_max);
        EwsPoint point;
        point.beta = betas[i];
        point.variance = variance_estimator(traj.d, burn_in);
        point.lag1_ac = lag1_autocorr(traj.d, burn_in);
        point.tau_theory = recovery_time_theory(pb);
        point.tau_measured = static_cast<double>(measure_recovery_time(pb, 1.0));
        point.sample_count = traj.size();
        point.burn_in = burn_in;
        report.points.push_back(point);
    }
    return report;
}

}  // namespace fcms
