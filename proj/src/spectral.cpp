#include "fcms/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fcms/errors.hpp"

namespace fcms {

namespace {

bool spectral_order(const Complex& a, const Complex& b) {
    const double ma = std::abs(a);
    const double mb = std::abs(b);
    if (ma != mb) return ma > mb;
    return std::arg(a) < std::arg(b);
}

// Monic cubic z^3 + a z^2 + b z + c and its derivative.
struct Cubic {
    double a, b, c;

    Complex eval(const Complex& z) const { return ((z + a) * z + b) * z + c; }
    Complex deriv(const Complex& z) const { return (3.0 * z + 2.0 * a) * z + b; }
    double coeff_scale() const {
        return std::max({1.0, std::abs(a), std::abs(b), std::abs(c)});
    }
};

}  // namespace

std::array<Complex, 2> eig2(const Matrix2& m) {
    const double tr = m.trace();
    const double det = m.det();
    const double disc = tr * tr - 4.0 * det;

    std::array<Complex, 2> roots;
    if (disc < 0.0) {
        const double re = 0.5 * tr;
        const double im = 0.5 * std::sqrt(-disc);
        roots = {Complex(re, im), Complex(re, -im)};
    } else {
        const double sq = std::sqrt(disc);
        // Larger-magnitude root first, computed without cancellation.
        const double r1 = (tr >= 0.0) ? 0.5 * (tr + sq) : 0.5 * (tr - sq);
        const double r2 = (r1 != 0.0) ? det / r1 : 0.5 * (tr + sq);
        roots = {Complex(r1, 0.0), Complex(r2, 0.0)};
    }
    std::sort(roots.begin(), roots.end(), spectral_order);
    return roots;
}

std::array<Complex, 3> eig_small(const Matrix3& m) {
    // Characteristic polynomial lambda^3 - tr lambda^2 + m2 lambda - det,
    // with m2 the sum of principal 2x2 minors.
    const auto& a = m.m;
    const double tr = a[0] + a[4] + a[8];
    const double m2 = (a[4] * a[8] - a[5] * a[7]) + (a[0] * a[8] - a[2] * a[6]) +
                      (a[0] * a[4] - a[1] * a[3]);
    const double det = a[0] * (a[4] * a[8] - a[5] * a[7]) -
                       a[1] * (a[3] * a[8] - a[5] * a[6]) +
                       a[2] * (a[3] * a[7] - a[4] * a[6]);
    const Cubic poly{-tr, m2, -det};

    // Durand-Kerner from the standard complex seed ring.
    const double radius = 1.0 + poly.coeff_scale();
    const Complex seed(0.4, 0.9);
    std::array<Complex, 3> z{radius * seed, radius * seed * seed,
                             radius * seed * seed * seed};

    constexpr int kBudget = 100;
    bool converged = false;
    for (int it = 0; it < kBudget && !converged; ++it) {
        converged = true;
        for (int i = 0; i < 3; ++i) {
            Complex denom(1.0, 0.0);
            for (int j = 0; j < 3; ++j) {
                if (j != i) denom *= z[i] - z[j];
            }
            if (denom == Complex(0.0, 0.0)) {
                z[i] += Complex(1e-8 * radius, 1e-8 * radius);
                converged = false;
                continue;
            }
            const Complex delta = poly.eval(z[i]) / denom;
            z[i] -= delta;
            if (std::abs(delta) > 1e-14 * (1.0 + std::abs(z[i]))) converged = false;
        }
    }

    // One Newton polish per root.
    for (auto& root : z) {
        const Complex dp = poly.deriv(root);
        if (std::abs(dp) > 0.0) root -= poly.eval(root) / dp;
    }

    // Real coefficients: snap near-real roots and enforce exact conjugacy
    // on the remaining pair.
    for (auto& root : z) {
        if (std::abs(root.imag()) <= 1e-10 * (1.0 + std::abs(root.real()))) {
            root = Complex(root.real(), 0.0);
        }
    }
    Complex* pos = nullptr;
    Complex* neg = nullptr;
    for (auto& root : z) {
        if (root.imag() > 0.0) pos = &root;
        if (root.imag() < 0.0) neg = &root;
    }
    if (pos && neg) {
        const Complex mean = 0.5 * (*pos + std::conj(*neg));
        *pos = mean;
        *neg = std::conj(mean);
    }

    const double tol = 1e-8 * poly.coeff_scale();
    for (const auto& root : z) {
        if (!(std::abs(poly.eval(root)) <= tol)) {
            std::ostringstream msg;
            msg << "eig_small: residual contract violated for matrix [[" << a[0] << ", "
                << a[1] << ", " << a[2] << "], [" << a[3] << ", " << a[4] << ", " << a[5]
                << "], [" << a[6] << ", " << a[7] << ", " << a[8] << "]]";
            throw NumericalError(msg.str());
        }
    }

    std::sort(z.begin(), z.end(), spectral_order);
    return z;
}

Matrix2 reduced_jacobian_coeffs(double beta, double gamma, double eta,
                                double alpha) noexcept {
    return Matrix2{1.0 - gamma, beta, -4.0 * eta * beta, 1.0 - eta * alpha};
}

Matrix2 memoryless_jacobian_coeffs(double beta, double eta) noexcept {
    return Matrix2{0.0, beta, -4.0 * eta * beta, 1.0};
}

Matrix2 reduced_jacobian(const ModelParams& p) {
    return reduced_jacobian_coeffs(p.beta(), p.gamma(), p.eta(), p.alpha_scalar());
}

Matrix3 full_jacobian(const ModelParams& p) {
    const double b = p.beta();
    const double e = p.eta();
    Matrix3 j;
    j.m = {1.0 - e * p.alpha_at(0), 0.0, -2.0 * e * b,
           0.0, 1.0 - e * p.alpha_at(1), 2.0 * e * b,
           b, -b, 1.0 - p.gamma()};
    return j;
}

double spectral_radius(const Matrix2& m) {
    const auto ev = eig2(m);
    return std::max(std::abs(ev[0]), std::abs(ev[1]));
}

double spectral_radius(const Matrix3& m) {
    const auto ev = eig_small(m);
    double rho = 0.0;
    for (const auto& v : ev) rho = std::max(rho, std::abs(v));
    return rho;
}

bool stability_criterion(const ModelParams& p) {
    return 4.0 * p.eta() * p.beta() * p.beta() < p.gamma();
}

double critical_beta(const ModelParams& p) {
    return std::sqrt(p.gamma() / (4.0 * p.eta()));
}

std::vector<std::pair<double, double>> lambda_curve(const ModelParams& p,
                                                    std::span<const double> betas) {
    if (betas.empty()) throw std::invalid_argument("lambda_curve: empty beta grid");
    for (std::size_t i = 1; i < betas.size(); ++i) {
        if (!(betas[i] > betas[i - 1])) {
            throw std::invalid_argument("lambda_curve: beta grid must be ascending");
        }
    }
    std::vector<std::pair<double, double>> curve;
    curve.reserve(betas.size());
    for (double beta : betas) {
        curve.emplace_back(beta, spectral_radius(reduced_jacobian(p.with_beta(beta))));
    }
    return curve;
}

double recovery_time_theory(const ModelParams& p) {
    const double rho = spectral_radius(reduced_jacobian(p));
    if (rho >= 1.0) {
        std::ostringstream msg;
        msg << "recovery time undefined: rho = " << rho << " >= 1";
        throw NumericalError(msg.str());
    }
    return -1.0 / std::log(rho);
}

namespace {

SpectralReport make_report(std::vector<Complex> eigenvalues, const ModelParams& p) {
    SpectralReport report;
    report.eigenvalues = std::move(eigenvalues);
    report.rho = 0.0;
    for (const auto& v : report.eigenvalues) report.rho = std::max(report.rho, std::abs(v));
    report.stable = report.rho < 1.0;
    report.criterion_satisfied = stability_criterion(p);
    report.beta_c = critical_beta(p);
    if (report.stable) report.tau_theory = -1.0 / std::log(report.rho);
    return report;
}

}  // namespace

SpectralReport spectral_report(const ModelParams& p) {
    const auto ev = eig2(reduced_jacobian(p));
    return make_report({ev.begin(), ev.end()}, p);
}

SpectralReport spectral_report_full(const ModelParams& p) {
    const auto ev = eig_small(full_jacobian(p));
    return make_report({ev.begin(), ev.end()}, p);
}

}  // namespace fcms
