#pragma once

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "fcms/params.hpp"

namespace fcms {

using Complex = std::complex<double>;

/// Row-major 2x2 real matrix.
struct Matrix2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;

    double trace() const noexcept { return a11 + a22; }
    double det() const noexcept { return a11 * a22 - a12 * a21; }
};

/// Row-major 3x3 real matrix.
struct Matrix3 {
    std::array<double, 9> m{};  // m[3*r + c]

    double& at(int r, int c) noexcept { return m[3 * r + c]; }
    double at(int r, int c) const noexcept { return m[3 * r + c]; }
};

/// Eigenvalues of a 2x2 matrix as roots of lambda^2 - tr lambda + det,
/// sorted by (magnitude desc, phase asc). Complex roots come back as an
/// exact conjugate pair.
std::array<Complex, 2> eig2(const Matrix2& m);

/// Eigenvalues of a 3x3 matrix via Durand-Kerner iteration on the cubic
/// characteristic polynomial plus one Newton polish per root (iteration
/// budget 100). Throws NumericalError if the relative residual contract
/// (1e-8 against the largest coefficient) cannot be met.
std::array<Complex, 3> eig_small(const Matrix3& m);

/// Jacobian of the reduced (S, d) system with homogeneous damping:
///   [[1-gamma, beta], [-4 eta beta, 1 - eta alpha]].
/// Throws std::invalid_argument when alpha is heterogeneous.
Matrix2 reduced_jacobian(const ModelParams& p);

/// Same matrix from raw coefficients (gamma = 0 / beta = 0 ablations
/// live outside the ModelParams range checks).
Matrix2 reduced_jacobian_coeffs(double beta, double gamma, double eta, double alpha) noexcept;

/// Jacobian of the memoryless-environment variant: [[0, beta], [-4 eta beta, 1]].
Matrix2 memoryless_jacobian_coeffs(double beta, double eta) noexcept;

/// Full (x1, x2, S) linearization with per-agent damping:
///   [[1-eta a1, 0, -2 eta beta], [0, 1-eta a2, 2 eta beta], [beta, -beta, 1-gamma]].
Matrix3 full_jacobian(const ModelParams& p);

double spectral_radius(const Matrix2& m);
double spectral_radius(const Matrix3& m);

/// Stability criterion 4 eta beta^2 < gamma, evaluated exactly (strict:
/// the boundary itself classifies as unstable).
bool stability_criterion(const ModelParams& p);

/// Critical coupling beta_c = sqrt(gamma / (4 eta)).
double critical_beta(const ModelParams& p);

/// Spectral radius of the reduced Jacobian at each beta in the grid.
/// Grid must be non-empty and ascending.
std::vector<std::pair<double, double>> lambda_curve(const ModelParams& p,
                                                    std::span<const double> betas);

/// Theoretical recovery time tau = -1 / ln rho(J). Throws NumericalError
/// when rho >= 1 (no finite recovery time).
double recovery_time_theory(const ModelParams& p);

/// Eigen-structure summary at one parameter point.
struct SpectralReport {
    std::vector<Complex> eigenvalues;  // sorted (magnitude desc, phase asc)
    double rho = 0.0;
    bool stable = false;
    bool criterion_satisfied = false;
    double beta_c = 0.0;
    std::optional<double> tau_theory;  // absent when rho >= 1
};

/// Report for the reduced 2x2 system (homogeneous alpha).
SpectralReport spectral_report(const ModelParams& p);
/// Report for the full 3x3 system (any alpha pair).
SpectralReport spectral_report_full(const ModelParams& p);

}  // namespace fcms
