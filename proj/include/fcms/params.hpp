#pragma once

#include <cstddef>
#include <vector>

namespace fcms {

/// Scalar parameters of the closed loop. Invariants are enforced at
/// construction: beta > 0, eta > 0, 0 < gamma < 1, alpha entries >= 0,
/// noise_sigma >= 0, noise_bound > 0, epsilon >= 0.
class ModelParams {
public:
    /// alpha: per-agent damping coefficients. Empty means "all zero";
    /// a single entry is treated as homogeneous.
    ModelParams(double beta, double gamma, double eta,
                std::vector<double> alpha = {},
                double noise_sigma = 0.0,
                double noise_bound = 3.0,
                double epsilon = 0.0);

    /// Canonical baseline: gamma = 0.1, eta = 0.01 (beta_c = sqrt(2.5)).
    static ModelParams baseline(double beta = 0.5);

    double beta() const noexcept { return beta_; }
    double gamma() const noexcept { return gamma_; }
    double eta() const noexcept { return eta_; }
    const std::vector<double>& alpha() const noexcept { return alpha_; }
    double noise_sigma() const noexcept { return noise_sigma_; }
    double noise_bound() const noexcept { return noise_bound_; }
    double epsilon() const noexcept { return epsilon_; }

    /// Damping coefficient of agent i (0 when none was given).
    double alpha_at(std::size_t i) const;
    bool alpha_homogeneous() const noexcept;
    /// Single damping value; throws std::invalid_argument when heterogeneous.
    double alpha_scalar() const;

    ModelParams with_beta(double beta) const;
    ModelParams with_noise(double sigma, double bound = 3.0) const;
    ModelParams with_epsilon(double eps) const;

private:
    double beta_;
    double gamma_;
    double eta_;
    std::vector<double> alpha_;
    double noise_sigma_;
    double noise_bound_;
    double epsilon_;
};

}  // namespace fcms
