#include "fcms/params.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fcms {

namespace {

void check(bool ok, const char* field, const char* requirement, double value) {
    if (ok) return;
    std::ostringstream msg;
    msg << "invalid ModelParams: " << field << " = " << value
        << " violates " << requirement;
    throw std::invalid_argument(msg.str());
}

}  // namespace

ModelParams::ModelParams(double beta, double gamma, double eta,
                         std::vector<double> alpha, double noise_sigma,
                         double noise_bound, double epsilon)
    : beta_(beta),
      gamma_(gamma),
      eta_(eta),
      alpha_(std::move(alpha)),
      noise_sigma_(noise_sigma),
      noise_bound_(noise_bound),
      epsilon_(epsilon) {
    check(std::isfinite(beta_) && beta_ > 0.0, "beta", "beta > 0", beta_);
    check(std::isfinite(gamma_) && gamma_ > 0.0 && gamma_ < 1.0, "gamma",
          "0 < gamma < 1", gamma_);
    check(std::isfinite(eta_) && eta_ > 0.0, "eta", "eta > 0", eta_);
    for (double a : alpha_) {
        check(std::isfinite(a) && a >= 0.0, "alpha", "alpha entries >= 0", a);
    }
    check(std::isfinite(noise_sigma_) && noise_sigma_ >= 0.0, "noise_sigma",
          "noise_sigma >= 0", noise_sigma_);
    check(std::isfinite(noise_bound_) && noise_bound_ > 0.0, "noise_bound",
          "noise_bound > 0", noise_bound_);
    check(std::isfinite(epsilon_) && epsilon_ >= 0.0, "epsilon", "epsilon >= 0",
          epsilon_);
}

ModelParams ModelParams::baseline(double beta) {
    return ModelParams(beta, 0.1, 0.01);
}

double ModelParams::alpha_at(std::size_t i) const {
    if (alpha_.empty()) return 0.0;
    if (alpha_.size() == 1) return alpha_.front();
    if (i < alpha_.size()) return alpha_[i];
    throw std::invalid_argument("alpha index out of range");
}

bool ModelParams::alpha_homogeneous() const noexcept {
    for (double a : alpha_) {
        if (a != alpha_.front()) return false;
    }
    return true;
}

double ModelParams::alpha_scalar() const {
    if (!alpha_homogeneous()) {
        throw std::invalid_argument(
            "heterogeneous alpha: the reduced system needs a single damping value "
            "(use full_jacobian)");
    }
    return alpha_.empty() ? 0.0 : alpha_.front();
}

ModelParams ModelParams::with_beta(double beta) const {
    return ModelParams(beta, gamma_, eta_, alpha_, noise_sigma_, noise_bound_, epsilon_);
}

ModelParams ModelParams::with_noise(double sigma, double bound) const {
    return ModelParams(beta_, gamma_, eta_, alpha_, sigma, bound, epsilon_);
}

ModelParams ModelParams::with_epsilon(double eps) const {
    return ModelParams(beta_, gamma_, eta_, alpha_, noise_sigma_, noise_bound_, eps);
}

}  // namespace fcms
