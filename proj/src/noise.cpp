#include "fcms/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace fcms {

void NoiseSpec::validate() const {
    if (!(std::isfinite(sigma) && sigma >= 0.0)) {
        throw std::invalid_argument("NoiseSpec: sigma must be >= 0");
    }
    if (!(std::isfinite(bound) && bound > 0.0)) {
        throw std::invalid_argument("NoiseSpec: bound must be > 0");
    }
}

NoiseStream::NoiseStream(const NoiseSpec& spec)
    : rng_(spec.seed), sigma_(spec.sigma), cap_(spec.bound * spec.sigma) {
    spec.validate();
}

const char* NoiseStream::generator_id() noexcept {
    return "mt19937_64/polar-normal/rejection-truncated";
}

double NoiseStream::standard_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    for (;;) {
        const double u = 2.0 * ((rng_() >> 11) * 0x1.0p-53) - 1.0;
        const double v = 2.0 * ((rng_() >> 11) * 0x1.0p-53) - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            const double f = std::sqrt(-2.0 * std::log(s) / s);
            spare_ = v * f;
            has_spare_ = true;
            return u * f;
        }
    }
}

double NoiseStream::draw() {
    if (sigma_ == 0.0) return 0.0;
    for (;;) {
        const double value = sigma_ * standard_normal();
        if (std::abs(value) <= cap_) return value;
    }
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t point_index) noexcept {
    // splitmix64 finalizer as the point-index hash.
    std::uint64_t z = point_index + 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    return base ^ z;
}

}  // namespace fcms
