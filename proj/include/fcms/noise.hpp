#pragma once

#include <cstdint>
#include <random>

namespace fcms {

enum class NoiseTarget { Disagreement, PerAgent };

/// Bounded Gaussian noise: N(0, sigma^2) samples rejected and redrawn
/// until |value| <= bound * sigma. Rejection preserves the zero mean
/// exactly.
struct NoiseSpec {
    double sigma = 0.0;
    double bound = 3.0;  // in units of sigma
    NoiseTarget target = NoiseTarget::Disagreement;
    std::uint64_t seed = 0;

    void validate() const;  // sigma >= 0, bound > 0
};

/// Deterministic, seedable draw stream. Generator identity (recorded in
/// run metadata): mt19937_64 with the Marsaglia polar transform; the
/// spare deviate is cached across draws. sigma = 0 yields 0 without
/// consuming generator state.
class NoiseStream {
public:
    explicit NoiseStream(const NoiseSpec& spec);

    double draw();

    static const char* generator_id() noexcept;

private:
    double standard_normal();

    std::mt19937_64 rng_;
    double sigma_;
    double cap_;  // bound * sigma
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Per-point stream seed for sweeps: base seed XOR a point-index hash
/// (splitmix64 finalizer), so grid points are independent but reproducible.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t point_index) noexcept;

}  // namespace fcms
