#include "fcms/state.hpp"

#include <cmath>

#include "fcms/errors.hpp"

namespace fcms {

bool is_finite(const ReducedState& st) noexcept {
    return std::isfinite(st.s) && std::isfinite(st.d);
}

bool is_finite(const PairState& st) noexcept {
    return std::isfinite(st.x1) && std::isfinite(st.x2) && std::isfinite(st.s);
}

void require_finite(const ReducedState& st) {
    if (!std::isfinite(st.s)) throw DivergenceError("s", "non-finite state field s");
    if (!std::isfinite(st.d)) throw DivergenceError("d", "non-finite state field d");
}

void require_finite(const PairState& st) {
    if (!std::isfinite(st.x1)) throw DivergenceError("x1", "non-finite state field x1");
    if (!std::isfinite(st.x2)) throw DivergenceError("x2", "non-finite state field x2");
    if (!std::isfinite(st.s)) throw DivergenceError("s", "non-finite state field s");
}

void require_finite(const PopulationState& st) {
    for (std::size_t i = 0; i < st.x.size(); ++i) {
        if (!std::isfinite(st.x[i]))
            throw DivergenceError("x", "non-finite agent value", i);
    }
    for (std::size_t i = 0; i < st.s.size(); ++i) {
        if (!std::isfinite(st.s[i]))
            throw DivergenceError("s", "non-finite environment trace", i);
    }
}

double population_mean(const PopulationState& st) {
    double sum = 0.0;
    for (double v : st.x) sum += v;
    return sum / static_cast<double>(st.x.size());
}

double population_variance(const PopulationState& st) {
    const double mean = population_mean(st);
    double acc = 0.0;
    for (double v : st.x) {
        const double e = v - mean;
        acc += e * e;
    }
    return acc / static_cast<double>(st.x.size());
}

}  // namespace fcms
