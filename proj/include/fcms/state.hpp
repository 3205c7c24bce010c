#pragma once

#include <cstddef>
#include <vector>

namespace fcms {

/// Reduced closed-loop state: environmental memory S and disagreement
/// d = x1 - x2. The analysis workhorse.
struct ReducedState {
    double s = 0.0;
    double d = 0.0;
};

/// Full two-agent state with a scalar environment.
struct PairState {
    double x1 = 0.0;
    double x2 = 0.0;
    double s = 0.0;
};

/// N-agent state: one action and one environment trace per agent.
struct PopulationState {
    std::vector<double> x;
    std::vector<double> s;

    std::size_t size() const noexcept { return x.size(); }
};

inline double disagreement(const PairState& st) noexcept { return st.x1 - st.x2; }

inline ReducedState project(const PairState& st) noexcept {
    return ReducedState{st.s, st.x1 - st.x2};
}

bool is_finite(const ReducedState& st) noexcept;
bool is_finite(const PairState& st) noexcept;

/// Throws DivergenceError naming the first non-finite field.
void require_finite(const ReducedState& st);
void require_finite(const PairState& st);
void require_finite(const PopulationState& st);

/// Population mean of x (sequential summation; deterministic order).
double population_mean(const PopulationState& st);
/// Cross-sectional population variance of x (divides by N).
double population_variance(const PopulationState& st);

}  // namespace fcms
