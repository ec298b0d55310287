#pragma once

#include "aoi/patterns.hpp"

namespace aoi {

/// Schedule minimizing the total packet delay sum_i B (t_i - a_i) + B d_i / 2
/// under the same constraints as the age problem. The returned solution
/// carries both D_T (`delay`) and the age of the delay-optimal policy (`age`).
PatternSolution solve_delay(const ArrivalSchedule& arrivals, double energy, double T,
                            const DelayFunction& df, const SolverOptions& opts = {});

}  // namespace aoi
