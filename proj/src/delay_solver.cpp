#include "aoi/delay_solver.hpp"

namespace aoi {

PatternSolution solve_delay(const ArrivalSchedule& arrivals, double energy, double T,
                            const DelayFunction& df, const SolverOptions& opts) {
  return solve_schedule(Objective::Delay, arrivals, energy, T, df, opts);
}

}  // namespace aoi
