#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aoi/model.hpp"

namespace aoi {

/// Inter-update intervals x_1..x_{N+1} of a controlled-measurement policy:
/// x_1 = t_1 + d_1, x_i = t_i + d_i - t_{i-1}, x_{N+1} = T - t_N.
struct InterUpdateVector {
  Vector x;
  Vector floors;  // d_1, d_i + d_{i-1}, d_N
  double level = 0.0;
};

/// Lower bounds on the intervals implied by the service delays.
Vector interval_floors(const Vector& d);

/// Intervals of an existing policy (inverse of recover_times).
Vector intervals_of(const UpdatePolicy& policy, double T);

/// Optimal intervals for fixed delays: x_i = max(floor_i, theta) with theta the
/// root of sum_i max(floor_i, theta) = T + sum d. Solved exactly by sorting the floors.
InterUpdateVector waterfill(const Vector& d, double T);

/// Same optimum, computed by repeatedly raising the current minimum set of
/// intervals to the next distinct value until the budget T + sum d is used up.
InterUpdateVector waterfill_literal(const Vector& d, double T);

/// t_1 = x_1 - d_1, t_i = t_{i-1} + x_i - d_i.
UpdatePolicy recover_times(const InterUpdateVector& intervals, const Vector& d);

struct ControlledSolution {
  UpdatePolicy policy;
  InterUpdateVector intervals;
  double delay = 0.0;  // common service delay
  double age = 0.0;    // true area A_T
  double energy_used = 0.0;
};

/// N updates sharing delay d = f^{-1}(E/N), intervals by water-filling.
ControlledSolution equal_delay_policy(int updates, double energy, double T, const DelayFunction& df);

struct SweepRow {
  int updates = 0;
  bool feasible = false;
  std::optional<double> delay;  // empty when E/N is below the Shannon floor
  std::optional<double> age;
  std::string reason;           // why the row is infeasible
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<int> best_updates;  // smallest N attaining the minimum age
  std::optional<ControlledSolution> best;
};

SweepResult sweep_updates(double energy, double T, const DelayFunction& df, int max_updates);

}  // namespace aoi
