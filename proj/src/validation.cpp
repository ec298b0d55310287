#include "aoi/validation.hpp"

#include <algorithm>
#include <cmath>

#include "aoi/arrivals.hpp"
#include "aoi/controlled.hpp"
#include "aoi/delay_solver.hpp"

namespace aoi::validation {

double controlled_grid_factor(Index updates, double T) {
  return 2.0 * static_cast<double>(updates) * T;
}

double arrival_grid_factor(const PatternSolution& solution, const DelayFunction& df) {
  const Index n = solution.policy.size();
  const ArrivalSchedule arrivals(solution.arrivals);
  const ObjectiveWeights w = objective_weights(solution.kind, arrivals);
  double steepest = 0.0;
  double flattest = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i) {
    const double s = std::abs(df.slope(solution.policy.d[i]));
    steepest = std::max(steepest, s);
    flattest = std::min(flattest, s);
  }
  const double ratio = std::max(1.0, steepest / flattest);
  return static_cast<double>(n) * (w.time.sum() + w.delay.sum()) * ratio;
}

ControlledCase random_controlled_case(std::mt19937_64& rng, int updates, const DelayFunction& df) {
  std::uniform_real_distribution<double> session(3.0, 6.0);
  std::uniform_real_distribution<double> fill(0.2, 0.8);
  ControlledCase c{updates, 0.0, session(rng)};
  const double d = fill(rng) * c.T / updates;
  c.energy = updates * df.energy(d);
  return c;
}

ArrivalCase random_arrival_case(std::mt19937_64& rng, int updates, const DelayFunction& df) {
  std::uniform_real_distribution<double> session(3.0, 6.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ArrivalCase c;
  c.T = session(rng) * std::max(1.0, updates / 3.0);
  std::vector<double> a(static_cast<std::size_t>(updates));
  const double spacing = 0.01 * c.T;
  for (auto& v : a) v = unit(rng);
  std::sort(a.begin(), a.end());
  c.arrivals.resize(updates);
  // Spread into (0, 0.6 T) keeping a minimum spacing.
  const double span = 0.6 * c.T - spacing * updates;
  for (int i = 0; i < updates; ++i) c.arrivals[i] = spacing * (i + 1) + span * a[static_cast<std::size_t>(i)];
  const double d = (0.1 + 0.3 * unit(rng)) * c.T / updates;
  c.energy = updates * df.energy(d);
  return c;
}

Comparison compare_controlled(const ControlledCase& c, const DelayFunction& df,
                              const oracle::GridSpec& grid) {
  const ControlledSolution sol = equal_delay_policy(c.updates, c.energy, c.T, df);
  oracle::ControlledGridOptions opts;
  opts.fixed_delays = sol.policy.d;
  const oracle::GridResult best =
      oracle::grid_controlled(c.updates, EnergyProfile::single(c.energy), c.T, df, grid, opts);
  GapTolerance tol{1e-6, controlled_grid_factor(c.updates, c.T)};
  Comparison cmp;
  cmp.solver = sol.age;
  cmp.grid = best.found ? best.value : std::numeric_limits<double>::infinity();
  cmp.allowed = tol.grid_factor * grid.delta;
  cmp.ok = best.found && tol.accepts(cmp.solver, cmp.grid, grid.delta);
  return cmp;
}

ArrivalComparison compare_arrivals(const ArrivalCase& c, const DelayFunction& df,
                                   const oracle::GridSpec& grid, const SolverOptions& opts) {
  const ArrivalSchedule arrivals(c.arrivals);
  const PatternSolution age = solve_arrivals(arrivals, c.energy, c.T, df, opts);
  const PatternSolution delay = solve_delay(arrivals, c.energy, c.T, df, opts);
  const oracle::ArrivalGridResult best =
      oracle::grid_arrivals(arrivals, c.energy, c.T, df, grid, opts.allow_late_reception);

  auto fill = [&](const PatternSolution& s, const oracle::GridResult& g) {
    GapTolerance tol{1e-6, arrival_grid_factor(s, df)};
    Comparison cmp;
    cmp.solver = s.objective;
    cmp.grid = g.found ? g.value : std::numeric_limits<double>::infinity();
    cmp.allowed = tol.grid_factor * grid.delta;
    cmp.ok = g.found && tol.accepts(cmp.solver, cmp.grid, grid.delta);
    return cmp;
  };
  return {fill(age, best.age), fill(delay, best.delay)};
}

}  // namespace aoi::validation
