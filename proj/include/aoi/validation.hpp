#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "aoi/oracle.hpp"

namespace aoi::validation {

/// Slack allowed between a grid optimum and the analytic optimum: the grid can
/// never beat the solver by more than `solver_slack`, and may trail it by at
/// most `grid_factor * delta`.
struct GapTolerance {
  double solver_slack = 1e-6;
  double grid_factor = 0.0;

  bool accepts(double solver, double grid, double delta) const {
    return grid >= solver - solver_slack && grid - solver <= grid_factor * delta;
  }
};

/// Grid-resolution constant for the controlled problem. Rounding each transmit
/// time up to the grid moves each reception by at most delta; the area changes
/// by at most 2 T delta per moved time.
double controlled_grid_factor(Index updates, double T);

/// Grid-resolution constant for the arrival problems. Rounding each delay to
/// the grid shifts the linear objective by at most (sum of coefficients) *
/// delta, and the last delay absorbs the energy change at a slope ratio
/// bounded by f'(d_min)/f'(d_max).
double arrival_grid_factor(const PatternSolution& solution, const DelayFunction& df);

struct ControlledCase {
  int updates;
  double energy;
  double T;
};

struct ArrivalCase {
  Vector arrivals;
  double energy;
  double T;
};

/// Random controlled instance whose equal-delay policy leaves between 20% and
/// 80% of the session idle.
ControlledCase random_controlled_case(std::mt19937_64& rng, int updates, const DelayFunction& df);

/// Random arrival instance: T in [3, 6] * max(1, N/3), N arrivals in (0, 0.6 T),
/// and the energy of N equal delays of (0.1 to 0.4) T/N.
ArrivalCase random_arrival_case(std::mt19937_64& rng, int updates, const DelayFunction& df);

struct Comparison {
  double solver = 0.0;
  double grid = 0.0;
  double allowed = 0.0;  // grid_factor * delta
  bool ok = false;
};

Comparison compare_controlled(const ControlledCase& c, const DelayFunction& df,
                              const oracle::GridSpec& grid);

struct ArrivalComparison {
  Comparison age;
  Comparison delay;
};

ArrivalComparison compare_arrivals(const ArrivalCase& c, const DelayFunction& df,
                                   const oracle::GridSpec& grid, const SolverOptions& opts = {});

}  // namespace aoi::validation
