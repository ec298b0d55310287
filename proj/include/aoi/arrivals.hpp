#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "aoi/patterns.hpp"

namespace aoi {

/// Age-minimal schedule for externally arriving measurements with all energy
/// available at time 0.
PatternSolution solve_arrivals(const ArrivalSchedule& arrivals, double energy, double T,
                               const DelayFunction& df, const SolverOptions& opts = {});

/// A queue of measurements found waiting at a transmit time: updates
/// first..first+skipped all arrived by t_first.
struct StaleBlock {
  Index first = 0;
  Index skipped = 0;  // l >= 1
};

/// First update i whose transmit time is strictly after a later arrival
/// a_{i+l}, with l as large as possible.
std::optional<StaleBlock> find_stale(const PatternSolution& solution, double tol = 1e-9);

/// The policy that sends the freshest queued measurement a_{i+l} at t_i and
/// drops updates i+1..i+l, keeping everything else. Returns the reduced
/// schedule together with that policy.
std::pair<ArrivalSchedule, UpdatePolicy> drop_stale_transmissions(const PatternSolution& solution,
                                                                  const StaleBlock& stale);

struct PrunedSolution {
  ArrivalSchedule schedule;
  std::vector<Index> kept;  // zero-based indices into the original schedule
  PatternSolution solution;
  PatternSolution original;
  int rounds = 0;
};

/// Re-solve with stale measurements removed until no update waits behind a
/// fresher one.
PrunedSolution prune_stale(const ArrivalSchedule& arrivals, double energy, double T,
                           const DelayFunction& df, const SolverOptions& opts = {});

}  // namespace aoi
