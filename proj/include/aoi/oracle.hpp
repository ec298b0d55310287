#pragma once

#include <cstdint>
#include <limits>
#include <optional>

#include "aoi/model.hpp"
#include "aoi/patterns.hpp"

namespace aoi::oracle {

/// Grid for exhaustive search. Delays range over
/// [f^{-1}(total energy) * (1 - margin), T] in steps of `delta`; transmit times
/// over multiples of `delta` in [0, T].
struct GridSpec {
  double delta = 0.01;
  std::uint64_t node_budget = 100'000'000;
  double margin = 0.0;
};

struct GridResult {
  bool found = false;
  UpdatePolicy policy;
  double value = std::numeric_limits<double>::infinity();
  std::uint64_t nodes = 0;
};

struct ControlledGridOptions {
  /// Search transmit times only, with these delays held fixed.
  std::optional<Vector> fixed_delays;
};

/// Minimum true age over grid policies satisfying energy causality (any
/// number of harvests) and the service constraints. With free delays the last
/// delay is the smallest grid value the remaining energy affords; the age is
/// increasing in every delay, so nothing is lost by that. Free delays need
/// N <= 3; fixed delays take any N and are bounded by the node budget.
GridResult grid_controlled(int updates, const EnergyProfile& profile, double T,
                           const DelayFunction& df, const GridSpec& grid = {},
                           const ControlledGridOptions& opts = {});

struct ArrivalGridResult {
  GridResult age;    // value = sum_i (a_i - a_{i-1}) (t_i + d_i)
  GridResult delay;  // value = sum_i 2 t_i + d_i
};

/// Grid over delays with t_i = max{a_i, t_{i-1} + d_{i-1}}; both objectives.
ArrivalGridResult grid_arrivals(const ArrivalSchedule& arrivals, double energy, double T,
                                const DelayFunction& df, const GridSpec& grid = {},
                                bool allow_late_reception = false);

struct KktReport {
  Vector stationarity;            // c_i + lambda f'(d_i)
  double max_stationarity = 0.0;
  double energy_residual = 0.0;   // |sum f(d_i) - E|
  double max_consistency_gap = 0.0;  // max |t_i - max{a_i, t_{i-1} + d_{i-1}}|
  double session_overrun = 0.0;   // max(0, t_N + d_N - T)

  bool passes(double stationarity_tol = 1e-6, double energy_tol = 1e-8,
              double consistency_tol = 1e-9) const {
    return max_stationarity <= stationarity_tol && energy_residual <= energy_tol &&
           max_consistency_gap <= consistency_tol;
  }
};

KktReport kkt_audit(const PatternSolution& solution, const DelayFunction& df);

/// Midpoint-rule integral of a(t) = t - U(t), evaluating U(t) directly from
/// the receptions. Independent of the closed-form area.
double age_by_quadrature(const UpdatePolicy& policy, double T, const Vector& timestamps,
                         std::int64_t samples = 1'000'000);

}  // namespace aoi::oracle
