#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "aoi/model.hpp"

namespace aoi {

/// How the transmit time of update j (j >= 2) is pinned once delays are known.
enum class Choice : std::uint8_t {
  Arrival = 0,  // t_j = a_j
  Chain = 1,    // t_j = t_{j-1} + d_{j-1}
  Tie = 2,      // both hold: t_j = a_j = t_{j-1} + d_{j-1}
};

/// Branch selection inside t_j = max{a_j, t_{j-1} + d_{j-1}} for j = 2..N.
///
/// Binary patterns (Arrival/Chain only, free session end) are the ones the
/// enumeration walks first. Tie entries and `terminal_tight` describe boundary
/// faces where an equality holds at the optimum; those carry an extra
/// multiplier and are searched only when no binary pattern is consistent.
struct ChoicePattern {
  std::vector<Choice> choices;
  bool terminal_tight = false;  // t_N + d_N = T

  Index updates() const { return static_cast<Index>(choices.size()) + 1; }
  bool is_binary() const;

  /// Binary code with bit k holding the choice for update k+2 (Arrival = 0, Chain = 1).
  std::uint64_t index() const;
  static ChoicePattern from_index(Index updates, std::uint64_t index);

  /// One letter per update 2..N (A, C or T), then "|T" if the session end is tight.
  std::string to_string() const;
};

enum class Objective { Age, Delay };

/// Linear objective sum_j time_j * t_j + delay_j * d_j.
///   age:   time_j = delay_j = a_j - a_{j-1}
///   delay: time_j = 2, delay_j = 1
struct ObjectiveWeights {
  Vector time;
  Vector delay;
};

ObjectiveWeights objective_weights(Objective kind, const ArrivalSchedule& arrivals);

/// Coefficient of d_i once t is expanded along the pattern: the delay weight
/// of update i plus the time weight of every later update chained back to it.
Vector chain_coefficients(const ChoicePattern& pattern, const ObjectiveWeights& weights);

/// Age coefficients c_i = sum_{j=i}^{J_i} (a_j - a_{j-1}).
Vector pattern_coefficients(const ChoicePattern& pattern, const ArrivalSchedule& arrivals);

/// Delay coefficients c_i = 1 + 2 r_i, r_i = length of the chain run after i.
Vector delay_coefficients(const ChoicePattern& pattern, Index updates);

/// Unique lambda > 0 with sum_i h(-c_i / lambda) = E.
double solve_lambda(const Vector& c, double energy, const DelayFunction& df);

struct SolverOptions {
  bool allow_late_reception = false;  // drop t_N + d_N <= T
  double consistency_tol = 1e-9;      // absolute, on times
};

struct PatternSolution {
  Objective kind = Objective::Age;
  ChoicePattern pattern;
  std::uint64_t rank = 0;  // enumeration order; binary patterns use their index
  Vector arrivals;
  double energy_budget = 0.0;
  double session_length = 0.0;
  /// Effective weights: c_i = lambda * (-f'(d_i)). Equal to the pattern
  /// coefficients plus the boundary multiplier of the block holding i.
  Vector c;
  Vector boundary_multipliers;  // per update, the multiplier of its block (0 if none)
  double lambda = 0.0;
  UpdatePolicy policy;
  double objective = 0.0;  // sum time_j t_j + delay_j d_j
  double age = 0.0;        // true A_T
  double delay = 0.0;      // D_T
};

struct Inconsistent {
  std::string reason;
};

using PatternOutcome = std::variant<PatternSolution, Inconsistent>;

/// Solve the KKT system for one fixed pattern and check that the pattern's
/// branches are the running maxima of the resulting times.
PatternOutcome solve_pattern(const ChoicePattern& pattern, const ArrivalSchedule& arrivals,
                             double energy, double T, const DelayFunction& df,
                             Objective kind = Objective::Age, const SolverOptions& opts = {});

/// Enumerate all 2^{N-1} binary patterns and keep the consistent one of least
/// cost (ties to the smallest index). If none is consistent, walk boundary
/// faces by increasing number of active equalities and return the first
/// consistent one. Throws Infeasible when nothing is consistent.
PatternSolution solve_schedule(Objective kind, const ArrivalSchedule& arrivals, double energy,
                               double T, const DelayFunction& df, const SolverOptions& opts = {});

}  // namespace aoi
