#include "aoi/controlled.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace aoi {

namespace {

void require_fits(const Vector& d, double T) {
  if (d.size() == 0) throw DomainError("at least one update is required");
  if ((d.array() <= 0.0).any()) throw DomainError("service delays must be positive");
  if (!(T > 0.0)) throw DomainError("session length T must be positive");
  const double total = d.sum();
  if (total > T * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "service delays sum to " << total << " which exceeds the session length " << T;
    throw InfeasibleSession(os.str());
  }
}

}  // namespace

Vector interval_floors(const Vector& d) {
  const Index n = d.size();
  Vector l(n + 1);
  l[0] = d[0];
  for (Index i = 1; i < n; ++i) l[i] = d[i] + d[i - 1];
  l[n] = d[n - 1];
  return l;
}

Vector intervals_of(const UpdatePolicy& policy, double T) {
  const Index n = policy.size();
  Vector x(n + 1);
  double prev = 0.0;
  for (Index i = 0; i < n; ++i) {
    x[i] = policy.t[i] + policy.d[i] - prev;
    prev = policy.t[i];
  }
  x[n] = T - prev;
  return x;
}

InterUpdateVector waterfill(const Vector& d, double T) {
  require_fits(d, T);
  InterUpdateVector out;
  out.floors = interval_floors(d);
  const double budget = T + d.sum();

  std::vector<double> sorted(out.floors.data(), out.floors.data() + out.floors.size());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();

  // With the k smallest floors submerged, theta = (budget - sum of the rest) / k;
  // the right k is the one where theta lands in [sorted[k-1], sorted[k]].
  double upper = std::accumulate(sorted.begin(), sorted.end(), 0.0);
  double theta = sorted.front();
  for (std::size_t k = 1; k <= m; ++k) {
    upper -= sorted[k - 1];
    const double candidate = (budget - upper) / static_cast<double>(k);
    if (k == m || candidate <= sorted[k]) {
      theta = std::max(candidate, sorted.front());
      break;
    }
  }
  out.level = theta;
  out.x = out.floors.cwiseMax(theta);
  return out;
}

InterUpdateVector waterfill_literal(const Vector& d, double T) {
  require_fits(d, T);
  InterUpdateVector out;
  out.floors = interval_floors(d);
  out.x = out.floors;
  const double budget = T + d.sum();
  const double inf = std::numeric_limits<double>::infinity();

  for (Index step = 0; step <= out.x.size(); ++step) {
    const double deficit = budget - out.x.sum();
    if (deficit <= 0.0) break;
    const double lowest = out.x.minCoeff();
    double next = inf;
    Index members = 0;
    for (Index i = 0; i < out.x.size(); ++i) {
      if (out.x[i] == lowest) {
        ++members;
      } else {
        next = std::min(next, out.x[i]);
      }
    }
    const double share = deficit / static_cast<double>(members);
    const bool reaches_next = lowest + share >= next;
    for (Index i = 0; i < out.x.size(); ++i) {
      if (out.x[i] == lowest) out.x[i] = reaches_next ? next : lowest + share;
    }
    if (!reaches_next) break;
  }
  out.level = out.x.minCoeff();
  return out;
}

UpdatePolicy recover_times(const InterUpdateVector& intervals, const Vector& d) {
  const Index n = d.size();
  Vector t(n);
  double prev = 0.0;
  for (Index i = 0; i < n; ++i) {
    t[i] = prev + intervals.x[i] - d[i];
    prev = t[i];
  }
  return UpdatePolicy(std::move(t), d);
}

ControlledSolution equal_delay_policy(int updates, double energy, double T, const DelayFunction& df) {
  if (updates < 1) throw DomainError("number of updates must be at least 1");
  if (!(energy > 0.0)) throw DomainError("energy must be positive");
  const SessionConfig cfg(T);

  ControlledSolution sol;
  // All energy is spent: a shorter last delay always lowers the age.
  sol.delay = df.delay(energy / updates);
  const Vector d = Vector::Constant(updates, sol.delay);
  sol.intervals = waterfill(d, T);
  sol.policy = recover_times(sol.intervals, d);
  sol.age = evaluate_age(sol.policy, cfg, sol.policy.t);
  sol.energy_used = updates * df.energy(sol.delay);
  return sol;
}

SweepResult sweep_updates(double energy, double T, const DelayFunction& df, int max_updates) {
  if (max_updates < 1) throw DomainError("N_max must be at least 1");
  SweepResult out;
  for (int n = 1; n <= max_updates; ++n) {
    SweepRow row;
    row.updates = n;
    try {
      ControlledSolution sol = equal_delay_policy(n, energy, T, df);
      row.feasible = true;
      row.delay = sol.delay;
      row.age = sol.age;
      if (!out.best || sol.age < out.best->age) {
        out.best_updates = n;
        out.best = std::move(sol);
      }
    } catch (const EnergyBelowShannonFloor& e) {
      row.reason = "energy_below_shannon_floor";
    } catch (const InfeasibleSession& e) {
      row.delay = df.delay(energy / n);
      row.reason = "service_times_exceed_session";
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace aoi
