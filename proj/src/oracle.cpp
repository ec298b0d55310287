#include "aoi/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

namespace aoi::oracle {

namespace {

void require_small(Index updates) {
  if (updates < 1 || updates > 3) throw DomainError("grid oracle supports 1 <= N <= 3");
}

void count_node(std::uint64_t& nodes, std::uint64_t budget) {
  if (++nodes > budget) {
    std::ostringstream os;
    os << "grid search exceeded the node budget of " << budget << " evaluations";
    throw OracleBudgetExceeded(os.str());
  }
}

// Delay grid and its energies (strictly decreasing).
struct DelayGrid {
  std::vector<double> d;
  std::vector<double> e;

  // Smallest grid delay whose energy fits in `remaining`, or -1.
  std::ptrdiff_t first_affordable(double remaining) const {
    auto it = std::partition_point(e.begin(), e.end(), [&](double v) { return v > remaining; });
    return it == e.end() ? -1 : it - e.begin();
  }
};

DelayGrid make_delay_grid(double total_energy, double T, const DelayFunction& df, const GridSpec& grid) {
  DelayGrid g;
  const double lo = df.delay(total_energy) * (1.0 - grid.margin);
  for (std::int64_t k = 0;; ++k) {
    const double d = lo + static_cast<double>(k) * grid.delta;
    if (d > T) break;
    if (d > 0.0) {
      g.d.push_back(d);
      g.e.push_back(df.energy(d));
    }
  }
  return g;
}

double grid_ceil(double x, double delta) {
  const double k = std::ceil(x / delta - 1e-9);
  return std::max(0.0, k * delta);
}

}  // namespace

GridResult grid_controlled(int updates, const EnergyProfile& profile, double T,
                           const DelayFunction& df, const GridSpec& grid,
                           const ControlledGridOptions& opts) {
  if (!opts.fixed_delays) require_small(updates);
  if (updates < 1) throw DomainError("grid oracle needs at least one update");
  if (!(grid.delta > 0.0)) throw DomainError("grid delta must be positive");
  const Index n = updates;
  GridResult best;
  Vector t(n), d(n);

  if (opts.fixed_delays) {
    const Vector& fixed = *opts.fixed_delays;
    if (fixed.size() != n) throw DomainError("fixed delays must have N entries");
    d = fixed;
    Vector tail(n);  // sum of delays from i to N
    double acc = 0.0;
    for (Index i = n - 1; i >= 0; --i) tail[i] = (acc += d[i]);

    std::function<void(Index, double, double)> walk = [&](Index i, double ready, double spent) {
      if (i == n) {
        count_node(best.nodes, grid.node_budget);
        const double age = controlled_age_area(t, d, T);
        if (age < best.value) {
          best.value = age;
          best.found = true;
          best.policy = UpdatePolicy(t, d);
        }
        return;
      }
      const double used = spent + df.energy(d[i]);
      for (double ti = grid_ceil(ready, grid.delta); ti + tail[i] <= T + 1e-12;
           ti += grid.delta) {
        if (used > profile.available(ti) * (1.0 + 1e-12)) continue;
        t[i] = ti;
        walk(i + 1, ti + d[i], used);
      }
    };
    walk(0, 0.0, 0.0);
    return best;
  }

  const DelayGrid dg = make_delay_grid(profile.total(), T, df, grid);
  std::function<void(Index, double, double)> walk = [&](Index i, double ready, double spent) {
    for (double ti = grid_ceil(ready, grid.delta); ti < T; ti += grid.delta) {
      const double budget = profile.available(ti) - spent;
      if (i + 1 == n) {
        const std::ptrdiff_t k = dg.first_affordable(budget);
        if (k < 0 || ti + dg.d[static_cast<std::size_t>(k)] > T + 1e-12) continue;
        count_node(best.nodes, grid.node_budget);
        t[i] = ti;
        d[i] = dg.d[static_cast<std::size_t>(k)];
        const double age = controlled_age_area(t, d, T);
        if (age < best.value) {
          best.value = age;
          best.found = true;
          best.policy = UpdatePolicy(t, d);
        }
        continue;
      }
      const std::ptrdiff_t k0 = dg.first_affordable(budget);
      if (k0 < 0) continue;
      for (std::size_t k = static_cast<std::size_t>(k0); k < dg.d.size(); ++k) {
        if (ti + dg.d[k] >= T) break;
        t[i] = ti;
        d[i] = dg.d[k];
        walk(i + 1, ti + dg.d[k], spent + dg.e[k]);
      }
    }
  };
  walk(0, 0.0, 0.0);
  return best;
}

ArrivalGridResult grid_arrivals(const ArrivalSchedule& arrivals, double energy, double T,
                                const DelayFunction& df, const GridSpec& grid,
                                bool allow_late_reception) {
  const Index n = arrivals.size();
  require_small(n);
  if (!(grid.delta > 0.0)) throw DomainError("grid delta must be positive");
  const Vector& a = arrivals.times();
  const Vector w = arrivals.gaps();
  const double horizon = allow_late_reception ? T + a[n - 1] + 10.0 * T : T;
  const DelayGrid dg = make_delay_grid(energy, horizon, df, grid);

  ArrivalGridResult best;
  Vector t(n), d(n);
  std::uint64_t nodes = 0;

  std::function<void(Index, double, double)> walk = [&](Index i, double ready, double spent) {
    const double ti = std::max(a[i], ready);
    t[i] = ti;
    if (i + 1 == n) {
      const std::ptrdiff_t k = dg.first_affordable(energy - spent);
      if (k < 0) return;
      d[i] = dg.d[static_cast<std::size_t>(k)];
      if (!allow_late_reception && ti + d[i] > T + 1e-12) return;
      count_node(nodes, grid.node_budget);
      const double age_obj = w.dot(t + d);
      const double delay_obj = 2.0 * t.sum() + d.sum();
      if (age_obj < best.age.value) {
        best.age = GridResult{true, UpdatePolicy(t, d), age_obj, 0};
      }
      if (delay_obj < best.delay.value) {
        best.delay = GridResult{true, UpdatePolicy(t, d), delay_obj, 0};
      }
      return;
    }
    const std::ptrdiff_t k0 = dg.first_affordable(energy - spent);
    if (k0 < 0) return;
    for (std::size_t k = static_cast<std::size_t>(k0); k < dg.d.size(); ++k) {
      if (!allow_late_reception && ti + dg.d[k] >= T) break;
      d[i] = dg.d[k];
      walk(i + 1, ti + dg.d[k], spent + dg.e[k]);
    }
  };
  walk(0, 0.0, 0.0);
  best.age.nodes = best.delay.nodes = nodes;
  return best;
}

KktReport kkt_audit(const PatternSolution& solution, const DelayFunction& df) {
  KktReport r;
  const Vector& d = solution.policy.d;
  const Vector& t = solution.policy.t;
  const Vector& a = solution.arrivals;
  const Index n = d.size();
  r.stationarity.resize(n);
  double spent = 0.0;
  for (Index i = 0; i < n; ++i) {
    r.stationarity[i] = solution.c[i] + solution.lambda * df.slope(d[i]);
    spent += df.energy(d[i]);
  }
  r.max_stationarity = n ? r.stationarity.cwiseAbs().maxCoeff() : 0.0;
  r.energy_residual = std::abs(spent - solution.energy_budget);
  for (Index i = 0; i < n; ++i) {
    const double expected = i == 0 ? a[0] : std::max(a[i], t[i - 1] + d[i - 1]);
    r.max_consistency_gap = std::max(r.max_consistency_gap, std::abs(t[i] - expected));
  }
  if (n) r.session_overrun = std::max(0.0, t[n - 1] + d[n - 1] - solution.session_length);
  return r;
}

double age_by_quadrature(const UpdatePolicy& policy, double T, const Vector& timestamps,
                         std::int64_t samples) {
  const Index n = policy.size();
  const double h = T / static_cast<double>(samples);
  double sum = 0.0;
  Index received = 0;  // receptions at or before the current sample
  for (std::int64_t k = 0; k < samples; ++k) {
    const double s = (static_cast<double>(k) + 0.5) * h;
    while (received < n && policy.t[received] + policy.d[received] <= s) ++received;
    const double latest = received == 0 ? 0.0 : timestamps[received - 1];
    sum += s - latest;
  }
  return sum * h;
}

}  // namespace aoi::oracle
