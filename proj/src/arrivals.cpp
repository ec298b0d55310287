#include "aoi/arrivals.hpp"

#include <numeric>

namespace aoi {

PatternSolution solve_arrivals(const ArrivalSchedule& arrivals, double energy, double T,
                               const DelayFunction& df, const SolverOptions& opts) {
  return solve_schedule(Objective::Age, arrivals, energy, T, df, opts);
}

std::optional<StaleBlock> find_stale(const PatternSolution& solution, double tol) {
  const Vector& a = solution.arrivals;
  const Vector& t = solution.policy.t;
  const Index n = a.size();
  for (Index i = 0; i + 1 < n; ++i) {
    Index l = 0;
    while (i + l + 1 < n && t[i] > a[i + l + 1] + tol) ++l;
    if (l > 0) return StaleBlock{i, l};
  }
  return std::nullopt;
}

std::pair<ArrivalSchedule, UpdatePolicy> drop_stale_transmissions(const PatternSolution& solution,
                                                                  const StaleBlock& stale) {
  const Vector& a = solution.arrivals;
  const Index n = a.size();
  const Index m = n - stale.skipped;
  Vector ta(m), tt(m), td(m);
  Index k = 0;
  for (Index i = 0; i < n; ++i) {
    if (i > stale.first && i <= stale.first + stale.skipped) continue;
    ta[k] = (i == stale.first) ? a[stale.first + stale.skipped] : a[i];
    tt[k] = solution.policy.t[i];
    td[k] = solution.policy.d[i];
    ++k;
  }
  return {ArrivalSchedule(std::move(ta)), UpdatePolicy(std::move(tt), std::move(td))};
}

PrunedSolution prune_stale(const ArrivalSchedule& arrivals, double energy, double T,
                           const DelayFunction& df, const SolverOptions& opts) {
  PatternSolution first = solve_arrivals(arrivals, energy, T, df, opts);
  std::vector<Index> kept(static_cast<std::size_t>(arrivals.size()));
  std::iota(kept.begin(), kept.end(), Index{0});

  PrunedSolution out{arrivals, kept, first, first, 0};
  while (auto stale = find_stale(out.solution, opts.consistency_tol)) {
    out.kept.erase(out.kept.begin() + stale->first, out.kept.begin() + stale->first + stale->skipped);
    Vector reduced(out.schedule.size() - stale->skipped);
    Index k = 0;
    for (Index i = 0; i < out.schedule.size(); ++i) {
      if (i >= stale->first && i < stale->first + stale->skipped) continue;
      reduced[k++] = out.schedule[i];
    }
    out.schedule = ArrivalSchedule(std::move(reduced));
    out.solution = solve_arrivals(out.schedule, energy, T, df, opts);
    ++out.rounds;
  }
  return out;
}

}  // namespace aoi
