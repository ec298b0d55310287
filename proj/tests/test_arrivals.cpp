#include <random>

#include <gtest/gtest.h>

#include "aoi/arrivals.hpp"
#include "aoi/oracle.hpp"
#include "aoi/validation.hpp"
#include "test_support.hpp"

using namespace aoi;

namespace {
Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

double weighted_receptions(const UpdatePolicy& p, const Vector& a) {
  double sum = 0.0;
  for (Index i = 0; i < a.size(); ++i) sum += (a[i] - (i ? a[i - 1] : 0.0)) * (p.t[i] + p.d[i]);
  return sum;
}

void expect_matches_grid(const PatternSolution& s, const DelayFunction& df, double delta) {
  oracle::GridSpec grid;
  grid.delta = delta;
  const auto g = oracle::grid_arrivals(ArrivalSchedule(s.arrivals), s.energy_budget, s.session_length, df, grid);
  ASSERT_TRUE(g.age.found);
  EXPECT_GE(g.age.value, s.objective - 1e-6);
  EXPECT_LE(g.age.value - s.objective, validation::arrival_grid_factor(s, df) * delta);
}
}  // namespace

TEST(Arrivals, SingleUpdate) {
  DelayFunction df(1.0);
  const PatternSolution s = solve_arrivals(ArrivalSchedule(vec({2})), 3.0, 10.0, df);
  EXPECT_NEAR(s.policy.t[0], 2.0, 1e-12);
  EXPECT_NEAR(s.policy.d[0], 1.0, 1e-9);
  EXPECT_NEAR(s.age, 36.0, 1e-8);
  EXPECT_NEAR(s.objective + 50.0 - 20.0, 36.0, 1e-8);
}

TEST(Arrivals, BeatsEveryConsistentPattern) {
  DelayFunction df(1.0);
  std::mt19937_64 rng(13);
  for (int k = 0; k < 40; ++k) {
    const Index n = 2 + k % 3;
    const auto c = validation::random_arrival_case(rng, static_cast<int>(n), df);
    const ArrivalSchedule a(c.arrivals);
    const PatternSolution best = solve_arrivals(a, c.energy, c.T, df);
    int consistent = 0;
    for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << (n - 1)); ++idx) {
      auto out = solve_pattern(ChoicePattern::from_index(n, idx), a, c.energy, c.T, df);
      if (const auto* s = std::get_if<PatternSolution>(&out)) {
        ++consistent;
        EXPECT_LE(best.objective, s->objective * (1 + 1e-12));
      }
    }
    if (consistent == 0) EXPECT_FALSE(best.pattern.is_binary());

    EXPECT_NEAR(best.policy.d.unaryExpr([&](double d) { return df.energy(d); }).sum(), c.energy, 1e-8);
    const oracle::KktReport kkt = oracle::kkt_audit(best, df);
    EXPECT_TRUE(kkt.passes()) << kkt.max_stationarity << " " << kkt.energy_residual << " "
                              << kkt.max_consistency_gap;
    EXPECT_TRUE(check_feasibility(best.policy, EnergyProfile::single(c.energy), SessionConfig(c.T), df, &a)
                    .feasible());
  }
}

TEST(Arrivals, AgeIsTheLinearObjectivePlusAConstant) {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 300; ++k) {
    const Index n = 1 + k % 6;
    const double T = fixtures::uniform(rng, 2.0, 20.0);
    const Vector a = fixtures::random_arrivals(rng, n, 0.5 * T);
    const UpdatePolicy p = fixtures::random_policy(rng, n, T, &a);
    const double identity = weighted_receptions(p, a) + 0.5 * T * T - T * a[n - 1];
    EXPECT_NEAR(evaluate_age(p, SessionConfig(T), a), identity, 1e-9);
  }
}

TEST(Arrivals, MoreEnergyNeverHurts) {
  DelayFunction df(1.0);
  const ArrivalSchedule a(vec({0.5, 1.0, 2.0, 2.2}));
  double prev = std::numeric_limits<double>::infinity();
  for (double E = 8.0; E < 80.0; E *= 1.3) {
    const PatternSolution s = solve_arrivals(a, E, 10.0, df);
    EXPECT_LE(s.age, prev + 1e-9);
    prev = s.age;
  }
}

TEST(Arrivals, TieFaceMatchesGrid) {
  // With gaps (1, 2) the arrival branch wants d_1 > 2 and the chain branch
  // wants d_1 < 2 over a band of budgets; there the first service ends at a_2.
  DelayFunction df(1.0);
  const ArrivalSchedule a(vec({1, 3}));
  int ties = 0;
  for (double E = 3.0; E < 8.0; E += 0.05) {
    const PatternSolution s = solve_arrivals(a, E, 20.0, df);
    if (s.pattern.choices[0] != Choice::Tie) continue;
    ++ties;
    EXPECT_NEAR(s.policy.t[0] + s.policy.d[0], 3.0, 1e-9);
    EXPECT_NEAR(s.policy.t[1], 3.0, 1e-9);
    EXPECT_GE(s.boundary_multipliers[0], -1e-12);
    EXPECT_LE(s.boundary_multipliers[0], 2.0 + 1e-9);
    EXPECT_TRUE(oracle::kkt_audit(s, df).passes());
    expect_matches_grid(s, df, 0.01);
  }
  EXPECT_GT(ties, 0);
}

TEST(Arrivals, TerminalFaceMatchesGrid) {
  DelayFunction df(1.0);
  const PatternSolution s = solve_arrivals(ArrivalSchedule(vec({1, 9})), 4.7, 10.0, df);
  EXPECT_TRUE(s.pattern.terminal_tight);
  EXPECT_NEAR(s.policy.t[1] + s.policy.d[1], 10.0, 1e-9);
  EXPECT_TRUE(oracle::kkt_audit(s, df).passes());
  expect_matches_grid(s, df, 0.01);

  SolverOptions late;
  late.allow_late_reception = true;
  const PatternSolution free = solve_arrivals(ArrivalSchedule(vec({1, 9})), 4.7, 10.0, df, late);
  EXPECT_FALSE(free.pattern.terminal_tight);
  EXPECT_GT(free.policy.t[1] + free.policy.d[1], 10.0);
  EXPECT_LE(free.objective, s.objective);
}

TEST(Arrivals, LastArrivalAtSessionEnd) {
  DelayFunction df(1.0);
  EXPECT_THROW(solve_arrivals(ArrivalSchedule(vec({1, 10})), 5.0, 10.0, df), Infeasible);
}

TEST(Pruning, QueuedMeasurementsAreDropped) {
  DelayFunction df(1.0);
  const ArrivalSchedule a(vec({1, 1.2, 1.4}));
  const PatternSolution s = solve_arrivals(a, 6.0, 10.0, df);
  const auto stale = find_stale(s);
  ASSERT_TRUE(stale.has_value());

  const auto [reduced, policy] = drop_stale_transmissions(s, *stale);
  EXPECT_EQ(reduced.size(), 3 - stale->skipped);
  const double used = policy.d.unaryExpr([&](double d) { return df.energy(d); }).sum();
  EXPECT_LT(used, 6.0);
  EXPECT_LT(evaluate_age(policy, SessionConfig(10.0), reduced.times()), s.age);

  const PrunedSolution p = prune_stale(a, 6.0, 10.0, df);
  EXPECT_GE(p.rounds, 1);
  EXPECT_LT(p.schedule.size(), 3);
  EXPECT_LT(p.solution.age, s.age);
  EXPECT_FALSE(find_stale(p.solution).has_value());
  for (std::size_t k = 0; k < p.kept.size(); ++k) EXPECT_DOUBLE_EQ(p.schedule[Index(k)], a[p.kept[k]]);
}

TEST(Pruning, NothingStaleLeavesTheSolution) {
  DelayFunction df(1.0);
  const ArrivalSchedule a(vec({3, 6}));
  const PrunedSolution p = prune_stale(a, 4.0, 10.0, df);
  EXPECT_EQ(p.rounds, 0);
  EXPECT_EQ(p.schedule.size(), 2);
  EXPECT_EQ(p.solution.age, p.original.age);
}

TEST(Pruning, NeverWorseOnRandomInstances) {
  DelayFunction df(1.0);
  std::mt19937_64 rng(23);
  for (int k = 0; k < 60; ++k) {
    const Index n = 2 + k % 4;
    const double T = 10.0;
    const Vector a = fixtures::random_arrivals(rng, n, 0.3 * T);
    const double E = n * df.shannon_floor() * fixtures::uniform(rng, 2.0, 5.0);
    const PrunedSolution p = prune_stale(ArrivalSchedule(a), E, T, df);
    EXPECT_LE(p.solution.age, p.original.age + 1e-9);
    EXPECT_FALSE(find_stale(p.solution).has_value());
    if (p.rounds > 0) {
      const auto stale = find_stale(p.original);
      const auto [reduced, policy] = drop_stale_transmissions(p.original, *stale);
      EXPECT_LT(evaluate_age(policy, SessionConfig(T), reduced.times()), p.original.age);
    }
  }
}

TEST(Arrivals, NoSampledPolicyDoesBetter) {
  // Random energy-exhausting delays, timed by the running maximum.
  DelayFunction df(1.0);
  std::mt19937_64 rng(29);
  for (int k = 0; k < 30; ++k) {
    const Index n = 4 + k % 3;
    const auto c = validation::random_arrival_case(rng, static_cast<int>(n), df);
    const ArrivalSchedule a(c.arrivals);
    const PatternSolution best = solve_arrivals(a, c.energy, c.T, df);
    for (int trial = 0; trial < 400; ++trial) {
      Vector coef(n);
      const double spread = trial % 2 ? 0.05 : 2.0;
      for (Index i = 0; i < n; ++i) coef[i] = best.c[i] * std::exp(fixtures::uniform(rng, -spread, spread));
      const double lambda = solve_lambda(coef, c.energy, df);
      Vector t(n), d(n);
      for (Index i = 0; i < n; ++i) {
        d[i] = df.delay_at_slope(-coef[i] / lambda);
        t[i] = i ? std::max(c.arrivals[i], t[i - 1] + d[i - 1]) : c.arrivals[0];
      }
      if (t[n - 1] + d[n - 1] > c.T) continue;
      EXPECT_LE(best.objective, weighted_receptions(UpdatePolicy(t, d), c.arrivals) + 1e-9);
    }
  }
}
