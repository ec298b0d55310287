#include <random>

#include <gtest/gtest.h>

#include "aoi/arrivals.hpp"
#include "aoi/controlled.hpp"
#include "aoi/oracle.hpp"
#include "aoi/validation.hpp"

using namespace aoi;

namespace {
Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}
}  // namespace

TEST(GridControlled, SingleUpdate) {
  DelayFunction df(1.0);
  oracle::GridSpec grid;
  const oracle::GridResult g = oracle::grid_controlled(1, EnergyProfile::single(3), 10, df, grid);
  ASSERT_TRUE(g.found);
  EXPECT_GE(g.value, 29.75 - 1e-9);
  EXPECT_LE(g.value, 29.75 + validation::controlled_grid_factor(1, 10) * grid.delta);
}

TEST(GridControlled, EqualDelaysAreNotBeatenWithFreeDelays) {
  DelayFunction df(1.0);
  oracle::GridSpec grid;
  grid.delta = 0.05;
  for (int n = 1; n <= 2; ++n) {
    const ControlledSolution s = equal_delay_policy(n, 20, 10, df);
    const oracle::GridResult g = oracle::grid_controlled(n, EnergyProfile::single(20), 10, df, grid);
    ASSERT_TRUE(g.found);
    EXPECT_GE(g.value, s.age - 1e-6);
    EXPECT_LE(g.value - s.age, validation::controlled_grid_factor(n, 10) * grid.delta);
  }
}

TEST(GridControlled, FixedDelaysThatOverfillTheSession) {
  DelayFunction df(1.0);
  oracle::ControlledGridOptions opts;
  opts.fixed_delays = Vector::Constant(8, 1.280542313512804);
  const oracle::GridResult g = oracle::grid_controlled(8, EnergyProfile::single(20), 10, df, {}, opts);
  EXPECT_FALSE(g.found);
}

TEST(GridControlled, FreeDelaysNeedSmallN) {
  DelayFunction df(1.0);
  EXPECT_THROW(oracle::grid_controlled(4, EnergyProfile::single(20), 10, df), DomainError);
  EXPECT_THROW(oracle::grid_controlled(0, EnergyProfile::single(20), 10, df), DomainError);
}

TEST(GridControlled, NodeBudget) {
  DelayFunction df(1.0);
  oracle::GridSpec grid;
  grid.node_budget = 10;
  EXPECT_THROW(oracle::grid_controlled(2, EnergyProfile::single(20), 10, df, grid), OracleBudgetExceeded);
}

TEST(GridControlled, StaggeredHarvests) {
  DelayFunction df(1.0);
  const EnergyProfile profile({{0, 3}, {5, 3}});
  oracle::GridSpec grid;
  grid.delta = 0.05;
  const oracle::GridResult g = oracle::grid_controlled(2, profile, 10, df, grid);
  ASSERT_TRUE(g.found);
  EXPECT_TRUE(check_feasibility(g.policy, profile, SessionConfig(10), df).feasible());
  EXPECT_GE(g.value, equal_delay_policy(2, 6, 10, df).age - 1e-6);
  EXPECT_NEAR(controlled_age_area(g.policy.t, g.policy.d, 10.0), g.value, 1e-12);
}

TEST(GridArrivals, SingleUpdate) {
  DelayFunction df(1.0);
  const oracle::ArrivalGridResult g = oracle::grid_arrivals(ArrivalSchedule(vec({2})), 3, 10, df);
  ASSERT_TRUE(g.age.found);
  EXPECT_GE(g.age.value, 6.0 - 1e-9);
  EXPECT_LE(g.age.value, 6.0 + 0.05);
  EXPECT_GE(g.delay.value, 5.0 - 1e-9);
  EXPECT_LE(g.delay.value, 5.0 + 0.05);
}

TEST(GridArrivals, AgreesWithSolver) {
  DelayFunction df(1.0);
  std::mt19937_64 rng(41);
  oracle::GridSpec grid;
  grid.delta = 0.02;
  for (int k = 0; k < 6; ++k) {
    const auto c = validation::random_arrival_case(rng, 1 + k % 3, df);
    const auto cmp = validation::compare_arrivals(c, df, grid);
    EXPECT_TRUE(cmp.age.ok) << cmp.age.solver << " " << cmp.age.grid << " " << cmp.age.allowed;
    EXPECT_TRUE(cmp.delay.ok) << cmp.delay.solver << " " << cmp.delay.grid << " " << cmp.delay.allowed;
  }
}

TEST(KktAudit, FlagsPerturbedSolutions) {
  DelayFunction df(1.0);
  const PatternSolution s = solve_arrivals(ArrivalSchedule(vec({1, 3, 6})), 9.0, 12.0, df);
  EXPECT_TRUE(oracle::kkt_audit(s, df).passes());

  PatternSolution moved = s;
  moved.policy.d[0] *= 1.01;
  EXPECT_FALSE(oracle::kkt_audit(moved, df).passes());

  PatternSolution scaled = s;
  scaled.lambda *= 2;
  EXPECT_FALSE(oracle::kkt_audit(scaled, df).passes());
}

TEST(Quadrature, PiecewiseLinearAge) {
  UpdatePolicy p(vec({1, 4}), vec({1, 2}));
  EXPECT_NEAR(oracle::age_by_quadrature(p, 10, vec({0.5, 3})), evaluate_age(p, SessionConfig(10), vec({0.5, 3})),
              1e-5);
  EXPECT_NEAR(oracle::age_by_quadrature(UpdatePolicy(Vector(0), Vector(0)), 3, Vector(0)), 4.5, 1e-6);
}
