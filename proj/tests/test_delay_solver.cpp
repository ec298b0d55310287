#include <random>

#include <gtest/gtest.h>

#include "aoi/arrivals.hpp"
#include "aoi/delay_solver.hpp"
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

TEST(DelaySolver, SingleUpdate) {
  DelayFunction df(1.0);
  const PatternSolution s = solve_delay(ArrivalSchedule(vec({2})), 3.0, 10.0, df);
  EXPECT_EQ(s.kind, Objective::Delay);
  EXPECT_NEAR(s.policy.t[0], 2.0, 1e-12);
  EXPECT_NEAR(s.policy.d[0], 1.0, 1e-9);
  EXPECT_NEAR(s.delay, 0.5, 1e-9);
  EXPECT_NEAR(s.age, 36.0, 1e-8);
}

TEST(DelaySolver, EqualGapsGiveTheAgeOptimalPolicy) {
  DelayFunction df(1.0);
  const ArrivalSchedule a(vec({2, 4, 6}));
  const PatternSolution d = solve_delay(a, 9.0, 10.0, df);
  const PatternSolution g = solve_arrivals(a, 9.0, 10.0, df);
  EXPECT_EQ(d.pattern.to_string(), "AA");
  EXPECT_LE((d.policy.t - g.policy.t).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE((d.policy.d - g.policy.d).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(DelaySolver, IdentityAndOptimality) {
  DelayFunction df(2.0);
  std::mt19937_64 rng(31);
  for (int k = 0; k < 50; ++k) {
    const int n = 1 + k % 4;
    const auto c = validation::random_arrival_case(rng, n, df);
    const ArrivalSchedule a(c.arrivals);
    const PatternSolution s = solve_delay(a, c.energy, c.T, df);
    EXPECT_NEAR(s.delay, df.bits() / 2 * s.objective - df.bits() * c.arrivals.sum(), 1e-9 * (1 + s.delay));
    EXPECT_NEAR(s.delay, evaluate_delay(s.policy, a, df), 1e-9 * (1 + s.delay));
    const oracle::KktReport kkt = oracle::kkt_audit(s, df);
    EXPECT_TRUE(kkt.passes()) << kkt.max_stationarity << " " << kkt.energy_residual;
  }
}

TEST(DelaySolver, CrossDominance) {
  DelayFunction df(1.0);
  std::mt19937_64 rng(37);
  for (int k = 0; k < 50; ++k) {
    const int n = 1 + k % 5;
    const auto c = validation::random_arrival_case(rng, n, df);
    const ArrivalSchedule a(c.arrivals);
    const PatternSolution by_age = solve_arrivals(a, c.energy, c.T, df);
    const PatternSolution by_delay = solve_delay(a, c.energy, c.T, df);
    EXPECT_LE(by_age.age, by_delay.age + 1e-9);
    EXPECT_LE(by_delay.delay, by_age.delay + 1e-9);
  }
}
