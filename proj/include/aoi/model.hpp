#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "aoi/delay_function.hpp"
#include "aoi/errors.hpp"

namespace aoi {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct EnergyArrival {
  double time;
  double amount;
};

/// Harvested energy packets (s_j, E_j) with s_1 = 0 and strictly increasing s_j.
class EnergyProfile {
 public:
  explicit EnergyProfile(std::vector<EnergyArrival> arrivals);

  /// All energy available at the start of the session.
  static EnergyProfile single(double amount);

  /// Cumulative harvest E(t) = sum of E_j with s_j <= t.
  double available(double t) const;
  double total() const;
  bool single_arrival() const { return arrivals_.size() == 1; }
  const std::vector<EnergyArrival>& arrivals() const { return arrivals_; }

 private:
  std::vector<EnergyArrival> arrivals_;
};

class SessionConfig {
 public:
  explicit SessionConfig(double length);
  double length() const { return length_; }

 private:
  double length_;
};

/// Transmit times t and service delays d of N updates.
struct UpdatePolicy {
  Vector t;
  Vector d;

  UpdatePolicy() = default;
  UpdatePolicy(Vector times, Vector delays);

  Index size() const { return t.size(); }
};

/// External measurement arrival times 0 < a_1 < ... < a_N.
class ArrivalSchedule {
 public:
  explicit ArrivalSchedule(Vector times);

  const Vector& times() const { return a_; }
  Index size() const { return a_.size(); }
  double operator[](Index i) const { return a_[i]; }

  /// w_i = a_i - a_{i-1} with a_0 = 0.
  Vector gaps() const;

 private:
  Vector a_;
};

/// Vertices (time, age) of the piecewise-linear age curve on [0, T].
struct AgeTrajectory {
  Eigen::Matrix<double, Eigen::Dynamic, 2> vertices;

  /// Trapezoid-rule integral of the curve; exact since the curve is piecewise linear.
  double area() const;
};

// ---------------------------------------------------------------------------
// Area formulas on raw vectors. No validation.

/// A_T = sum_i [ (r_i - u_{i-1})^2 - (r_i - u_i)^2 ] / 2 + (T - u_N)^2 / 2, r_i = t_i + d_i, u_0 = 0.
template <typename DT, typename DD, typename DU>
typename DT::Scalar age_area(const Eigen::MatrixBase<DT>& t, const Eigen::MatrixBase<DD>& d,
                             const Eigen::MatrixBase<DU>& stamps, typename DT::Scalar T) {
  using Scalar = typename DT::Scalar;
  Scalar area(0);
  Scalar prev(0);
  for (Index i = 0; i < t.size(); ++i) {
    const Scalar r = t[i] + d[i];
    area += ((r - prev) * (r - prev) - (r - stamps[i]) * (r - stamps[i])) / Scalar(2);
    prev = stamps[i];
  }
  return area + (T - prev) * (T - prev) / Scalar(2);
}

/// Controlled-measurement form of the area, u_i = t_i:
/// [ sum_i ((t_i + d_i - t_{i-1})^2 - d_i^2) + (T - t_N)^2 ] / 2.
template <typename DT, typename DD>
typename DT::Scalar controlled_age_area(const Eigen::MatrixBase<DT>& t,
                                        const Eigen::MatrixBase<DD>& d,
                                        typename DT::Scalar T) {
  using Scalar = typename DT::Scalar;
  Scalar sum(0);
  Scalar prev(0);
  for (Index i = 0; i < t.size(); ++i) {
    const Scalar x = t[i] + d[i] - prev;
    sum += x * x - d[i] * d[i];
    prev = t[i];
  }
  return (sum + (T - prev) * (T - prev)) / Scalar(2);
}

/// D_T = sum_i B (t_i - a_i) + B d_i / 2.
template <typename DT, typename DD, typename DA>
typename DT::Scalar delay_area(const Eigen::MatrixBase<DT>& t, const Eigen::MatrixBase<DD>& d,
                               const Eigen::MatrixBase<DA>& a, typename DT::Scalar bits) {
  using Scalar = typename DT::Scalar;
  return bits * ((t - a).sum() + d.sum() / Scalar(2));
}

// ---------------------------------------------------------------------------
// Validated operations.

double energy_available(const EnergyProfile& profile, double t);

struct Violation {
  std::string constraint;  // "energy_causality", "service_time", "data_causality", ...
  Index index;             // zero-based update index
  double slack;            // negative when violated
};

/// Per-constraint slacks; a constraint holds when its slack >= -tolerance.
struct FeasibilityReport {
  Vector energy_slack;   // E(t_k) - sum_{i<=k} f(d_i)
  Vector service_slack;  // t_{i+1} - (t_i + d_i), with t_{N+1} = T
  Vector data_slack;     // t_i - a_i; empty without arrivals
  std::vector<Violation> violations;

  bool feasible() const { return violations.empty(); }
};

struct FeasibilityOptions {
  double tolerance = 1e-9;
  bool allow_late_reception = false;
};

FeasibilityReport check_feasibility(const UpdatePolicy& policy, const EnergyProfile& profile,
                                    const SessionConfig& cfg, const DelayFunction& df,
                                    const ArrivalSchedule* arrivals = nullptr,
                                    const FeasibilityOptions& opts = {});

/// True area under the age curve. `timestamps` are u_i = t_i for controlled
/// measurements and u_i = a_i for arriving ones. With allow_late_reception the
/// trapezoid sum is extended algebraically past T.
double evaluate_age(const UpdatePolicy& policy, const SessionConfig& cfg, const Vector& timestamps,
                    bool allow_late_reception = false);

double evaluate_delay(const UpdatePolicy& policy, const ArrivalSchedule& arrivals,
                      const DelayFunction& df);

AgeTrajectory age_trajectory(const UpdatePolicy& policy, const SessionConfig& cfg,
                             const Vector& timestamps);

}  // namespace aoi
