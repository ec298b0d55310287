#include "aoi/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace aoi {

namespace {

constexpr double kStructuralTol = 1e-9;

std::string describe(const char* what, Index i, double value) {
  std::ostringstream os;
  os << what << " at update " << (i + 1) << " (value " << value << ")";
  return os.str();
}

// Service ordering, t >= 0, d > 0, and u_i <= t_i with u nondecreasing.
void require_evaluable(const UpdatePolicy& policy, double T, const Vector& stamps,
                       bool allow_late_reception) {
  const Index n = policy.size();
  if (stamps.size() != n) throw PreconditionError("timestamps must have one entry per update");
  const double tol = kStructuralTol * std::max(1.0, T);
  for (Index i = 0; i < n; ++i) {
    if (!(policy.d[i] > 0.0)) throw PreconditionError(describe("non-positive delay", i, policy.d[i]));
    if (policy.t[i] < -tol) throw PreconditionError(describe("negative transmit time", i, policy.t[i]));
    const double next = (i + 1 < n) ? policy.t[i + 1] : T;
    if (i + 1 < n || !allow_late_reception) {
      if (policy.t[i] + policy.d[i] > next + tol) {
        throw PreconditionError(describe("service overlap", i, policy.t[i] + policy.d[i] - next));
      }
    }
    if (stamps[i] > policy.t[i] + tol) {
      throw PreconditionError(describe("timestamp after transmit time", i, stamps[i]));
    }
    if (i > 0 && stamps[i] < stamps[i - 1]) {
      throw PreconditionError(describe("timestamps not ordered", i, stamps[i]));
    }
  }
}

}  // namespace

EnergyProfile::EnergyProfile(std::vector<EnergyArrival> arrivals) : arrivals_(std::move(arrivals)) {
  if (arrivals_.empty()) throw DomainError("energy profile needs at least one arrival");
  if (arrivals_.front().time != 0.0) throw DomainError("first energy arrival must be at time 0");
  for (std::size_t j = 0; j < arrivals_.size(); ++j) {
    if (!(arrivals_[j].amount > 0.0) || !std::isfinite(arrivals_[j].amount)) {
      std::ostringstream os;
      os << "energy amount E_" << (j + 1) << " must be positive and finite";
      throw DomainError(os.str());
    }
    if (j > 0 && !(arrivals_[j].time > arrivals_[j - 1].time)) {
      std::ostringstream os;
      os << "energy arrival times must strictly increase (s_" << (j + 1) << ")";
      throw DomainError(os.str());
    }
  }
}

EnergyProfile EnergyProfile::single(double amount) { return EnergyProfile({{0.0, amount}}); }

double EnergyProfile::available(double t) const {
  if (!(t >= 0.0)) throw DomainError("energy_available: time must be nonnegative");
  double sum = 0.0;
  for (const auto& a : arrivals_) {
    if (a.time > t) break;
    sum += a.amount;
  }
  return sum;
}

double EnergyProfile::total() const {
  double sum = 0.0;
  for (const auto& a : arrivals_) sum += a.amount;
  return sum;
}

SessionConfig::SessionConfig(double length) : length_(length) {
  if (!(length > 0.0) || !std::isfinite(length)) throw DomainError("session length T must be positive");
}

UpdatePolicy::UpdatePolicy(Vector times, Vector delays) : t(std::move(times)), d(std::move(delays)) {
  if (t.size() != d.size()) throw DomainError("policy needs as many delays as transmit times");
}

ArrivalSchedule::ArrivalSchedule(Vector times) : a_(std::move(times)) {
  if (a_.size() == 0) throw DomainError("arrival schedule must contain at least one arrival");
  double prev = 0.0;
  for (Index i = 0; i < a_.size(); ++i) {
    if (!(a_[i] > prev) || !std::isfinite(a_[i])) {
      std::ostringstream os;
      os << "arrival times must satisfy 0 < a_1 < a_2 < ... (violated at a_" << (i + 1) << ")";
      throw DomainError(os.str());
    }
    prev = a_[i];
  }
}

Vector ArrivalSchedule::gaps() const {
  Vector w(a_.size());
  double prev = 0.0;
  for (Index i = 0; i < a_.size(); ++i) {
    w[i] = a_[i] - prev;
    prev = a_[i];
  }
  return w;
}

double AgeTrajectory::area() const {
  double sum = 0.0;
  for (Index k = 1; k < vertices.rows(); ++k) {
    sum += (vertices(k, 0) - vertices(k - 1, 0)) * (vertices(k, 1) + vertices(k - 1, 1)) / 2.0;
  }
  return sum;
}

double energy_available(const EnergyProfile& profile, double t) { return profile.available(t); }

FeasibilityReport check_feasibility(const UpdatePolicy& policy, const EnergyProfile& profile,
                                    const SessionConfig& cfg, const DelayFunction& df,
                                    const ArrivalSchedule* arrivals,
                                    const FeasibilityOptions& opts) {
  const Index n = policy.size();
  const double T = cfg.length();
  FeasibilityReport report;
  report.energy_slack = Vector::Zero(n);
  report.service_slack = Vector::Zero(n);

  auto flag = [&](const char* name, Index i, double slack, double scale) {
    if (slack < -opts.tolerance * std::max(1.0, scale)) report.violations.push_back({name, i, slack});
  };

  double spent = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (!(policy.d[i] > 0.0)) {
      report.violations.push_back({"positive_delay", i, policy.d[i]});
      report.energy_slack[i] = -std::numeric_limits<double>::infinity();
    } else {
      spent += df.energy(policy.d[i]);
      const double harvested = policy.t[i] >= 0.0 ? profile.available(policy.t[i]) : 0.0;
      report.energy_slack[i] = harvested - spent;
      flag("energy_causality", i, report.energy_slack[i], harvested);
    }
    if (policy.t[i] < 0.0) report.violations.push_back({"nonnegative_time", i, policy.t[i]});

    const double next = (i + 1 < n) ? policy.t[i + 1] : T;
    report.service_slack[i] = next - (policy.t[i] + policy.d[i]);
    if (i + 1 < n || !opts.allow_late_reception) {
      flag(i + 1 < n ? "service_time" : "session_end", i, report.service_slack[i], T);
    }
  }

  if (arrivals != nullptr) {
    if (arrivals->size() != n) {
      report.violations.push_back({"arrival_count", 0, double(arrivals->size() - n)});
    } else {
      report.data_slack = policy.t - arrivals->times();
      for (Index i = 0; i < n; ++i) flag("data_causality", i, report.data_slack[i], T);
    }
  }
  return report;
}

double evaluate_age(const UpdatePolicy& policy, const SessionConfig& cfg, const Vector& timestamps,
                    bool allow_late_reception) {
  require_evaluable(policy, cfg.length(), timestamps, allow_late_reception);
  return age_area(policy.t, policy.d, timestamps, cfg.length());
}

double evaluate_delay(const UpdatePolicy& policy, const ArrivalSchedule& arrivals,
                      const DelayFunction& df) {
  if (arrivals.size() != policy.size()) throw PreconditionError("one arrival per update required");
  const double horizon = policy.size() ? policy.t.maxCoeff() + policy.d.maxCoeff() : 0.0;
  require_evaluable(policy, horizon, arrivals.times(), true);
  return delay_area(policy.t, policy.d, arrivals.times(), df.bits());
}

AgeTrajectory age_trajectory(const UpdatePolicy& policy, const SessionConfig& cfg,
                             const Vector& timestamps) {
  const double T = cfg.length();
  require_evaluable(policy, T, timestamps, false);
  const Index n = policy.size();
  std::vector<std::pair<double, double>> pts;
  pts.reserve(static_cast<std::size_t>(2 * n + 2));
  pts.emplace_back(0.0, 0.0);
  double stamp = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double r = policy.t[i] + policy.d[i];
    pts.emplace_back(r, r - stamp);
    stamp = timestamps[i];
    pts.emplace_back(r, r - stamp);
  }
  if (pts.back().first < T) pts.emplace_back(T, T - stamp);

  AgeTrajectory traj;
  traj.vertices.resize(static_cast<Index>(pts.size()), 2);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    traj.vertices(static_cast<Index>(k), 0) = pts[k].first;
    traj.vertices(static_cast<Index>(k), 1) = pts[k].second;
  }
  return traj;
}

}  // namespace aoi
