#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "aoi/bisection.hpp"
#include "aoi/errors.hpp"

namespace aoi {

/// Energy needed to push a B-bit update through a unit-bandwidth AWGN link in
/// d time units: f(d) = d (2^{2B/d} - 1). Strictly decreasing and convex on
/// d > 0, with f(d) -> 2 B ln2 as d -> inf and f(d) -> inf as d -> 0+.
///
/// Inverses of f and of f' have no closed form; both are computed by bracketed
/// bisection to an absolute argument tolerance.
template <typename Scalar>
class BasicDelayFunction {
 public:
  explicit BasicDelayFunction(Scalar bits, Scalar bisection_tol = Scalar(1e-10))
      : bits_(bits), tol_(bisection_tol) {
    if (!(bits > Scalar(0)) || !std::isfinite(bits)) {
      throw DomainError("packet size B must be positive and finite");
    }
    if (!(bisection_tol > Scalar(0))) {
      throw DomainError("bisection tolerance must be positive");
    }
  }

  Scalar bits() const { return bits_; }
  Scalar tolerance() const { return tol_; }

  /// Infimum of f over d > 0: 2 B ln2.
  Scalar shannon_floor() const { return rate_constant(); }

  /// f(d).
  Scalar energy(Scalar d) const {
    require_positive(d, "delay");
    return d * std::expm1(rate_constant() / d);
  }

  Scalar operator()(Scalar d) const { return energy(d); }

  /// f'(d) = 2^{2B/d} - 1 - (2 B ln2 / d) 2^{2B/d}; negative for every d > 0.
  Scalar slope(Scalar d) const {
    require_positive(d, "delay");
    const Scalar u = rate_constant() / d;
    if (u < Scalar(1e-3)) {
      // expm1(u) - u e^u = -sum_{n>=2} (n-1) u^n / n!
      Scalar term = u * u / Scalar(2);
      Scalar sum = term;
      for (int n = 3; n <= 9; ++n) {
        term *= u / Scalar(n);
        sum += Scalar(n - 1) * term;
      }
      return -sum;
    }
    if (u > std::log(std::numeric_limits<Scalar>::max()) - Scalar(8)) {
      return -std::numeric_limits<Scalar>::infinity();
    }
    return std::expm1(u) - u * std::exp(u);
  }

  /// f^{-1}(e): the unique delay whose energy is e.
  Scalar delay(Scalar e) const {
    if (!(e > shannon_floor())) {
      std::ostringstream os;
      os << "energy " << e << " is not above the Shannon floor 2*B*ln2 = " << shannon_floor();
      throw EnergyBelowShannonFloor(os.str());
    }
    // Bracket by doubling outward from d = B.
    Scalar lo = bits_;
    Scalar hi = bits_;
    int guard = 0;
    if (energy(lo) > e) {
      while (energy(hi) > e) {
        lo = hi;
        hi *= Scalar(2);
        if (++guard > 4000 || !std::isfinite(hi)) {
          throw EnergyBelowShannonFloor("energy numerically indistinguishable from the Shannon floor");
        }
      }
    } else {
      while (energy(lo) < e) {
        hi = lo;
        lo /= Scalar(2);
        if (++guard > 4000 || lo == Scalar(0)) throw DomainError("energy too large to invert");
      }
    }
    // -f is increasing.
    return numeric::bisect_increasing([this](Scalar d) { return -energy_or_inf(d); }, -e, lo, hi,
                                      tol_);
  }

  /// g(s) = (f')^{-1}(s) for s < 0.
  Scalar delay_at_slope(Scalar s) const {
    if (!(s < Scalar(0)) || std::isnan(s)) {
      std::ostringstream os;
      os << "slope " << s << " is outside the range of f' (must be negative)";
      throw DomainError(os.str());
    }
    Scalar lo = bits_;
    Scalar hi = bits_;
    int guard = 0;
    if (slope(lo) < s) {
      while (slope(hi) < s) {
        lo = hi;
        hi *= Scalar(2);
        if (++guard > 4000 || !std::isfinite(hi)) throw DomainError("slope too close to zero");
      }
    } else {
      while (slope(lo) > s) {
        hi = lo;
        lo /= Scalar(2);
        if (++guard > 4000 || lo == Scalar(0)) throw DomainError("slope too steep to invert");
      }
    }
    return numeric::bisect_increasing([this](Scalar d) { return slope(d); }, s, lo, hi, tol_);
  }

  /// h(s) = f(g(s)).
  Scalar energy_at_slope(Scalar s) const { return energy(delay_at_slope(s)); }

 private:
  Scalar rate_constant() const { return Scalar(2) * bits_ * std::numbers::ln2_v<Scalar>; }

  Scalar energy_or_inf(Scalar d) const {
    const Scalar v = d * std::expm1(rate_constant() / d);
    return std::isnan(v) ? std::numeric_limits<Scalar>::infinity() : v;
  }

  static void require_positive(Scalar d, const char* what) {
    if (!(d > Scalar(0))) {
      std::ostringstream os;
      os << what << " must be positive, got " << d;
      throw DomainError(os.str());
    }
  }

  Scalar bits_;
  Scalar tol_;
};

using DelayFunction = BasicDelayFunction<double>;

}  // namespace aoi
