#pragma once

#include <cmath>
#include <limits>

namespace aoi::numeric {

/// Root of a nondecreasing function on a bracket [lo, hi] with
/// fn(lo) <= target <= fn(hi). Plain bisection down to `tol` (absolute, on the
/// argument) or until the midpoint is no longer representable, followed by one
/// linear interpolation inside the final bracket.
template <typename Scalar, typename Fn>
Scalar bisect_increasing(Fn&& fn, Scalar target, Scalar lo, Scalar hi, Scalar tol,
                         int max_iter = 2000) {
  Scalar flo = fn(lo) - target;
  Scalar fhi = fn(hi) - target;
  if (flo == Scalar(0)) return lo;
  if (fhi == Scalar(0)) return hi;
  for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
    const Scalar mid = lo + (hi - lo) / Scalar(2);
    if (mid <= lo || mid >= hi) break;
    const Scalar fm = fn(mid) - target;
    if (fm == Scalar(0)) return mid;
    if (fm < Scalar(0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  if (std::isfinite(flo) && std::isfinite(fhi) && fhi > flo) {
    const Scalar w = -flo / (fhi - flo);
    return lo + w * (hi - lo);
  }
  return lo + (hi - lo) / Scalar(2);
}

/// Same as bisect_increasing but bisects in log space over a positive bracket,
/// stopping at relative width `rel_tol`. Used for multipliers whose scale is
/// unknown a priori.
template <typename Scalar, typename Fn>
Scalar bisect_increasing_log(Fn&& fn, Scalar target, Scalar lo, Scalar hi, Scalar rel_tol,
                             int max_iter = 2000) {
  Scalar flo = fn(lo) - target;
  Scalar fhi = fn(hi) - target;
  if (flo == Scalar(0)) return lo;
  if (fhi == Scalar(0)) return hi;
  for (int it = 0; it < max_iter && hi > lo * (Scalar(1) + rel_tol); ++it) {
    Scalar mid = std::sqrt(lo) * std::sqrt(hi);
    if (!(mid > lo && mid < hi)) mid = lo + (hi - lo) / Scalar(2);
    if (mid <= lo || mid >= hi) break;
    const Scalar fm = fn(mid) - target;
    if (fm == Scalar(0)) return mid;
    if (fm < Scalar(0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  if (std::isfinite(flo) && std::isfinite(fhi) && fhi > flo) {
    const Scalar w = -flo / (fhi - flo);
    return lo + w * (hi - lo);
  }
  return lo + (hi - lo) / Scalar(2);
}

}  // namespace aoi::numeric
