#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "aoi/model.hpp"

namespace aoi::fixtures {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random policy with n updates satisfying the service constraints in [0, T],
/// with transmit times at or after the given timestamps when provided.
inline UpdatePolicy random_policy(std::mt19937_64& rng, Index n, double T,
                                  const Vector* stamps = nullptr) {
  Vector t(n), d(n);
  double cursor = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double earliest = std::max(cursor, stamps ? (*stamps)[i] : 0.0);
    const double room = (T - earliest) / static_cast<double>(n - i);
    t[i] = earliest + uniform(rng, 0.0, 0.5) * room;
    d[i] = uniform(rng, 0.05, 0.5) * room;
    cursor = t[i] + d[i];
  }
  return UpdatePolicy(t, d);
}

/// Strictly increasing arrival times in (0, span].
inline Vector random_arrivals(std::mt19937_64& rng, Index n, double span) {
  std::vector<double> a(static_cast<std::size_t>(n));
  for (auto& v : a) v = uniform(rng, 0.02, 1.0) * span;
  std::sort(a.begin(), a.end());
  for (std::size_t i = 1; i < a.size(); ++i) a[i] = std::max(a[i], a[i - 1] + 1e-3 * span);
  return Eigen::Map<Vector>(a.data(), n);
}

}  // namespace aoi::fixtures
