#include "aoi/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "aoi/bisection.hpp"

namespace aoi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRelTol = 1e-15;
constexpr int kMaxBracketSteps = 1100;
constexpr int kMaxFlatSteps = 12;

// A maximal run of updates i..last joined by Chain choices. A constrained block
// must end exactly at `target` time units after a_first: either because the
// next update is a Tie, or because it is the last block and the session end is
// tight. `cap` is the time weight of the next block; the equality's multiplier
// may not exceed it plus that block's own multiplier.
struct Block {
  Index first = 0;
  Index last = 0;
  bool constrained = false;
  double target = 0.0;
  double cap = kInf;
};

Choice choice_of(const ChoicePattern& p, Index update) {
  return p.choices[static_cast<std::size_t>(update - 1)];
}

std::vector<Block> blocks_of(const ChoicePattern& p, const Vector& a, const Vector& time_weight,
                             double T) {
  const Index n = p.updates();
  std::vector<Block> blocks;
  Block cur;
  for (Index j = 1; j <= n; ++j) {
    if (j == n || choice_of(p, j) != Choice::Chain) {
      cur.last = j - 1;
      blocks.push_back(cur);
      cur = Block{};
      cur.first = j;
    }
  }
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    Block& blk = blocks[b];
    if (blk.last + 1 < n && choice_of(p, blk.last + 1) == Choice::Tie) {
      const Block& next = blocks[b + 1];
      blk.constrained = true;
      blk.target = a[blk.last + 1] - a[blk.first];
      blk.cap = time_weight.segment(next.first, next.last - next.first + 1).sum();
    } else if (blk.last + 1 == n && p.terminal_tight) {
      blk.constrained = true;
      blk.target = T - a[blk.first];
      blk.cap = kInf;
    }
  }
  return blocks;
}

// g(-coef/lambda), saturating instead of throwing at the numeric extremes.
double delay_for(const DelayFunction& df, double coef, double lambda) {
  const double s = -coef / lambda;
  if (s == 0.0) return kInf;
  if (!std::isfinite(s)) return 0.0;
  try {
    return df.delay_at_slope(s);
  } catch (const DomainError&) {
    return s > -1.0 ? kInf : 0.0;
  }
}

double energy_of(const DelayFunction& df, double d) {
  if (!(d > 0.0)) return kInf;
  if (!std::isfinite(d)) return df.shannon_floor();
  return df.energy(d);
}

// Expand a bracket geometrically around x0 for an increasing fn so that
// fn(lo) <= target <= fn(hi). Returns false if the target is out of range,
// including when fn has flattened out short of it.
template <typename Fn>
bool bracket_log(Fn&& fn, double target, double x0, double& lo, double& hi) {
  lo = hi = x0;
  double last = fn(x0);
  if (last == target) return true;
  const bool up = last < target;
  int flat = 0;
  for (int k = 0; k < kMaxBracketSteps && flat < kMaxFlatSteps; ++k) {
    if (up) {
      lo = hi;
      hi *= 4.0;
      if (!std::isfinite(hi)) return false;
    } else {
      hi = lo;
      lo /= 4.0;
      if (lo == 0.0) return false;
    }
    const double v = fn(up ? hi : lo);
    if (up ? v >= target : v <= target) return true;
    flat = std::abs(v - last) <= 1e-13 * std::max(1.0, std::abs(v)) ? flat + 1 : 0;
    last = v;
  }
  return false;
}

// Sets d over a constrained block so that it sums to blk.target, and returns
// the multiplier mu with d_i = g(-(c_i + mu)/lambda).
std::optional<double> fit_block(const Block& blk, const Vector& c, double lambda,
                                const DelayFunction& df, Vector& d) {
  const Index len = blk.last - blk.first + 1;
  const auto coefs = c.segment(blk.first, len);
  const double cmin = coefs.minCoeff();
  // nu = cmin + mu > 0; the block length decreases in nu.
  auto neg_length = [&](double nu) {
    double sum = 0.0;
    for (Index i = 0; i < len; ++i) sum += delay_for(df, coefs[i] - cmin + nu, lambda);
    return -sum;
  };
  double lo = 0.0;
  double hi = 0.0;
  if (!bracket_log(neg_length, -blk.target, cmin, lo, hi)) return std::nullopt;
  const double nu = numeric::bisect_increasing_log(neg_length, -blk.target, lo, hi, kRelTol);
  for (Index i = 0; i < len; ++i) d[blk.first + i] = delay_for(df, coefs[i] - cmin + nu, lambda);
  return nu - cmin;
}

struct FaceState {
  Vector d;
  Vector mu;  // per update
  bool ok = true;
};

FaceState delays_at(const std::vector<Block>& blocks, const Vector& c, double lambda,
                    const DelayFunction& df) {
  FaceState st;
  st.d.resize(c.size());
  st.mu = Vector::Zero(c.size());
  for (const Block& blk : blocks) {
    if (blk.constrained) {
      auto mu = fit_block(blk, c, lambda, df, st.d);
      if (!mu) {
        st.ok = false;
        return st;
      }
      st.mu.segment(blk.first, blk.last - blk.first + 1).setConstant(*mu);
    } else {
      for (Index i = blk.first; i <= blk.last; ++i) st.d[i] = delay_for(df, c[i], lambda);
    }
  }
  return st;
}

double total_energy(const Vector& d, const DelayFunction& df) {
  double sum = 0.0;
  for (Index i = 0; i < d.size(); ++i) sum += energy_of(df, d[i]);
  return sum;
}

void require_above_floor(Index updates, double energy, const DelayFunction& df) {
  const double floor = static_cast<double>(updates) * df.shannon_floor();
  if (!(energy > floor)) {
    std::ostringstream os;
    os << "energy " << energy << " does not exceed N*2*B*ln2 = " << floor << " for N = " << updates;
    throw EnergyBelowShannonFloor(os.str());
  }
}

}  // namespace

bool ChoicePattern::is_binary() const {
  return !terminal_tight &&
         std::none_of(choices.begin(), choices.end(), [](Choice c) { return c == Choice::Tie; });
}

std::uint64_t ChoicePattern::index() const {
  std::uint64_t idx = 0;
  for (std::size_t k = 0; k < choices.size(); ++k) {
    if (choices[k] == Choice::Chain) idx |= (std::uint64_t{1} << k);
  }
  return idx;
}

ChoicePattern ChoicePattern::from_index(Index updates, std::uint64_t index) {
  if (updates < 1) throw DomainError("a pattern needs at least one update");
  ChoicePattern p;
  p.choices.resize(static_cast<std::size_t>(updates - 1));
  for (std::size_t k = 0; k < p.choices.size(); ++k) {
    p.choices[k] = ((index >> k) & 1U) ? Choice::Chain : Choice::Arrival;
  }
  return p;
}

std::string ChoicePattern::to_string() const {
  std::string s;
  for (Choice c : choices) s += c == Choice::Arrival ? 'A' : (c == Choice::Chain ? 'C' : 'T');
  if (terminal_tight) s += "|T";
  return s;
}

ObjectiveWeights objective_weights(Objective kind, const ArrivalSchedule& arrivals) {
  ObjectiveWeights w;
  if (kind == Objective::Age) {
    w.time = arrivals.gaps();
    w.delay = w.time;
  } else {
    w.time = Vector::Constant(arrivals.size(), 2.0);
    w.delay = Vector::Ones(arrivals.size());
  }
  return w;
}

Vector chain_coefficients(const ChoicePattern& pattern, const ObjectiveWeights& weights) {
  const Index n = pattern.updates();
  if (weights.time.size() != n || weights.delay.size() != n) {
    throw DomainError("pattern length does not match the number of updates");
  }
  Vector c(n);
  double carried = 0.0;  // time weights of later updates chained to the current one
  for (Index i = n - 1; i >= 0; --i) {
    c[i] = weights.delay[i] + carried;
    const bool chained_from_prev = i > 0 && choice_of(pattern, i) == Choice::Chain;
    carried = chained_from_prev ? carried + weights.time[i] : 0.0;
  }
  return c;
}

Vector pattern_coefficients(const ChoicePattern& pattern, const ArrivalSchedule& arrivals) {
  return chain_coefficients(pattern, objective_weights(Objective::Age, arrivals));
}

Vector delay_coefficients(const ChoicePattern& pattern, Index updates) {
  ObjectiveWeights w{Vector::Constant(updates, 2.0), Vector::Ones(updates)};
  return chain_coefficients(pattern, w);
}

double solve_lambda(const Vector& c, double energy, const DelayFunction& df) {
  if (c.size() == 0) throw DomainError("solve_lambda needs at least one coefficient");
  if (!(c.array() > 0.0).all()) throw DomainError("pattern coefficients must be positive");
  require_above_floor(c.size(), energy, df);
  auto neg_energy = [&](double lambda) {
    double sum = 0.0;
    for (Index i = 0; i < c.size(); ++i) sum += energy_of(df, delay_for(df, c[i], lambda));
    return -sum;
  };
  const double start = c.mean() / -df.slope(df.bits());
  double lo = 0.0;
  double hi = 0.0;
  if (!bracket_log(neg_energy, -energy, start, lo, hi)) {
    throw EnergyBelowShannonFloor("energy budget cannot be met by any multiplier");
  }
  return numeric::bisect_increasing_log(neg_energy, -energy, lo, hi, kRelTol);
}

PatternOutcome solve_pattern(const ChoicePattern& pattern, const ArrivalSchedule& arrivals,
                             double energy, double T, const DelayFunction& df, Objective kind,
                             const SolverOptions& opts) {
  const Index n = arrivals.size();
  if (pattern.updates() != n) throw DomainError("pattern length does not match the number of arrivals");
  require_above_floor(n, energy, df);

  const Vector& a = arrivals.times();
  const ObjectiveWeights w = objective_weights(kind, arrivals);
  const Vector base = chain_coefficients(pattern, w);
  const std::vector<Block> blocks = blocks_of(pattern, a, w.time, T);

  for (const Block& blk : blocks) {
    if (blk.constrained && !(blk.target > 0.0)) return Inconsistent{"boundary leaves no room for service"};
  }

  double lambda = 0.0;
  if (pattern.is_binary()) {
    lambda = solve_lambda(base, energy, df);
  } else {
    auto neg_energy = [&](double lam) {
      FaceState st = delays_at(blocks, base, lam, df);
      return st.ok ? -total_energy(st.d, df) : std::numeric_limits<double>::quiet_NaN();
    };
    const double start = base.mean() / -df.slope(df.bits());
    double lo = 0.0;
    double hi = 0.0;
    bool bracketed = false;
    try {
      bracketed = bracket_log(neg_energy, -energy, start, lo, hi);
    } catch (const Error&) {
      bracketed = false;
    }
    if (!bracketed) return Inconsistent{"energy budget unreachable on this boundary face"};
    lambda = numeric::bisect_increasing_log(neg_energy, -energy, lo, hi, kRelTol);
  }

  FaceState st = delays_at(blocks, base, lambda, df);
  if (!st.ok || !st.d.allFinite() || !(st.d.array() > 0.0).all()) {
    return Inconsistent{"delays could not be fitted to the boundary constraints"};
  }

  Vector t(n);
  t[0] = a[0];
  for (Index j = 1; j < n; ++j) t[j] = choice_of(pattern, j) == Choice::Chain ? t[j - 1] + st.d[j - 1] : a[j];

  const double tol = opts.consistency_tol;
  for (Index j = 1; j < n; ++j) {
    const double reach = t[j - 1] + st.d[j - 1];
    const Choice ch = choice_of(pattern, j);
    std::ostringstream os;
    if (ch == Choice::Arrival && reach > a[j] + tol) {
      os << "update " << (j + 1) << ": previous reception " << reach << " is after arrival " << a[j];
      return Inconsistent{os.str()};
    }
    if (ch == Choice::Chain && reach < a[j] - tol) {
      os << "update " << (j + 1) << ": previous reception " << reach << " is before arrival " << a[j];
      return Inconsistent{os.str()};
    }
  }
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const Block& blk = blocks[b];
    if (!blk.constrained) continue;
    const double mu = st.mu[blk.first];
    // Flow into the next block's first time: its weights plus its own boundary multiplier.
    const double cap = std::isfinite(blk.cap) ? blk.cap + st.mu[blocks[b + 1].first] : kInf;
    const double scale = std::max(1.0, std::isfinite(cap) ? cap : std::abs(mu));
    if (mu < -tol * scale || (std::isfinite(cap) && mu > cap + tol * scale)) {
      std::ostringstream os;
      os << "boundary multiplier " << mu << " outside [0, " << cap << "] for updates "
         << (blk.first + 1) << ".." << (blk.last + 1);
      return Inconsistent{os.str()};
    }
  }
  if (!opts.allow_late_reception && t[n - 1] + st.d[n - 1] > T + tol) {
    std::ostringstream os;
    os << "last reception " << t[n - 1] + st.d[n - 1] << " is after the session end " << T;
    return Inconsistent{os.str()};
  }

  PatternSolution sol;
  sol.kind = kind;
  sol.pattern = pattern;
  sol.rank = pattern.is_binary() ? pattern.index() : 0;
  sol.arrivals = a;
  sol.energy_budget = energy;
  sol.session_length = T;
  sol.c = base + st.mu;
  sol.boundary_multipliers = st.mu;
  sol.lambda = lambda;
  sol.policy = UpdatePolicy(std::move(t), std::move(st.d));
  sol.objective = w.time.dot(sol.policy.t) + w.delay.dot(sol.policy.d);
  try {
    sol.age = evaluate_age(sol.policy, SessionConfig(T), a, opts.allow_late_reception);
    sol.delay = evaluate_delay(sol.policy, arrivals, df);
  } catch (const PreconditionError& e) {
    return Inconsistent{e.what()};
  }
  return sol;
}

PatternSolution solve_schedule(Objective kind, const ArrivalSchedule& arrivals, double energy,
                               double T, const DelayFunction& df, const SolverOptions& opts) {
  const Index n = arrivals.size();
  [[maybe_unused]] const SessionConfig session(T);
  if (arrivals[n - 1] > T) throw DomainError("last arrival is after the session end");
  if (n > 40) throw DomainError("pattern enumeration is limited to N <= 40 arrivals");
  require_above_floor(n, energy, df);

  auto cost = [kind](const PatternSolution& s) { return kind == Objective::Age ? s.age : s.delay; };

  std::optional<PatternSolution> best;
  const std::uint64_t count = std::uint64_t{1} << (n - 1);
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    PatternOutcome out = solve_pattern(ChoicePattern::from_index(n, idx), arrivals, energy, T, df, kind, opts);
    if (auto* sol = std::get_if<PatternSolution>(&out)) {
      if (!best || cost(*sol) < cost(*best) - 1e-12 * std::max(1.0, std::abs(cost(*best)))) {
        best = std::move(*sol);
      }
    }
  }
  if (best) return *best;

  // Boundary faces: choose k equality slots among the N-1 boundaries (plus the
  // session end when late reception is not allowed), binary choices elsewhere.
  const Index boundary_slots = n - 1;
  const Index slots = boundary_slots + (opts.allow_late_reception ? 0 : 1);
  std::uint64_t rank = count;
  for (Index k = 1; k <= slots; ++k) {
    std::vector<Index> pick(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) pick[static_cast<std::size_t>(i)] = i;
    while (true) {
      ChoicePattern face;
      face.choices.assign(static_cast<std::size_t>(boundary_slots), Choice::Arrival);
      std::vector<std::size_t> free_slots;
      std::vector<bool> taken(static_cast<std::size_t>(boundary_slots), false);
      for (Index s : pick) {
        if (s == boundary_slots) {
          face.terminal_tight = true;
        } else {
          taken[static_cast<std::size_t>(s)] = true;
          face.choices[static_cast<std::size_t>(s)] = Choice::Tie;
        }
      }
      for (std::size_t s = 0; s < taken.size(); ++s) {
        if (!taken[s]) free_slots.push_back(s);
      }
      const std::uint64_t combos = std::uint64_t{1} << free_slots.size();
      for (std::uint64_t mask = 0; mask < combos; ++mask, ++rank) {
        for (std::size_t q = 0; q < free_slots.size(); ++q) {
          face.choices[free_slots[q]] = ((mask >> q) & 1U) ? Choice::Chain : Choice::Arrival;
        }
        PatternOutcome out = solve_pattern(face, arrivals, energy, T, df, kind, opts);
        if (auto* sol = std::get_if<PatternSolution>(&out)) {
          sol->rank = rank;
          return std::move(*sol);
        }
      }
      // next combination
      Index i = k - 1;
      while (i >= 0 && pick[static_cast<std::size_t>(i)] == slots - k + i) --i;
      if (i < 0) break;
      ++pick[static_cast<std::size_t>(i)];
      for (Index j = i + 1; j < k; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  std::ostringstream os;
  os << "no consistent choice pattern: the " << n << " arrivals cannot all be served by T = " << T
     << " with energy " << energy;
  throw Infeasible(os.str());
}

}  // namespace aoi
