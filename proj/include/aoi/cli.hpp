#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aoi/errors.hpp"
#include "aoi/model.hpp"

namespace aoi::cli {

enum class Mode { Controlled, Arrivals, Delay, Sweep, Validate };

std::string_view mode_name(Mode m);
std::optional<Mode> parse_mode(std::string_view name);

/// Malformed or invalid instance; `what()` names the line or field.
class InputError : public Error {
 public:
  using Error::Error;
};

struct ProblemInstance {
  Mode mode = Mode::Controlled;
  double T = 0.0;
  double B = 1.0;
  std::vector<EnergyArrival> energy;
  std::optional<std::vector<double>> arrivals;
  std::optional<int> updates;      // "N"
  std::optional<int> max_updates;  // "N_max"
  double bisection_tol = 1e-10;
  double consistency_tol = 1e-9;
  bool allow_late_reception = false;
  bool prune_stale = false;
  // validate
  std::uint64_t seed = 1;
  int count = 5;
  double grid_delta = 0.01;
  std::uint64_t node_budget = 100'000'000;
};

/// Parse and validate a JSON instance. `forced` is the subcommand mode; it
/// must agree with the file's "mode" field when both are present.
ProblemInstance parse_instance(std::string_view text, std::optional<Mode> forced = std::nullopt);

/// Canonical JSON for an instance (fixed key order).
std::string dump_instance(const ProblemInstance& instance);

struct Overrides {
  std::optional<double> tol;
  std::optional<double> grid_delta;
  std::optional<std::uint64_t> node_budget;
  bool allow_late_reception = false;
};

void apply(ProblemInstance& instance, const Overrides& overrides);

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int input_error = 1;
inline constexpr int infeasible = 2;
inline constexpr int validation_failed = 3;
}  // namespace exit_code

/// Solve `instance` and write artifacts into `out_dir`:
///   instance.json    canonical copy of the input
///   solution.json    policy, age, delay, lambda, pattern, residuals (or the infeasibility)
///   trajectory.csv   time,age breakpoints of the age curve
///   sweep.csv        N,feasible,d,age (sweep and controlled-without-N)
///   validation.json  solver-vs-grid gaps (validate)
/// Diagnostics go to `err`. Returns one of exit_code::*.
int run(const ProblemInstance& instance, const std::filesystem::path& out_dir, std::ostream& err);

}  // namespace aoi::cli
