// Command-line front end: aoi_sched <mode> <instance.json|-> [--out DIR] ...

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>

#include "aoi/cli.hpp"

namespace {

std::string read_all(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  std::ifstream is(path, std::ios::binary);
  if (!is) throw aoi::cli::InputError("cannot read instance file '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age-of-information scheduling for an energy-harvesting source"};
  app.require_subcommand(1);

  std::string instance_path;
  std::string out_dir;
  aoi::cli::Overrides overrides;
  double tol = 0.0;
  double grid_delta = 0.0;
  std::uint64_t node_budget = 0;

  struct Entry {
    const char* name;
    const char* help;
    std::optional<aoi::cli::Mode> mode;
  };
  const Entry entries[] = {
      {"controlled", "equal-delay policy for N updates (or best N up to N_max)", aoi::cli::Mode::Controlled},
      {"arrivals", "age-minimal schedule for externally arriving measurements", aoi::cli::Mode::Arrivals},
      {"delay", "delay-minimal schedule, compared against the age-minimal one", aoi::cli::Mode::Delay},
      {"sweep", "age versus number of updates, N = 1..N_max", aoi::cli::Mode::Sweep},
      {"validate", "compare solvers against brute-force grid search", aoi::cli::Mode::Validate},
      {"run", "dispatch on the instance's \"mode\" field", std::nullopt},
  };
  std::vector<std::pair<CLI::App*, std::optional<aoi::cli::Mode>>> subs;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("instance", instance_path, "instance JSON file, or - for stdin")->required();
    sub->add_option("--out,-o", out_dir, "output directory (default: $AOI_OUT_DIR or ./aoi_out)");
    sub->add_option("--tol", tol, "bisection tolerance on function arguments");
    sub->add_option("--grid-delta", grid_delta, "grid step for the brute-force oracle");
    sub->add_option("--node-budget", node_budget, "maximum grid evaluations");
    sub->add_flag("--allow-late-reception", overrides.allow_late_reception,
                  "drop the t_N + d_N <= T constraint");
    subs.emplace_back(sub, e.mode);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : aoi::cli::exit_code::input_error;
  }

  std::optional<aoi::cli::Mode> forced;
  for (const auto& [sub, mode] : subs) {
    if (sub->parsed()) {
      forced = mode;
      if (sub->count("--tol")) overrides.tol = tol;
      if (sub->count("--grid-delta")) overrides.grid_delta = grid_delta;
      if (sub->count("--node-budget")) overrides.node_budget = node_budget;
    }
  }
  if (out_dir.empty()) {
    const char* env = std::getenv("AOI_OUT_DIR");
    out_dir = (env && *env) ? env : "aoi_out";
  }

  try {
    aoi::cli::ProblemInstance instance = aoi::cli::parse_instance(read_all(instance_path), forced);
    aoi::cli::apply(instance, overrides);
    const int code = aoi::cli::run(instance, out_dir, std::cerr);
    if (code == aoi::cli::exit_code::ok) std::cout << "wrote " << out_dir << "\n";
    return code;
  } catch (const aoi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return aoi::cli::exit_code::input_error;
  }
}
