#include "aoi/cli.hpp"

#include <fstream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "aoi/arrivals.hpp"
#include "aoi/controlled.hpp"
#include "aoi/delay_solver.hpp"
#include "aoi/oracle.hpp"
#include "aoi/validation.hpp"

namespace aoi::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& msg) {
  throw InputError("field '" + field + "': " + msg);
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) field_error(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) field_error(field, "expected a finite number");
  return v;
}

double positive(const json& j, const std::string& field) {
  const double v = number(j, field);
  if (!(v > 0.0)) field_error(field, "must be positive");
  return v;
}

int count_field(const json& j, const std::string& field, int min) {
  if (!j.is_number_integer()) field_error(field, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < min || v > 1'000'000) field_error(field, "must be an integer >= " + std::to_string(min));
  return static_cast<int>(v);
}

ojson vec(const Vector& v) {
  ojson arr = ojson::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

std::string num(double v) { return json(v).dump(); }

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

void write_json(const fs::path& path, const ojson& j) { write_file(path, j.dump(2) + "\n"); }

void write_trajectory(const fs::path& out, const UpdatePolicy& policy, double T, const Vector& stamps) {
  const AgeTrajectory traj = age_trajectory(policy, SessionConfig(T), stamps);
  std::ostringstream os;
  os << "time,age\n";
  for (Index k = 0; k < traj.vertices.rows(); ++k) {
    os << num(traj.vertices(k, 0)) << ',' << num(traj.vertices(k, 1)) << '\n';
  }
  write_file(out / "trajectory.csv", os.str());
}

ojson policy_json(const UpdatePolicy& p) {
  ojson j;
  j["t"] = vec(p.t);
  j["d"] = vec(p.d);
  return j;
}

ojson feasibility_json(const FeasibilityReport& r) {
  ojson j;
  j["feasible"] = r.feasible();
  j["min_energy_slack"] = r.energy_slack.size() ? r.energy_slack.minCoeff() : 0.0;
  j["min_service_slack"] = r.service_slack.size() ? r.service_slack.minCoeff() : 0.0;
  if (r.data_slack.size()) j["min_data_slack"] = r.data_slack.minCoeff();
  ojson v = ojson::array();
  for (const auto& x : r.violations) {
    v.push_back(ojson{{"constraint", x.constraint}, {"update", x.index + 1}, {"slack", x.slack}});
  }
  j["violations"] = v;
  return j;
}

ojson controlled_json(const ControlledSolution& sol, const ProblemInstance& in, const DelayFunction& df) {
  ojson j;
  j["status"] = "optimal";
  j["mode"] = mode_name(in.mode);
  j["N"] = sol.policy.size();
  j["policy"] = policy_json(sol.policy);
  j["age"] = sol.age;
  j["energy_used"] = sol.energy_used;
  j["intervals"] = ojson{{"x", vec(sol.intervals.x)}, {"floors", vec(sol.intervals.floors)},
                         {"level", sol.intervals.level}};
  const EnergyProfile profile(in.energy);
  ojson res = feasibility_json(check_feasibility(sol.policy, profile, SessionConfig(in.T), df));
  res["energy_exhaustion"] = std::abs(sol.energy_used - profile.total());
  j["residuals"] = res;
  return j;
}

ojson pattern_json(const PatternSolution& sol, const ProblemInstance& in, const DelayFunction& df) {
  ojson j;
  j["status"] = "optimal";
  j["mode"] = mode_name(in.mode);
  j["objective_kind"] = sol.kind == Objective::Age ? "age" : "delay";
  j["N"] = sol.policy.size();
  j["arrivals"] = vec(sol.arrivals);
  j["pattern"] = sol.pattern.to_string();
  j["pattern_rank"] = sol.rank;
  j["policy"] = policy_json(sol.policy);
  j["age"] = sol.age;
  j["delay"] = sol.delay;
  j["objective"] = sol.objective;
  j["lambda"] = sol.lambda;
  j["c"] = vec(sol.c);
  j["boundary_multipliers"] = vec(sol.boundary_multipliers);
  const oracle::KktReport kkt = oracle::kkt_audit(sol, df);
  const ArrivalSchedule arrivals(sol.arrivals);
  FeasibilityOptions fopts{in.consistency_tol, in.allow_late_reception};
  ojson res = feasibility_json(check_feasibility(sol.policy, EnergyProfile(in.energy),
                                                 SessionConfig(in.T), df, &arrivals, fopts));
  res["max_stationarity"] = kkt.max_stationarity;
  res["energy_residual"] = kkt.energy_residual;
  res["max_consistency_gap"] = kkt.max_consistency_gap;
  res["kkt_pass"] = kkt.passes();
  j["residuals"] = res;
  return j;
}

std::string sweep_csv(const SweepResult& sweep) {
  std::ostringstream os;
  os << "N,feasible,d,age\n";
  for (const auto& r : sweep.rows) {
    os << r.updates << ',' << (r.feasible ? 1 : 0) << ',' << (r.delay ? num(*r.delay) : "") << ','
       << (r.age ? num(*r.age) : "") << '\n';
  }
  return os.str();
}

int run_validate(const ProblemInstance& in, const fs::path& out, const DelayFunction& df) {
  const int n = *in.updates;
  oracle::GridSpec grid;
  grid.delta = in.grid_delta;
  grid.node_budget = in.node_budget;
  SolverOptions opts{in.allow_late_reception, in.consistency_tol};
  std::mt19937_64 rng(in.seed);

  bool all_ok = true;
  ojson report;
  report["mode"] = "validate";
  report["N"] = n;
  report["seed"] = in.seed;
  report["count"] = in.count;
  report["grid_delta"] = in.grid_delta;
  auto cmp_json = [&](const validation::Comparison& c) {
    all_ok = all_ok && c.ok;
    return ojson{{"solver", c.solver}, {"grid", c.grid}, {"gap", c.grid - c.solver},
                 {"allowed", c.allowed}, {"ok", c.ok}};
  };
  ojson controlled = ojson::array();
  ojson arrivals = ojson::array();
  for (int k = 0; k < in.count; ++k) {
    const auto cc = validation::random_controlled_case(rng, n, df);
    ojson row = cmp_json(validation::compare_controlled(cc, df, grid));
    row["T"] = cc.T;
    row["E"] = cc.energy;
    controlled.push_back(row);

    const auto ac = validation::random_arrival_case(rng, n, df);
    const auto ar = validation::compare_arrivals(ac, df, grid, opts);
    ojson arow;
    arow["T"] = ac.T;
    arow["E"] = ac.energy;
    arow["a"] = vec(ac.arrivals);
    arow["age"] = cmp_json(ar.age);
    arow["delay"] = cmp_json(ar.delay);
    arrivals.push_back(arow);
  }
  report["controlled"] = controlled;
  report["arrivals"] = arrivals;

  const EnergyProfile profile(in.energy);
  if (!profile.single_arrival()) {
    // No analytic solver covers several harvests; report the grid optimum alone.
    const oracle::GridResult g = oracle::grid_controlled(n, profile, in.T, df, grid);
    ojson gp;
    gp["found"] = g.found;
    if (g.found) {
      gp["age"] = g.value;
      gp["policy"] = policy_json(g.policy);
    }
    gp["nodes"] = g.nodes;
    report["general_profile"] = gp;
  }
  report["status"] = all_ok ? "passed" : "failed";
  write_json(out / "validation.json", report);
  return all_ok ? exit_code::ok : exit_code::validation_failed;
}

}  // namespace

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::Controlled: return "controlled";
    case Mode::Arrivals: return "arrivals";
    case Mode::Delay: return "delay";
    case Mode::Sweep: return "sweep";
    case Mode::Validate: return "validate";
  }
  return "controlled";
}

std::optional<Mode> parse_mode(std::string_view name) {
  for (Mode m : {Mode::Controlled, Mode::Arrivals, Mode::Delay, Mode::Sweep, Mode::Validate}) {
    if (mode_name(m) == name) return m;
  }
  return std::nullopt;
}

ProblemInstance parse_instance(std::string_view text, std::optional<Mode> forced) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("instance must be a JSON object");

  static const std::set<std::string> known = {
      "mode", "T", "B", "energy", "arrivals", "N", "N_max", "tolerances", "allow_late_reception",
      "prune_stale", "seed", "count", "grid_delta", "node_budget"};
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) field_error(item.key(), "unknown field");
  }

  ProblemInstance in;
  if (j.contains("mode")) {
    if (!j["mode"].is_string()) field_error("mode", "expected a string");
    auto m = parse_mode(j["mode"].get<std::string>());
    if (!m) field_error("mode", "must be one of controlled|arrivals|delay|sweep|validate");
    if (forced && *forced != *m) {
      field_error("mode", "file says '" + std::string(mode_name(*m)) + "' but the subcommand is '" +
                              std::string(mode_name(*forced)) + "'");
    }
    in.mode = *m;
  } else if (forced) {
    in.mode = *forced;
  } else {
    field_error("mode", "missing (or pass it as a subcommand)");
  }

  if (!j.contains("T")) field_error("T", "missing");
  in.T = positive(j["T"], "T");
  if (j.contains("B")) in.B = positive(j["B"], "B");

  if (!j.contains("energy")) field_error("energy", "missing");
  const json& energy = j["energy"];
  if (!energy.is_array() || energy.empty()) field_error("energy", "expected a non-empty list of [s, E] pairs");
  for (std::size_t k = 0; k < energy.size(); ++k) {
    const std::string f = "energy[" + std::to_string(k) + "]";
    if (!energy[k].is_array() || energy[k].size() != 2) field_error(f, "expected a [s, E] pair");
    in.energy.push_back({number(energy[k][0], f + "[0]"), number(energy[k][1], f + "[1]")});
  }
  try {
    EnergyProfile profile(in.energy);
    if (in.mode != Mode::Validate && !profile.single_arrival()) {
      field_error("energy", "this mode needs a single energy arrival at time 0");
    }
  } catch (const DomainError& e) {
    field_error("energy", e.what());
  }

  if (j.contains("arrivals")) {
    const json& a = j["arrivals"];
    if (!a.is_array() || a.empty()) field_error("arrivals", "expected a non-empty list of times");
    std::vector<double> times;
    for (std::size_t k = 0; k < a.size(); ++k) times.push_back(number(a[k], "arrivals[" + std::to_string(k) + "]"));
    try {
      ArrivalSchedule(Eigen::Map<const Vector>(times.data(), static_cast<Index>(times.size())));
    } catch (const DomainError& e) {
      field_error("arrivals", e.what());
    }
    if (times.back() > in.T) field_error("arrivals", "last arrival is after the session end T");
    in.arrivals = std::move(times);
  }
  if (j.contains("N")) in.updates = count_field(j["N"], "N", 1);
  if (j.contains("N_max")) in.max_updates = count_field(j["N_max"], "N_max", 1);

  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    if (!t.is_object()) field_error("tolerances", "expected an object");
    for (const auto& item : t.items()) {
      if (item.key() == "bisection") {
        in.bisection_tol = positive(item.value(), "tolerances.bisection");
      } else if (item.key() == "consistency") {
        in.consistency_tol = positive(item.value(), "tolerances.consistency");
      } else {
        field_error("tolerances." + item.key(), "unknown field");
      }
    }
  }
  auto flag = [&](const char* key, bool& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_boolean()) field_error(key, "expected true or false");
    dst = j[key].get<bool>();
  };
  flag("allow_late_reception", in.allow_late_reception);
  flag("prune_stale", in.prune_stale);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) field_error("seed", "expected a nonnegative integer");
    in.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("count")) in.count = count_field(j["count"], "count", 1);
  if (j.contains("grid_delta")) in.grid_delta = positive(j["grid_delta"], "grid_delta");
  if (j.contains("node_budget")) {
    if (!j["node_budget"].is_number_unsigned()) field_error("node_budget", "expected a positive integer");
    in.node_budget = j["node_budget"].get<std::uint64_t>();
  }

  switch (in.mode) {
    case Mode::Arrivals:
    case Mode::Delay:
      if (!in.arrivals) field_error("arrivals", "required in mode " + std::string(mode_name(in.mode)));
      break;
    case Mode::Controlled:
      if (!in.updates && !in.max_updates) field_error("N", "mode controlled needs N or N_max");
      break;
    case Mode::Sweep:
      if (!in.max_updates) field_error("N_max", "required in mode sweep");
      break;
    case Mode::Validate:
      if (!in.updates) field_error("N", "required in mode validate");
      if (*in.updates > 3) field_error("N", "validate supports N <= 3");
      break;
  }
  return in;
}

std::string dump_instance(const ProblemInstance& in) {
  ojson j;
  j["mode"] = mode_name(in.mode);
  j["T"] = in.T;
  j["B"] = in.B;
  ojson energy = ojson::array();
  for (const auto& e : in.energy) energy.push_back(ojson::array({e.time, e.amount}));
  j["energy"] = energy;
  if (in.arrivals) j["arrivals"] = *in.arrivals;
  if (in.updates) j["N"] = *in.updates;
  if (in.max_updates) j["N_max"] = *in.max_updates;
  j["tolerances"] = ojson{{"bisection", in.bisection_tol}, {"consistency", in.consistency_tol}};
  j["allow_late_reception"] = in.allow_late_reception;
  if (in.mode == Mode::Arrivals) j["prune_stale"] = in.prune_stale;
  if (in.mode == Mode::Validate) {
    j["seed"] = in.seed;
    j["count"] = in.count;
    j["grid_delta"] = in.grid_delta;
    j["node_budget"] = in.node_budget;
  }
  return j.dump(2) + "\n";
}

void apply(ProblemInstance& in, const Overrides& o) {
  if (o.tol) in.bisection_tol = *o.tol;
  if (o.grid_delta) in.grid_delta = *o.grid_delta;
  if (o.node_budget) in.node_budget = *o.node_budget;
  if (o.allow_late_reception) in.allow_late_reception = true;
}

int run(const ProblemInstance& in, const fs::path& out, std::ostream& err) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    err << "error: cannot create output directory " << out << ": " << ec.message() << "\n";
    return exit_code::input_error;
  }
  write_file(out / "instance.json", dump_instance(in));

  auto infeasible = [&](const char* constraint, const std::exception& e) {
    ojson j;
    j["status"] = "infeasible";
    j["mode"] = mode_name(in.mode);
    j["constraint"] = constraint;
    j["message"] = e.what();
    write_json(out / "solution.json", j);
    err << "infeasible (" << constraint << "): " << e.what() << "\n";
    return exit_code::infeasible;
  };

  try {
    const DelayFunction df(in.B, in.bisection_tol);
    const double E = EnergyProfile(in.energy).total();
    const SolverOptions opts{in.allow_late_reception, in.consistency_tol};

    switch (in.mode) {
      case Mode::Controlled:
      case Mode::Sweep: {
        std::optional<ControlledSolution> sol;
        if (in.mode == Mode::Controlled && in.updates) {
          sol = equal_delay_policy(*in.updates, E, in.T, df);
        } else {
          const SweepResult sweep = sweep_updates(E, in.T, df, *in.max_updates);
          write_file(out / "sweep.csv", sweep_csv(sweep));
          if (!sweep.best) {
            throw InfeasibleSession("no N in 1.." + std::to_string(*in.max_updates) +
                                    " admits a feasible equal-delay policy");
          }
          sol = *sweep.best;
        }
        write_json(out / "solution.json", controlled_json(*sol, in, df));
        write_trajectory(out, sol->policy, in.T, sol->policy.t);
        return exit_code::ok;
      }
      case Mode::Arrivals:
      case Mode::Delay: {
        const ArrivalSchedule arrivals(Eigen::Map<const Vector>(in.arrivals->data(),
                                                                static_cast<Index>(in.arrivals->size())));
        ojson j;
        PatternSolution sol;
        if (in.mode == Mode::Arrivals) {
          if (in.prune_stale) {
            const PrunedSolution pruned = prune_stale(arrivals, E, in.T, df, opts);
            sol = pruned.solution;
            j = pattern_json(sol, in, df);
            ojson p;
            p["rounds"] = pruned.rounds;
            ojson kept = ojson::array();
            for (Index k : pruned.kept) kept.push_back(k + 1);
            p["kept"] = kept;
            p["original_age"] = pruned.original.age;
            j["pruned"] = p;
          } else {
            sol = solve_arrivals(arrivals, E, in.T, df, opts);
            j = pattern_json(sol, in, df);
          }
        } else {
          sol = solve_delay(arrivals, E, in.T, df, opts);
          j = pattern_json(sol, in, df);
          const PatternSolution age_opt = solve_arrivals(arrivals, E, in.T, df, opts);
          j["age_optimal"] = ojson{{"age", age_opt.age}, {"delay", age_opt.delay},
                                   {"policy", policy_json(age_opt.policy)}};
        }
        write_json(out / "solution.json", j);
        if (!in.allow_late_reception) write_trajectory(out, sol.policy, in.T, sol.arrivals);
        return exit_code::ok;
      }
      case Mode::Validate:
        return run_validate(in, out, df);
    }
  } catch (const EnergyBelowShannonFloor& e) {
    return infeasible("energy_below_shannon_floor", e);
  } catch (const InfeasibleSession& e) {
    return infeasible("service_times_exceed_session", e);
  } catch (const Infeasible& e) {
    return infeasible("no_consistent_pattern", e);
  } catch (const OracleBudgetExceeded& e) {
    err << "error: " << e.what() << " (raise --node-budget or --grid-delta)\n";
    return exit_code::input_error;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::input_error;
  }
  return exit_code::input_error;
}

}  // namespace aoi::cli
