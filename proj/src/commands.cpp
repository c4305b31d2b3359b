#include "ecodrive/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ecodrive/audit.hpp"
#include "ecodrive/equilibrium.hpp"
#include "ecodrive/model.hpp"
#include "ecodrive/scenario.hpp"

namespace ecodrive::cli {
namespace {

// I/O failures are reported separately from invalid input.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ScenarioWithTypes read_scenario(const std::string& path) {
  if (path.empty()) throw ValidationError("scenario", "a scenario path is required");
  try {
    return load(path);
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    throw IoError(e.what());
  }
}

void write_table(const SweepTable& table, const std::string& path, std::ostream& stdout_stream) {
  if (path.empty()) {
    table.write_csv(stdout_stream);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
  table.write_csv(out);
  if (!out) throw IoError(fmt::format("failed writing '{}'", path));
}

void check_budget_arg(double budget) {
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    throw ValidationError("budget", fmt::format("value {} must be finite and >= 0", budget));
  }
}

PenaltyOptions penalty_with_seed(std::uint64_t seed) {
  PenaltyOptions p;
  p.seed = seed;
  return p;
}

void common_metadata(SweepTable& t, const std::string& schema, const std::string& scenario,
                     std::string_view style, std::uint64_t seed, const PenaltyOptions& p) {
  t.set_metadata("schema", schema);
  t.set_metadata("version", kVersion);
  t.set_metadata("scenario", scenario);
  t.set_metadata("style", std::string(style));
  t.set_metadata("seed", std::to_string(seed));
  t.set_metadata("start", "zeros (global style adds ones, halves and seeded uniform starts)");
  t.set_metadata("penalty",
                 fmt::format("rounds={} weight={}x{} sharpness={}x{} step={} max_iter={} pg_tol={}",
                             p.rounds, p.penalty_initial, p.penalty_growth, p.sharpness_initial,
                             p.sharpness_growth, p.step_initial, p.max_iterations,
                             p.projected_gradient_tol));
  t.set_metadata("random_starts", std::to_string(p.random_starts));
  t.set_metadata("feasibility_tol", format_real(p.feasibility_tol));
  t.set_metadata("repair", fmt::format("restore_iterations={} bisections={}", p.restore_iterations,
                                       p.repair_bisections));
}

void solver_metadata(SweepTable& t, const SolverOptions& o) {
  t.set_metadata("solver", fmt::format("tol_profile={} tol_deriv={} max_sweeps={} grid_points={}",
                                       o.tol_profile, o.tol_deriv, o.max_sweeps, o.grid_points));
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

double parse_real(const std::string& token, const std::string& field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ValidationError(field, fmt::format("cannot parse '{}' as a number", token));
  }
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const InfeasibleError& e) {
    err << "error: infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }
}

}  // namespace

std::vector<double> parse_grid(const std::string& text, const std::string& field) {
  if (text.empty()) throw ValidationError(field, "empty grid");
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ValidationError(field, "expected start:stop:step");
    const double start = parse_real(parts[0], field);
    const double stop = parse_real(parts[1], field);
    const double step = parse_real(parts[2], field);
    if (!(step > 0.0) || !(stop >= start)) {
      throw ValidationError(field, "need step > 0 and stop >= start");
    }
    const long count = std::lround((stop - start) / step);
    for (long k = 0; k <= count; ++k) grid.push_back(start + static_cast<double>(k) * step);
    return grid;
  }
  for (const auto& token : split(text, ',')) grid.push_back(parse_real(token, field));
  return grid;
}

SweepTable solve_table(const SolveArgs& args) {
  const Mode mode = parse_mode(args.mode);
  const SolveStyle style = parse_style(args.style);
  check_budget_arg(args.budget);
  const auto [scenario, theta] = read_scenario(args.scenario);
  const PenaltyOptions penalty = penalty_with_seed(args.seed);

  const MechanismOutcome m = solve_mechanism(scenario, theta, args.budget, mode, style, penalty);
  const std::size_t n = scenario.size();

  std::vector<std::string> columns = {"mode",        "style",       "budget",    "objective",
                                      "constraint_value", "total_incentive", "budget_slack",
                                      "starts",      "best_start",  "iterations", "repaired"};
  for (std::size_t i = 0; i < n; ++i) columns.push_back(fmt::format("f_{}", i));
  for (std::size_t i = 0; i < n; ++i) columns.push_back(fmt::format("u_{}", i));
  SweepTable table(std::move(columns));
  common_metadata(table, "solve/1", args.scenario, to_string(style), args.seed, penalty);
  table.set_metadata("mode", std::string(to_string(mode)));
  table.set_metadata("budget", format_real(args.budget));

  const BudgetCheck bc = budget_check(m.u, args.budget);
  std::vector<Cell> row = {std::string(to_string(mode)),
                           std::string(to_string(style)),
                           m.budget,
                           m.objective,
                           m.constraint_value,
                           args.budget - bc.slack,
                           bc.slack,
                           static_cast<long long>(m.solver_meta.starts),
                           static_cast<long long>(m.solver_meta.best_start),
                           static_cast<long long>(m.solver_meta.iterations),
                           m.solver_meta.repaired};
  for (std::size_t i = 0; i < n; ++i) row.emplace_back(m.f[i]);
  for (std::size_t i = 0; i < n; ++i) row.emplace_back(m.u[i]);
  table.add_row(std::move(row));
  return table;
}

SweepTable budget_sweep_table(const BudgetSweepArgs& args) {
  std::vector<Mode> modes;
  for (const auto& token : split(args.modes, ',')) modes.push_back(parse_mode(token));
  if (modes.empty()) throw ValidationError("modes", "at least one mode is required");
  const SolveStyle style = parse_style(args.style);
  const auto budgets = parse_grid(args.budgets, "budgets");
  for (double b : budgets) check_budget_arg(b);
  const auto [scenario, theta] = read_scenario(args.scenario);
  const PenaltyOptions penalty = penalty_with_seed(args.seed);

  SweepTable table(
      {"budget", "mode", "total_emissions", "total_incentive", "full_compliance"});
  common_metadata(table, "budget-sweep/1", args.scenario, to_string(style), args.seed, penalty);
  table.set_metadata("full_compliance", "min f_i >= 1 - 1e-6");
  for (Mode mode : modes) {
    for (double b : budgets) {
      const MechanismOutcome m = solve_mechanism(scenario, theta, b, mode, style, penalty);
      double total_u = 0.0;
      for (double v : m.u.values()) total_u += v;
      const double min_f = *std::min_element(m.f.values().begin(), m.f.values().end());
      table.add_row({b, std::string(to_string(mode)), m.objective, total_u, min_f >= 1.0 - 1e-6});
    }
  }
  return table;
}

SweepTable misreport_table(const MisreportArgs& args) {
  const Mode mode = parse_mode(args.mode);
  const SolveStyle style = parse_style(args.style);
  check_budget_arg(args.budget);
  const auto grid = parse_grid(args.theta_hat_grid, "theta_hat_grid");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    check_unit_interval(grid[k], fmt::format("theta_hat_grid[{}]", k));
  }
  auto [scenario, theta] = read_scenario(args.scenario);
  if (args.driver < 0 || static_cast<std::size_t>(args.driver) >= scenario.size()) {
    throw ValidationError("driver", fmt::format("index {} out of range for n = {}", args.driver,
                                                scenario.size()));
  }
  const auto i = static_cast<std::size_t>(args.driver);
  if (args.true_theta) theta = theta.with(i, *args.true_theta);

  const PenaltyOptions penalty = penalty_with_seed(args.seed);
  const SolverOptions solver;
  const auto rows = misreport_sweep(scenario, theta, i, grid, mode, args.budget, style, solver,
                                    penalty);

  SweepTable table({"theta_hat", "f_i", "u_i", "a_opt", "ell_at_a_opt", "ell_at_f", "obedient",
                    "solver_ok"});
  common_metadata(table, "misreport/1", args.scenario, to_string(style), args.seed, penalty);
  solver_metadata(table, solver);
  table.set_metadata("mode", std::string(to_string(mode)));
  table.set_metadata("budget", format_real(args.budget));
  table.set_metadata("driver", std::to_string(i));
  table.set_metadata("true_theta", format_real(theta[i]));
  table.set_metadata("true_theta_source", args.true_theta ? "command line" : "scenario file");
  for (const auto& r : rows) {
    table.add_row({r.theta_hat, r.f_i, r.u_i, r.a_opt, r.ell_at_a_opt, r.ell_at_f, r.obedient,
                   r.solver_ok});
  }
  return table;
}

SweepTable audit_table(const AuditArgs& args, bool& all_pass) {
  const Mode mode = parse_mode(args.mode);
  const SolveStyle style = parse_style(args.style);
  check_budget_arg(args.budget);
  const auto [scenario, theta] = read_scenario(args.scenario);
  const PenaltyOptions penalty = penalty_with_seed(args.seed);
  const SolverOptions solver;

  const MechanismOutcome m = solve_mechanism(scenario, theta, args.budget, mode, style, penalty);
  const ObedienceReport margin = obedience_margin(scenario, theta, m.f, m.u, solver);
  const DefinitionCheck direct = obedience_definition_check(scenario, theta, m.f, m.u, solver);
  const BudgetCheck budget = budget_check(m.u, args.budget);

  SweepTable table({"check", "driver", "value", "witness", "pass"});
  common_metadata(table, "audit/1", args.scenario, to_string(style), args.seed, penalty);
  solver_metadata(table, solver);
  table.set_metadata("mode", std::string(to_string(mode)));
  table.set_metadata("budget", format_real(args.budget));
  table.set_metadata("ic_h", format_real(args.h));
  table.set_metadata("tolerance", format_real(kAuditTol));

  const double nan = std::numeric_limits<double>::quiet_NaN();
  all_pass = true;
  auto add = [&](const char* check, long long driver, double value, double witness, bool pass) {
    table.add_row({std::string(check), driver, value, witness, pass});
    all_pass = all_pass && pass;
  };

  const auto n = static_cast<long long>(scenario.size());
  for (long long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    add("obedience_margin", i, margin.margin[k], margin.witness[k].value_or(nan),
        margin.driver_pass(k));
  }
  for (long long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    add("obedience_definition", i, direct.pass[k] ? 1.0 : 0.0, direct.witness[k].value_or(nan),
        direct.pass[k]);
  }

  try {
    const IcReport ic =
        ic_derivative_check(scenario, theta, mode, args.budget, style, args.h, penalty);
    for (long long i = 0; i < n; ++i) {
      const auto& d = ic.drivers[static_cast<std::size_t>(i)];
      add("ic_frozen_residual", i, d.frozen_residual, nan, d.frozen_residual <= kAuditTol);
      add("ic_total_residual", i, d.total_residual, nan, d.total_residual <= kAuditTol);
      add("ic_concavity", i, d.max_second_difference, nan, d.concave);
      add("ic_misreport_gain", i, d.misreport_gain, d.best_report, d.truthful_optimal);
    }
  } catch (const ValidationError& e) {
    table.set_metadata("ic_check", fmt::format("skipped: {}", e.what()));
  }

  add("budget_slack", -1, budget.slack, nan, budget.pass);
  return table;
}

int cmd_generate(const GenerateArgs& args, std::ostream& err) {
  return guarded(err, [&] {
    if (args.n <= 0) throw ValidationError("n", fmt::format("value {} must be positive", args.n));
    GenerationSpec spec;
    spec.n = static_cast<std::size_t>(args.n);
    spec.seed = args.seed;
    spec.zero_prob = args.zero_prob;
    const auto [scenario, theta] = generate(spec);
    if (args.out.empty()) throw ValidationError("out", "an output path is required");
    try {
      save(scenario, theta, args.out);
    } catch (const std::runtime_error& e) {
      throw IoError(e.what());
    }
    return static_cast<int>(kOk);
  });
}

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    write_table(solve_table(args), args.out, out);
    return static_cast<int>(kOk);
  });
}

int cmd_budget_sweep(const BudgetSweepArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    write_table(budget_sweep_table(args), args.out, out);
    return static_cast<int>(kOk);
  });
}

int cmd_misreport(const MisreportArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    write_table(misreport_table(args), args.out, out);
    return static_cast<int>(kOk);
  });
}

int cmd_audit(const AuditArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    bool all_pass = false;
    write_table(audit_table(args, all_pass), args.out, out);
    if (args.strict && !all_pass) {
      err << "audit: at least one property failed\n";
      return static_cast<int>(kAuditFailed);
    }
    return static_cast<int>(kOk);
  });
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Eco-driving incentive mechanism laboratory", "ecodrive"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  GenerateArgs gen;
  auto* generate_cmd = app.add_subcommand("generate", "Generate a random scenario file");
  generate_cmd->add_option("--n", gen.n, "Number of drivers")->required();
  generate_cmd->add_option("--seed", gen.seed, "SplitMix64 seed");
  generate_cmd->add_option("--zero-prob", gen.zero_prob, "Probability of a zero interaction weight");
  generate_cmd->add_option("--out", gen.out, "Output scenario JSON")->required();

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a first- or second-best mechanism");
  solve_cmd->add_option("--scenario", solve.scenario, "Scenario JSON")->required();
  solve_cmd->add_option("--mode", solve.mode, "first-best | second-best");
  solve_cmd->add_option("--budget", solve.budget, "Total budget");
  solve_cmd->add_option("--style", solve.style, "local | global");
  solve_cmd->add_option("--seed", solve.seed, "Seed for the global-style random starts");
  solve_cmd->add_option("--out", solve.out, "Output CSV (stdout when omitted)");

  BudgetSweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("budget-sweep", "Total emissions versus budget");
  sweep_cmd->add_option("--scenario", sweep.scenario, "Scenario JSON")->required();
  sweep_cmd->add_option("--modes,--mode", sweep.modes, "Comma-separated modes");
  sweep_cmd->add_option("--budgets", sweep.budgets, "start:stop:step or comma list");
  sweep_cmd->add_option("--style", sweep.style, "local | global");
  sweep_cmd->add_option("--seed", sweep.seed, "Seed for the global-style random starts");
  sweep_cmd->add_option("--out", sweep.out, "Output CSV (stdout when omitted)");

  MisreportArgs mis;
  double true_theta = 0.0;
  auto* mis_cmd = app.add_subcommand("misreport", "Sweep the reported type of one driver");
  mis_cmd->add_option("--scenario", mis.scenario, "Scenario JSON")->required();
  mis_cmd->add_option("--driver", mis.driver, "Driver index (0-based)");
  auto* true_theta_opt =
      mis_cmd->add_option("--true-theta", true_theta, "Override the driver's true type");
  mis_cmd->add_option("--theta-hat-grid", mis.theta_hat_grid, "start:stop:step or comma list");
  mis_cmd->add_option("--mode", mis.mode, "first-best | second-best");
  mis_cmd->add_option("--budget", mis.budget, "Total budget");
  mis_cmd->add_option("--style", mis.style, "local | global");
  mis_cmd->add_option("--seed", mis.seed, "Seed for the global-style random starts");
  mis_cmd->add_option("--out", mis.out, "Output CSV (stdout when omitted)");

  AuditArgs audit;
  auto* audit_cmd = app.add_subcommand("audit", "Obedience, IC and budget verdicts");
  audit_cmd->add_option("--scenario", audit.scenario, "Scenario JSON")->required();
  audit_cmd->add_option("--mode", audit.mode, "first-best | second-best");
  audit_cmd->add_option("--budget", audit.budget, "Total budget");
  audit_cmd->add_option("--style", audit.style, "local | global");
  audit_cmd->add_option("--seed", audit.seed, "Seed for the global-style random starts");
  audit_cmd->add_option("--fd-step", audit.h, "Central-difference step for the IC check");
  audit_cmd->add_flag("--strict", audit.strict, "Exit nonzero when a property fails");
  audit_cmd->add_option("--out", audit.out, "Output CSV (stdout when omitted)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? static_cast<int>(kOk) : static_cast<int>(kInvalidInput);
  }

  if (*generate_cmd) return cmd_generate(gen, err);
  if (*solve_cmd) return cmd_solve(solve, out, err);
  if (*sweep_cmd) return cmd_budget_sweep(sweep, out, err);
  if (*mis_cmd) {
    if (true_theta_opt->count() > 0) mis.true_theta = true_theta;
    return cmd_misreport(mis, out, err);
  }
  return cmd_audit(audit, out, err);
}

}  // namespace ecodrive::cli
