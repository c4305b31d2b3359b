#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ecodrive/mechanism.hpp"
#include "ecodrive/sweep_table.hpp"

namespace ecodrive::cli {

inline constexpr const char* kVersion = "ecodrive 1.0.0";

enum ExitCode : int {
  kOk = 0,
  kInvalidInput = 2,
  kIoError = 3,
  kInfeasible = 4,
  kAuditFailed = 5,  // only with --strict
};

/// Parses "start:stop:step" (inclusive) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text, const std::string& field);

struct GenerateArgs {
  long long n = 10;
  std::uint64_t seed = 0;
  double zero_prob = 0.5;
  std::string out;
};

struct SolveArgs {
  std::string scenario;
  std::string mode = "second-best";
  double budget = 3.0;
  std::string style = "local";
  std::uint64_t seed = 0x5eed;
  std::string out;
};

struct BudgetSweepArgs {
  std::string scenario;
  std::string modes = "first-best,second-best";
  std::string budgets = "0:10:0.5";
  std::string style = "local";
  std::uint64_t seed = 0x5eed;
  std::string out;
};

struct MisreportArgs {
  std::string scenario;
  long long driver = 0;
  std::optional<double> true_theta;  // defaults to the scenario file's theta
  std::string theta_hat_grid = "0:1:0.05";
  std::string mode = "first-best";
  double budget = 3.0;
  std::string style = "local";
  std::uint64_t seed = 0x5eed;
  std::string out;
};

struct AuditArgs {
  std::string scenario;
  std::string mode = "second-best";
  double budget = 3.0;
  std::string style = "local";
  std::uint64_t seed = 0x5eed;
  double h = 1e-3;
  bool strict = false;
  std::string out;
};

// Table builders. They throw on invalid input; the cmd_* wrappers map
// exceptions to exit codes and write the CSV to --out, or to `out` when no
// path is given.
SweepTable solve_table(const SolveArgs& args);
SweepTable budget_sweep_table(const BudgetSweepArgs& args);
SweepTable misreport_table(const MisreportArgs& args);
/// Sets `all_pass` to whether every audited property holds.
SweepTable audit_table(const AuditArgs& args, bool& all_pass);

int cmd_generate(const GenerateArgs& args, std::ostream& err);
int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err);
int cmd_budget_sweep(const BudgetSweepArgs& args, std::ostream& out, std::ostream& err);
int cmd_misreport(const MisreportArgs& args, std::ostream& out, std::ostream& err);
int cmd_audit(const AuditArgs& args, std::ostream& out, std::ostream& err);

/// Full command line entry point: args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ecodrive::cli
