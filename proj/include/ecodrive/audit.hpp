#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ecodrive/equilibrium.hpp"
#include "ecodrive/mechanism.hpp"
#include "ecodrive/types.hpp"

namespace ecodrive {

/// Verdict tolerance shared by the obedience, IC and budget checks.
inline constexpr double kAuditTol = 1e-6;

struct ObedienceReport {
  /// min over the grid of u_i - [theta_i xi_i + (1 - theta_i) tau_i].
  /// Drivers with f_i = 0 have no deviation below f_i and get the largest
  /// representable double.
  std::vector<double> margin;
  /// Grid point attaining the minimum; empty for f_i = 0.
  std::vector<std::optional<double>> witness;
  bool pass = false;  // every margin >= -kAuditTol

  bool driver_pass(std::size_t i) const { return margin[i] >= -kAuditTol; }
};

struct DefinitionCheck {
  std::vector<bool> pass;
  /// First grid deviation that lowers the cost, when one exists.
  std::vector<std::optional<double>> witness;

  bool all() const;
};

/// Deviation grid for driver i: grid_points samples f_i * k / grid_points,
/// k = 0 .. grid_points - 1, which covers [0, f_i) and excludes f_i.
std::vector<double> deviation_grid(double f_i, int grid_points);

/// Characterization check through the difference quotients
///   xi_i  = (x_i(f) - x_i(a_i, f_-i)) / (f_i - a_i)
///   tau_i = (y_i(f) - y_i(a_i, f_-i)) / (f_i - a_i)
/// evaluated directly on the deviation grid.
ObedienceReport obedience_margin(const Scenario& s, const TypeProfile& theta, const EcoProfile& f,
                                 const IncentiveVector& u, const SolverOptions& opts = {});

/// Direct check of l_i(f) <= l_i(a_i, f_-i) on the deviation grid. The slack
/// kAuditTol is applied per unit of deviation, (f_i - a_i) * kAuditTol, so the
/// verdict matches obedience_margin.
DefinitionCheck obedience_definition_check(const Scenario& s, const TypeProfile& theta,
                                           const EcoProfile& f, const IncentiveVector& u,
                                           const SolverOptions& opts = {});

struct MisreportRow {
  double theta_hat = 0.0;
  double f_i = 0.0;
  double u_i = 0.0;
  double a_opt = 0.0;         // best response under the true type
  double ell_at_a_opt = 0.0;  // true-type incentivized cost at a_opt
  double ell_at_f = 0.0;      // true-type incentivized cost at f_i
  bool obedient = false;      // a_opt >= f_i - kAuditTol
  bool solver_ok = true;
  std::string error;          // solver failure message when !solver_ok
};

/// For each reported type theta_hat of driver i, re-solves the mechanism at
/// (theta_hat, theta_-i) and computes driver i's best response against
/// f_-i(theta_hat, theta_-i) with her true type and u_i(theta_hat, theta_-i).
/// Solver failures are reported per row; rows follow grid order.
std::vector<MisreportRow> misreport_sweep(const Scenario& s, const TypeProfile& theta,
                                          std::size_t i, const std::vector<double>& theta_hat_grid,
                                          Mode mode, double budget, SolveStyle style,
                                          const SolverOptions& opts = {},
                                          const PenaltyOptions& penalty = {});

/// Central difference in theta_i of l_i(f, theta_i, u_i) with (f, u) held
/// fixed, minus x_i(f) - y_i(f).
double frozen_ic_residual(const Scenario& s, std::size_t i, double theta_i, const EcoProfile& f,
                          const IncentiveVector& u, double h);

struct IcDriverReport {
  /// Mechanism frozen at the truthful report, cost differenced in theta_i.
  double frozen_residual = 0.0;
  /// theta_i moved in both the cost and the report:
  /// |d/dt l_i(f(t, theta_-i), t, u_i(t, theta_-i)) - (x_i(f) - y_i(f))|.
  double total_residual = 0.0;
  /// Largest second difference of the same map on the 11-point grid of [0,1];
  /// concave when <= kAuditTol.
  double max_second_difference = 0.0;
  bool concave = false;
  /// l_i(f(theta), theta_i, u_i(theta)) - min over reports on the 11-point
  /// grid of l_i(f(theta_hat, theta_-i), theta_i, u_i(theta_hat, theta_-i)).
  double misreport_gain = 0.0;
  double best_report = 0.0;  // report attaining the minimum
  bool truthful_optimal = false;  // misreport_gain <= kAuditTol
};

struct IcReport {
  std::vector<IcDriverReport> drivers;
  bool pass() const;
};

/// Both readings of the IC derivative condition plus an empirical IC sweep.
/// Requires h < theta_i < 1 - h for every driver.
IcReport ic_derivative_check(const Scenario& s, const TypeProfile& theta, Mode mode, double budget,
                             SolveStyle style, double h, const PenaltyOptions& penalty = {});

struct BudgetCheck {
  double slack = 0.0;  // budget - sum u
  bool pass = false;   // slack >= -kAuditTol
};

BudgetCheck budget_check(const IncentiveVector& u, double budget);

}  // namespace ecodrive
