#include "ecodrive/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "ecodrive/model.hpp"

namespace ecodrive {
namespace {

void check_dims(const Scenario& s, std::size_t got, const char* field) {
  if (got != s.size()) {
    throw ValidationError(field, fmt::format("length {} does not match n = {}", got, s.size()));
  }
}

std::vector<double> ic_report_grid() {
  std::vector<double> grid(11);
  for (int k = 0; k <= 10; ++k) grid[k] = k / 10.0;
  return grid;
}

TypeProfile with_report(const TypeProfile& theta, std::size_t i, double report) {
  return theta.with(i, report);
}

// l_i(f(report), theta_true, u_i(report)).
double cost_under_report(const Scenario& s, std::size_t i, const MechanismOutcome& m,
                         double theta_true) {
  return model::incentivized_cost(s, i, m.f, theta_true, m.u[i]);
}

}  // namespace

bool DefinitionCheck::all() const {
  return std::all_of(pass.begin(), pass.end(), [](bool b) { return b; });
}

bool IcReport::pass() const {
  return std::all_of(drivers.begin(), drivers.end(), [](const IcDriverReport& d) {
    return d.frozen_residual <= kAuditTol && d.total_residual <= kAuditTol && d.concave &&
           d.truthful_optimal;
  });
}

std::vector<double> deviation_grid(double f_i, int grid_points) {
  std::vector<double> grid;
  if (f_i <= 0.0) return grid;
  grid.reserve(grid_points);
  for (int k = 0; k < grid_points; ++k) grid.push_back(f_i * k / grid_points);
  return grid;
}

ObedienceReport obedience_margin(const Scenario& s, const TypeProfile& theta, const EcoProfile& f,
                                 const IncentiveVector& u, const SolverOptions& opts) {
  opts.validate();
  check_dims(s, theta.size(), "theta");
  check_dims(s, f.size(), "f");
  check_dims(s, u.size(), "u");

  ObedienceReport report;
  report.margin.assign(s.size(), std::numeric_limits<double>::max());
  report.witness.assign(s.size(), std::nullopt);
  std::vector<double> dev = f.values();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double fi = f[i];
    const double x_f = model::emission(s, i, f);
    const double y_f = model::travel_time(s, i, f);
    for (double ai : deviation_grid(fi, opts.grid_points)) {
      dev[i] = ai;
      const double xi = (x_f - model::emission(s, i, dev)) / (fi - ai);
      const double tau = (y_f - model::travel_time(s, i, dev)) / (fi - ai);
      const double margin = u[i] - (theta[i] * xi + (1.0 - theta[i]) * tau);
      if (margin < report.margin[i]) {
        report.margin[i] = margin;
        report.witness[i] = ai;
      }
    }
    dev[i] = fi;
  }
  report.pass = std::all_of(report.margin.begin(), report.margin.end(),
                            [](double m) { return m >= -kAuditTol; });
  return report;
}

DefinitionCheck obedience_definition_check(const Scenario& s, const TypeProfile& theta,
                                           const EcoProfile& f, const IncentiveVector& u,
                                           const SolverOptions& opts) {
  opts.validate();
  check_dims(s, theta.size(), "theta");
  check_dims(s, f.size(), "f");
  check_dims(s, u.size(), "u");

  DefinitionCheck check;
  check.pass.assign(s.size(), true);
  check.witness.assign(s.size(), std::nullopt);
  std::vector<double> dev = f.values();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double at_f = model::incentivized_cost(s, i, f, theta[i], u[i]);
    for (double ai : deviation_grid(f[i], opts.grid_points)) {
      dev[i] = ai;
      const double at_dev = model::incentivized_cost(s, i, dev, theta[i], u[i]);
      if (at_f > at_dev + kAuditTol * (f[i] - ai)) {
        check.pass[i] = false;
        check.witness[i] = ai;
        break;
      }
    }
    dev[i] = f[i];
  }
  return check;
}

std::vector<MisreportRow> misreport_sweep(const Scenario& s, const TypeProfile& theta,
                                          std::size_t i, const std::vector<double>& theta_hat_grid,
                                          Mode mode, double budget, SolveStyle style,
                                          const SolverOptions& opts,
                                          const PenaltyOptions& penalty) {
  opts.validate();
  check_dims(s, theta.size(), "theta");
  if (i >= s.size()) {
    throw std::out_of_range(fmt::format("driver index {} out of range for n = {}", i, s.size()));
  }
  for (std::size_t k = 0; k < theta_hat_grid.size(); ++k) {
    check_unit_interval(theta_hat_grid[k], fmt::format("theta_hat_grid[{}]", k));
  }

  std::vector<MisreportRow> rows;
  rows.reserve(theta_hat_grid.size());
  for (double report : theta_hat_grid) {
    MisreportRow row;
    row.theta_hat = report;
    try {
      const MechanismOutcome m =
          solve_mechanism(s, with_report(theta, i, report), budget, mode, style, penalty);
      row.f_i = m.f[i];
      row.u_i = m.u[i];
      row.a_opt = best_response(s, i, m.f, theta[i], m.u[i], opts);
      const EcoProfile at_opt = m.f.with(i, row.a_opt);
      row.ell_at_a_opt = model::incentivized_cost(s, i, at_opt, theta[i], m.u[i]);
      row.ell_at_f = model::incentivized_cost(s, i, m.f, theta[i], m.u[i]);
      row.obedient = row.a_opt >= row.f_i - kAuditTol;
    } catch (const std::exception& e) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.f_i = row.u_i = row.a_opt = row.ell_at_a_opt = row.ell_at_f = nan;
      row.obedient = false;
      row.solver_ok = false;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double frozen_ic_residual(const Scenario& s, std::size_t i, double theta_i, const EcoProfile& f,
                          const IncentiveVector& u, double h) {
  if (!(h > 0.0) || !(theta_i - h >= 0.0) || !(theta_i + h <= 1.0)) {
    throw ValidationError(fmt::format("theta[{}]", i),
                          fmt::format("value {} too close to the boundary for h = {}", theta_i, h));
  }
  const double up = model::incentivized_cost(s, i, f, theta_i + h, u[i]);
  const double down = model::incentivized_cost(s, i, f, theta_i - h, u[i]);
  const double slope = (up - down) / (2.0 * h);
  return std::abs(slope - (model::emission(s, i, f) - model::travel_time(s, i, f)));
}

IcReport ic_derivative_check(const Scenario& s, const TypeProfile& theta, Mode mode, double budget,
                             SolveStyle style, double h, const PenaltyOptions& penalty) {
  check_dims(s, theta.size(), "theta");
  if (!(h > 0.0 && h < 0.5)) throw ValidationError("h", fmt::format("value {} outside (0,0.5)", h));
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(theta[i] > h && theta[i] < 1.0 - h)) {
      throw ValidationError(fmt::format("theta[{}]", i),
                            fmt::format("value {} too close to the boundary for h = {}", theta[i], h));
    }
  }

  const MechanismOutcome truthful = solve_mechanism(s, theta, budget, mode, style, penalty);
  const std::vector<double> grid = ic_report_grid();

  IcReport report;
  report.drivers.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    IcDriverReport& d = report.drivers[i];
    const double ti = theta[i];
    const double x_f = model::emission(s, i, truthful.f);
    const double y_f = model::travel_time(s, i, truthful.f);

    d.frozen_residual = frozen_ic_residual(s, i, ti, truthful.f, truthful.u, h);

    // Total reading: theta_i enters both the cost and the report.
    auto total_map = [&](double t) {
      const MechanismOutcome m = solve_mechanism(s, with_report(theta, i, t), budget, mode, style,
                                                 penalty);
      return cost_under_report(s, i, m, t);
    };
    const double slope = (total_map(ti + h) - total_map(ti - h)) / (2.0 * h);
    d.total_residual = std::abs(slope - (x_f - y_f));

    std::vector<double> total_values(grid.size());
    std::vector<double> reported_values(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const MechanismOutcome m =
          solve_mechanism(s, with_report(theta, i, grid[k]), budget, mode, style, penalty);
      total_values[k] = cost_under_report(s, i, m, grid[k]);
      reported_values[k] = cost_under_report(s, i, m, ti);
    }
    d.max_second_difference = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
      d.max_second_difference = std::max(
          d.max_second_difference, total_values[k - 1] - 2.0 * total_values[k] + total_values[k + 1]);
    }
    d.concave = d.max_second_difference <= kAuditTol;

    const double truthful_cost = cost_under_report(s, i, truthful, ti);
    const auto best = std::min_element(reported_values.begin(), reported_values.end());
    d.best_report = grid[static_cast<std::size_t>(best - reported_values.begin())];
    d.misreport_gain = std::max(0.0, truthful_cost - *best);
    d.truthful_optimal = d.misreport_gain <= kAuditTol;
  }
  return report;
}

BudgetCheck budget_check(const IncentiveVector& u, double budget) {
  const double total = std::accumulate(u.values().begin(), u.values().end(), 0.0);
  BudgetCheck check;
  check.slack = budget - total;
  check.pass = check.slack >= -kAuditTol;
  return check;
}

}  // namespace ecodrive
