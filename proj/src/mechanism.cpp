#include "ecodrive/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <fmt/format.h>

#include "ecodrive/model.hpp"
#include "ecodrive/rng.hpp"

namespace ecodrive {
namespace {

double hinge(double v) { return std::max(0.0, v); }

void check_theta_dims(const Scenario& s, const TypeProfile& theta) {
  if (theta.size() != s.size()) {
    throw ValidationError("theta", fmt::format("length {} does not match n = {}", theta.size(),
                                               s.size()));
  }
}

void check_budget(double budget) {
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    throw ValidationError("budget", fmt::format("value {} must be finite and >= 0", budget));
  }
}

// Strict weak order used to merge candidates: lower objective first, then the
// lexicographically larger profile.
bool better_candidate(double obj_a, const std::vector<double>& a, double obj_b,
                      const std::vector<double>& b) {
  if (obj_a != obj_b) return obj_a < obj_b;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

// Next grid index in lexicographic order; false after the last one.
bool advance_odometer(std::vector<long>& idx, long cells) {
  for (std::size_t k = idx.size(); k-- > 0;) {
    if (++idx[k] <= cells) return true;
    idx[k] = 0;
  }
  return false;
}

}  // namespace

std::string_view to_string(Mode mode) {
  return mode == Mode::first_best ? "first-best" : "second-best";
}

std::string_view to_string(SolveStyle style) {
  return style == SolveStyle::local ? "local" : "global";
}

Mode parse_mode(std::string_view text) {
  if (text == "first-best" || text == "first_best") return Mode::first_best;
  if (text == "second-best" || text == "second_best") return Mode::second_best;
  throw ValidationError("mode", fmt::format("unknown mode '{}'", text));
}

SolveStyle parse_style(std::string_view text) {
  if (text == "local") return SolveStyle::local;
  if (text == "global") return SolveStyle::global;
  throw ValidationError("style", fmt::format("unknown solve style '{}'", text));
}

double first_best_constraint(const Scenario& s, const TypeProfile& theta, const EcoProfile& a) {
  check_theta_dims(s, theta);
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    total += hinge(model::nominal_cost_grad_own(s, i, a, theta[i]));
  }
  return total;
}

double second_best_constraint(const Scenario& s, const EcoProfile& a) {
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) total += hinge(model::travel_time_grad_own(s, i, a));
  return total;
}

IncentiveVector first_best_incentive(const Scenario& s, const TypeProfile& theta,
                                     const EcoProfile& f) {
  check_theta_dims(s, theta);
  std::vector<double> u(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    u[i] = hinge(model::nominal_cost_grad_own(s, i, f, theta[i]));
  }
  return IncentiveVector(std::move(u));
}

IncentiveVector second_best_incentive(const Scenario& s, const EcoProfile& f) {
  std::vector<double> u(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) u[i] = hinge(model::travel_time_grad_own(s, i, f));
  return IncentiveVector(std::move(u));
}

IncentiveVector incentive_for(const Scenario& s, const TypeProfile& theta, const EcoProfile& f,
                              Mode mode) {
  return mode == Mode::first_best ? first_best_incentive(s, theta, f)
                                  : second_best_incentive(s, f);
}

double constraint_for(const Scenario& s, const TypeProfile& theta, const EcoProfile& f, Mode mode) {
  return mode == Mode::first_best ? first_best_constraint(s, theta, f)
                                  : second_best_constraint(s, f);
}

HingeBudgetProgram make_program(const Scenario& s, const TypeProfile& theta, Mode mode) {
  const std::size_t n = s.size();
  HingeBudgetProgram p;
  p.n = n;
  p.terms = n;
  p.objective = [&s](std::span<const double> a) { return model::total_emissions(s, a); };
  p.objective_gradient = [&s, row = std::make_shared<std::vector<double>>(n)](
                             std::span<const double> a, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
      model::emission_gradient(s, i, a, *row);
      for (std::size_t k = 0; k < s.size(); ++k) out[k] += (*row)[k];
    }
  };

  if (mode == Mode::second_best) {
    p.hinge_terms = [&s](std::span<const double> a, std::span<double> out) {
      for (std::size_t i = 0; i < s.size(); ++i) out[i] = model::travel_time_grad_own(s, i, a);
    };
    p.hinge_jacobian = [&s](std::span<const double>, std::span<double> out) {
      const std::size_t n = s.size();
      for (std::size_t i = 0; i < n; ++i) {
        model::travel_time_grad_own_jacobian_row(s, i, out.subspan(i * n, n));
      }
    };
    return p;
  }

  check_theta_dims(s, theta);
  std::vector<double> th = theta.values();
  p.hinge_terms = [&s, th](std::span<const double> a, std::span<double> out) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      out[i] = th[i] * model::emission_grad_own(s, i, a) +
               (1.0 - th[i]) * model::travel_time_grad_own(s, i, a);
    }
  };
  p.hinge_jacobian = [&s, th, tmp = std::make_shared<std::vector<double>>(n)](
                         std::span<const double> a, std::span<double> out) {
    const std::size_t n = s.size();
    for (std::size_t i = 0; i < n; ++i) {
      auto row = out.subspan(i * n, n);
      model::emission_grad_own_jacobian_row(s, i, a, *tmp);
      model::travel_time_grad_own_jacobian_row(s, i, row);
      for (std::size_t k = 0; k < n; ++k) row[k] = th[i] * (*tmp)[k] + (1.0 - th[i]) * row[k];
    }
  };
  return p;
}

MechanismOutcome solve_mechanism(const Scenario& s, const TypeProfile& theta, double budget,
                                 Mode mode, SolveStyle style, const PenaltyOptions& opts) {
  check_budget(budget);
  opts.validate();
  const std::size_t n = s.size();
  const HingeBudgetProgram program = make_program(s, theta, mode);

  std::vector<std::vector<double>> starts;
  starts.emplace_back(n, 0.0);
  if (style == SolveStyle::global) {
    starts.emplace_back(n, 1.0);
    starts.emplace_back(n, 0.5);
    SplitMix64 rng(opts.seed);
    for (int r = 0; r < opts.random_starts; ++r) {
      std::vector<double> start(n);
      for (double& v : start) v = rng.uniform01();
      starts.push_back(std::move(start));
    }
  }

  LocalSolution best;
  int best_index = -1;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    LocalSolution sol = solve_from_start(program, budget, starts[k], opts);
    if (!sol.feasible) continue;
    if (best_index < 0 || better_candidate(sol.objective, sol.a, best.objective, best.a)) {
      best = std::move(sol);
      best_index = static_cast<int>(k);
    }
  }
  if (best_index < 0) {
    throw InfeasibleError(fmt::format("no feasible candidate for budget {}", budget));
  }

  MechanismOutcome out;
  out.f = EcoProfile(best.a);
  out.u = incentive_for(s, theta, out.f, mode);
  out.objective = best.objective;
  out.constraint_value = best.constraint;
  out.budget = budget;
  out.mode = mode;
  out.solver_meta = SolverMeta{"projected_gradient", style, static_cast<int>(starts.size()),
                               best_index, best.iterations, best.repaired};
  return out;
}

MechanismOutcome brute_force_mechanism(const Scenario& s, const TypeProfile& theta, double budget,
                                       Mode mode, double grid_step, double feasibility_tol) {
  check_budget(budget);
  const std::size_t n = s.size();
  if (n > 3) throw ValidationError("n", fmt::format("grid oracle supports n <= 3, got {}", n));
  if (mode == Mode::first_best) check_theta_dims(s, theta);
  if (!(grid_step > 0.0 && grid_step <= 1.0)) {
    throw ValidationError("grid_step", fmt::format("value {} outside (0,1]", grid_step));
  }
  const long cells = std::lround(1.0 / grid_step);
  if (std::abs(static_cast<double>(cells) * grid_step - 1.0) > 1e-9) {
    throw ValidationError("grid_step", fmt::format("value {} does not divide 1", grid_step));
  }
  const HingeBudgetProgram program = make_program(s, theta, mode);

  std::vector<long> idx(n, 0);
  std::vector<double> a(n, 0.0);
  std::vector<double> best_a;
  double best_obj = 0.0;
  int visited = 0;
  while (true) {
    for (std::size_t k = 0; k < n; ++k) a[k] = static_cast<double>(idx[k]) / cells;
    ++visited;
    if (program.constraint(a) <= budget + feasibility_tol) {
      const double obj = program.objective(a);
      // Visiting order is lexicographically increasing, so "<=" keeps the
      // largest profile among exact ties.
      if (best_a.empty() || obj <= best_obj) {
        best_obj = obj;
        best_a = a;
      }
    }
    if (!advance_odometer(idx, cells)) break;
  }
  if (best_a.empty()) throw InfeasibleError("no feasible grid point");

  MechanismOutcome out;
  out.f = EcoProfile(best_a);
  out.u = incentive_for(s, theta, out.f, mode);
  out.objective = best_obj;
  out.constraint_value = program.constraint(best_a);
  out.budget = budget;
  out.mode = mode;
  out.solver_meta = SolverMeta{"grid", SolveStyle::global, visited, 0, 0, false};
  return out;
}

}  // namespace ecodrive
