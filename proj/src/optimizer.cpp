#include "ecodrive/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ecodrive/types.hpp"

namespace ecodrive {
namespace {

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void project_to_box(std::span<double> a) {
  for (double& v : a) v = std::clamp(v, 0.0, 1.0);
}

// Penalized objective for one continuation round.
class PenalizedObjective {
 public:
  PenalizedObjective(const HingeBudgetProgram& p, double budget, double weight, double sharpness)
      : p_(p), budget_(budget), weight_(weight), sharpness_(sharpness),
        g_(p.terms), jac_(p.terms * p.n), obj_grad_(p.n) {}

  double value(std::span<const double> a) {
    p_.hinge_terms(a, g_);
    double smoothed = 0.0;
    for (double g : g_) smoothed += softplus(g, sharpness_);
    const double excess = std::max(0.0, smoothed - budget_);
    return p_.objective(a) + weight_ * excess * excess;
  }

  /// Returns the value and writes the gradient.
  double value_and_gradient(std::span<const double> a, std::span<double> grad) {
    p_.hinge_terms(a, g_);
    double smoothed = 0.0;
    for (double g : g_) smoothed += softplus(g, sharpness_);
    const double excess = std::max(0.0, smoothed - budget_);

    p_.objective_gradient(a, obj_grad_);
    std::copy(obj_grad_.begin(), obj_grad_.end(), grad.begin());
    if (excess > 0.0) {
      p_.hinge_jacobian(a, jac_);
      const double outer = 2.0 * weight_ * excess;
      for (std::size_t r = 0; r < p_.terms; ++r) {
        const double slope = outer * logistic(sharpness_ * g_[r]);
        if (slope == 0.0) continue;
        const double* row = jac_.data() + r * p_.n;
        for (std::size_t k = 0; k < p_.n; ++k) grad[k] += slope * row[k];
      }
    }
    return p_.objective(a) + weight_ * excess * excess;
  }

 private:
  const HingeBudgetProgram& p_;
  double budget_;
  double weight_;
  double sharpness_;
  std::vector<double> g_;
  std::vector<double> jac_;
  std::vector<double> obj_grad_;
};

// Newton steps on C(a) = budget with the exact hinge, taking the minimum-norm
// step -(C - budget) grad C / |grad C|^2 and halving it until the violation
// drops. The penalty rounds leave a small violation, and on thin feasible
// sets (a zero budget admits only profiles with every hinge term <= 0)
// shrinking toward the origin would throw the whole solution away. Stops once
// the violation is below half the tolerance. Returns the iterations used.
int restore_feasibility(const HingeBudgetProgram& p, double budget, const PenaltyOptions& opts,
                        std::vector<double>& a) {
  std::vector<double> g(p.terms), jac(p.terms * p.n), grad(p.n), trial(p.n);
  auto excess = [&](std::span<const double> x) { return std::max(0.0, p.constraint(x) - budget); };
  const double target = 0.5 * opts.feasibility_tol;
  int it = 0;
  for (; it < opts.restore_iterations; ++it) {
    const double e = excess(a);
    if (e <= target) break;
    p.hinge_terms(a, g);
    p.hinge_jacobian(a, jac);
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t r = 0; r < p.terms; ++r) {
      if (g[r] <= 0.0) continue;
      const double* row = jac.data() + r * p.n;
      for (std::size_t k = 0; k < p.n; ++k) grad[k] += row[k];
    }
    double norm2 = 0.0;
    for (double v : grad) norm2 += v * v;
    if (norm2 == 0.0) break;
    bool accepted = false;
    for (double step = e / norm2; step * std::sqrt(norm2) > 1e-16; step *= 0.5) {
      for (std::size_t k = 0; k < p.n; ++k) trial[k] = std::clamp(a[k] - step * grad[k], 0.0, 1.0);
      if (excess(trial) < e) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    a.swap(trial);
  }
  return it;
}

}  // namespace

double HingeBudgetProgram::constraint(std::span<const double> a) const {
  std::vector<double> g(terms);
  hinge_terms(a, g);
  double total = 0.0;
  for (double v : g) total += std::max(0.0, v);
  return total;
}

void PenaltyOptions::validate() const {
  if (rounds <= 0) throw ValidationError("rounds", "must be > 0");
  if (!(penalty_initial > 0.0) || !(penalty_growth >= 1.0)) {
    throw ValidationError("penalty", "initial weight must be > 0 and growth >= 1");
  }
  if (!(sharpness_initial > 0.0) || !(sharpness_growth >= 1.0)) {
    throw ValidationError("sharpness", "initial value must be > 0 and growth >= 1");
  }
  if (!(step_initial > 0.0)) throw ValidationError("step_initial", "must be > 0");
  if (max_iterations <= 0) throw ValidationError("max_iterations", "must be > 0");
  if (!(projected_gradient_tol > 0.0)) throw ValidationError("projected_gradient_tol", "must be > 0");
  if (!(feasibility_tol >= 0.0)) throw ValidationError("feasibility_tol", "must be >= 0");
  if (restore_iterations < 0) throw ValidationError("restore_iterations", "must be >= 0");
  if (repair_bisections <= 0) throw ValidationError("repair_bisections", "must be > 0");
  if (random_starts < 0) throw ValidationError("random_starts", "must be >= 0");
}

double softplus(double z, double sharpness) {
  const double kz = sharpness * z;
  if (kz > 0.0) return z + std::log1p(std::exp(-kz)) / sharpness;
  return std::log1p(std::exp(kz)) / sharpness;
}

LocalSolution solve_from_start(const HingeBudgetProgram& program, double budget,
                               std::span<const double> start, const PenaltyOptions& opts) {
  opts.validate();
  if (!(budget >= 0.0)) throw ValidationError("budget", fmt::format("value {} must be >= 0", budget));
  if (start.size() != program.n) {
    throw ValidationError("start", fmt::format("length {} does not match n = {}", start.size(),
                                               program.n));
  }
  const std::size_t n = program.n;
  const std::vector<double> origin(n, 0.0);
  if (program.constraint(origin) > budget + opts.feasibility_tol) {
    throw InfeasibleError(fmt::format(
        "budget {} is infeasible: constraint at the all-zero profile is {}", budget,
        program.constraint(origin)));
  }

  LocalSolution sol;
  sol.a.assign(start.begin(), start.end());
  project_to_box(sol.a);

  std::vector<double> grad(n), trial(n), pg(n);
  double weight = opts.penalty_initial;
  double sharpness = opts.sharpness_initial;
  for (int round = 0; round < opts.rounds; ++round) {
    PenalizedObjective f(program, budget, weight, sharpness);
    double step = opts.step_initial;
    for (int it = 0; it < opts.max_iterations; ++it) {
      const double fa = f.value_and_gradient(sol.a, grad);

      double pg_norm2 = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double d = std::clamp(sol.a[k] - grad[k], 0.0, 1.0) - sol.a[k];
        pg_norm2 += d * d;
      }
      if (std::sqrt(pg_norm2) <= opts.projected_gradient_tol) break;
      ++sol.iterations;

      // Backtracking by halving; the trial step restarts at twice the last
      // accepted one, capped at step_initial.
      step = std::min(opts.step_initial, 2.0 * step);
      bool accepted = false;
      while (step > 1e-18) {
        double lin = 0.0;
        double dist2 = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          trial[k] = std::clamp(sol.a[k] - step * grad[k], 0.0, 1.0);
          const double d = trial[k] - sol.a[k];
          lin += grad[k] * d;
          dist2 += d * d;
        }
        if (f.value(trial) <= fa + lin + 0.5 * dist2 / step) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
      bool moved = false;
      for (std::size_t k = 0; k < n; ++k) {
        if (trial[k] != sol.a[k]) moved = true;
        sol.a[k] = trial[k];
      }
      if (!moved) break;
    }
    weight *= opts.penalty_growth;
    sharpness *= opts.sharpness_growth;
  }

  sol.constraint = program.constraint(sol.a);
  if (sol.constraint > budget + opts.feasibility_tol) {
    sol.iterations += restore_feasibility(program, budget, opts, sol.a);
    sol.constraint = program.constraint(sol.a);
  }
  if (sol.constraint > budget + opts.feasibility_tol) {
    // The origin is feasible; bisect for the last point of the segment that
    // meets the budget without the tolerance.
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < opts.repair_bisections; ++it) {
      const double mid = 0.5 * (lo + hi);
      for (std::size_t k = 0; k < n; ++k) trial[k] = mid * sol.a[k];
      if (program.constraint(trial) <= budget) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    for (double& v : sol.a) v *= lo;
    sol.repaired = true;
    sol.constraint = program.constraint(sol.a);
  }
  sol.feasible = sol.constraint <= budget + opts.feasibility_tol;
  sol.objective = program.objective(sol.a);
  return sol;
}

}  // namespace ecodrive
