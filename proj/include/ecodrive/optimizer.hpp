#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecodrive {

/// Raised when no feasible point can be certified, i.e. even the all-zero
/// profile violates the budget constraint.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// minimize objective(a) over a in [0,1]^n
/// subject to sum_r max(0, g_r(a)) <= budget
///
/// The hinge terms g and their Jacobian are supplied by the caller, which
/// keeps the solver independent of the cost family.
struct HingeBudgetProgram {
  std::size_t n = 0;
  std::size_t terms = 0;
  std::function<double(std::span<const double>)> objective;
  std::function<void(std::span<const double>, std::span<double>)> objective_gradient;
  /// Writes g(a), length `terms`.
  std::function<void(std::span<const double>, std::span<double>)> hinge_terms;
  /// Writes the terms x n Jacobian of g, row-major.
  std::function<void(std::span<const double>, std::span<double>)> hinge_jacobian;

  /// sum_r max(0, g_r(a)), the exact (unsmoothed) constraint value.
  double constraint(std::span<const double> a) const;
};

/// Penalty continuation schedule. Round r uses penalty weight
/// penalty_initial * penalty_growth^r and softplus sharpness
/// sharpness_initial * sharpness_growth^r.
struct PenaltyOptions {
  int rounds = 5;
  double penalty_initial = 1.0;
  double penalty_growth = 10.0;
  double sharpness_initial = 10.0;
  double sharpness_growth = 3.0;
  double step_initial = 0.1;           // backtracking starts here (cap)
  int max_iterations = 10000;          // per round
  double projected_gradient_tol = 1e-7;
  double feasibility_tol = 1e-6;
  int restore_iterations = 10000;      // exact-hinge descent before repair; 0 disables
  int repair_bisections = 60;
  int random_starts = 5;               // extra starts in global style
  std::uint64_t seed = 0x5eedULL;      // random starts

  void validate() const;
};

struct LocalSolution {
  std::vector<double> a;
  double objective = 0.0;
  double constraint = 0.0;  // exact hinge value at a
  bool feasible = false;
  bool repaired = false;    // shrunk toward the origin to restore feasibility
  int iterations = 0;       // projected-gradient iterations over all rounds
};

/// softplus_k(z) = log(1 + exp(k z)) / k, computed without overflow.
double softplus(double z, double sharpness);

/// Projected-gradient descent on the box with an exterior quadratic penalty
/// on the softplus-smoothed constraint, followed by exact certification and,
/// if needed, descend on the exact violation and, failing that, repair by
/// bisection along the segment toward the origin.
/// Throws InfeasibleError when the origin itself violates the budget.
LocalSolution solve_from_start(const HingeBudgetProgram& program, double budget,
                               std::span<const double> start, const PenaltyOptions& opts);

}  // namespace ecodrive
