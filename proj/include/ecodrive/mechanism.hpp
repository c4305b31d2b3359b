#pragma once

#include <string>
#include <string_view>

#include "ecodrive/optimizer.hpp"
#include "ecodrive/types.hpp"

namespace ecodrive {

enum class Mode { first_best, second_best };
enum class SolveStyle { local, global };

std::string_view to_string(Mode mode);
std::string_view to_string(SolveStyle style);
/// Accepts "first-best"/"first_best" and "second-best"/"second_best".
Mode parse_mode(std::string_view text);
SolveStyle parse_style(std::string_view text);

struct SolverMeta {
  std::string method;     // "projected_gradient" or "grid"
  SolveStyle style = SolveStyle::local;
  int starts = 0;         // starts tried (grid points for the grid method)
  int best_start = 0;     // index of the winning start
  int iterations = 0;     // iterations of the winning start
  bool repaired = false;  // winning start needed the feasibility repair
};

struct MechanismOutcome {
  EcoProfile f;                // recommendation
  IncentiveVector u;           // incentive rates
  double objective = 0.0;      // total emissions at f
  double constraint_value = 0.0;
  double budget = 0.0;
  Mode mode = Mode::first_best;
  SolverMeta solver_meta;
};

/// sum_i max(0, D_{a_i} c_i(a, theta_i)): budget needed to implement a as a
/// Nash equilibrium when types are known.
double first_best_constraint(const Scenario& s, const TypeProfile& theta, const EcoProfile& a);

/// sum_i max(0, D_{a_i} y_i(a)): type-independent budget term.
double second_best_constraint(const Scenario& s, const EcoProfile& a);

/// u_i = max(0, D_{a_i} c_i(f, theta_i)). Zero for drivers whose cost already
/// decreases at f.
IncentiveVector first_best_incentive(const Scenario& s, const TypeProfile& theta,
                                     const EcoProfile& f);

/// u_i = max(0, D_{a_i} y_i(f)); never looks at types.
IncentiveVector second_best_incentive(const Scenario& s, const EcoProfile& f);

/// The mode's incentive rule evaluated at f. `theta` is unused for second_best.
IncentiveVector incentive_for(const Scenario& s, const TypeProfile& theta, const EcoProfile& f,
                              Mode mode);
double constraint_for(const Scenario& s, const TypeProfile& theta, const EcoProfile& f, Mode mode);

/// The emission-minimization program of the given mode as a hinge-budget
/// program. In second_best mode theta is not captured.
HingeBudgetProgram make_program(const Scenario& s, const TypeProfile& theta, Mode mode);

/// Minimizes total emissions over [0,1]^n subject to the mode's hinge budget
/// constraint and pairs the minimizer with the mode's incentive rule.
///
/// The local style starts from the all-zero profile only. The global style
/// adds the all-one and all-half profiles plus `opts.random_starts` uniform
/// starts drawn from SplitMix64(opts.seed), and keeps the feasible candidate
/// with the least objective (ties go to the lexicographically larger profile).
///
/// Throws ValidationError for a negative budget and InfeasibleError when no
/// feasible point exists.
MechanismOutcome solve_mechanism(const Scenario& s, const TypeProfile& theta, double budget,
                                 Mode mode, SolveStyle style, const PenaltyOptions& opts = {});

/// Exhaustive grid scan for n <= 3, used as an oracle for solve_mechanism.
/// Returns the feasible grid point of least total emissions; ties go to the
/// lexicographically larger profile. `grid_step` must divide 1.
MechanismOutcome brute_force_mechanism(const Scenario& s, const TypeProfile& theta, double budget,
                                       Mode mode, double grid_step,
                                       double feasibility_tol = 1e-6);

}  // namespace ecodrive
