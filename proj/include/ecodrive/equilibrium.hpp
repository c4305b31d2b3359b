#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ecodrive/types.hpp"

namespace ecodrive {

struct SolverOptions {
  double tol_profile = 1e-6;  // max profile change per sweep at convergence
  double tol_deriv = 1e-8;    // own-derivative tolerance of a best response
  int max_sweeps = 500;
  int grid_points = 101;      // audit grids

  void validate() const;
};

struct NashResult {
  EcoProfile profile;
  bool converged = false;
  int iterations = 0;     // sweeps performed
  double residual = 0.0;  // max |change| over the last sweep
};

/// Minimizer of the incentivized cost of driver i over a_i in [0,1] with the
/// other entries of `a_others` fixed (slot i is ignored). Uses the sign of
/// the own-derivative, which is non-decreasing by convexity; on a flat
/// optimal interval the largest minimizer is returned.
double best_response(const Scenario& s, std::size_t i, std::span<const double> a_others,
                     double theta_i, double u_i, const SolverOptions& opts = {});

/// Gauss-Seidel iterated best response in ascending driver order, starting
/// from `init`. Non-convergence is reported through `converged`, not thrown.
NashResult nash_solve(const Scenario& s, const TypeProfile& theta, const IncentiveVector& u,
                      const EcoProfile& init, const SolverOptions& opts = {});

/// For each driver, the largest cost decrease available by a unilateral move
/// to a point of the `grid_points`-point grid on [0,1], floored at 0.
std::vector<double> epsilon_nash_check(const Scenario& s, const TypeProfile& theta,
                                       const IncentiveVector& u, const EcoProfile& a,
                                       const SolverOptions& opts = {});

}  // namespace ecodrive
