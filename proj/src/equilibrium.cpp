#include "ecodrive/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ecodrive/model.hpp"

namespace ecodrive {
namespace {

void check_dims(const Scenario& s, std::size_t got, const char* field) {
  if (got != s.size()) {
    throw ValidationError(field, fmt::format("length {} does not match n = {}", got, s.size()));
  }
}

}  // namespace

void SolverOptions::validate() const {
  if (!(tol_profile > 0.0)) throw ValidationError("tol_profile", "must be > 0");
  if (!(tol_deriv > 0.0)) throw ValidationError("tol_deriv", "must be > 0");
  if (max_sweeps <= 0) throw ValidationError("max_sweeps", "must be > 0");
  if (grid_points < 2) throw ValidationError("grid_points", "must be >= 2");
}

double best_response(const Scenario& s, std::size_t i, std::span<const double> a_others,
                     double theta_i, double u_i, const SolverOptions& opts) {
  check_dims(s, a_others.size(), "a_others");
  std::vector<double> a(a_others.begin(), a_others.end());
  auto deriv = [&](double ai) {
    a[i] = ai;
    return model::incentivized_cost_grad_own(s, i, a, theta_i, u_i);
  };

  if (deriv(1.0) <= 0.0) return 1.0;
  if (deriv(0.0) > 0.0) return 0.0;

  // Invariant: deriv(lo) <= 0 < deriv(hi). lo converges to the largest
  // point of {deriv <= 0}, which is the largest minimizer.
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double d = deriv(mid);
    if (d <= 0.0) {
      lo = mid;
      // An exact zero may sit inside a flat interval; keep pushing right.
      if (d != 0.0 && d >= -opts.tol_deriv) break;
    } else {
      hi = mid;
      if (d <= opts.tol_deriv) {
        // deriv(hi) is tiny and the root lies in [lo, hi]; a strictly
        // increasing derivative crosses zero only once, so either end works.
        lo = mid;
        break;
      }
    }
  }
  return lo;
}

NashResult nash_solve(const Scenario& s, const TypeProfile& theta, const IncentiveVector& u,
                      const EcoProfile& init, const SolverOptions& opts) {
  opts.validate();
  check_dims(s, theta.size(), "theta");
  check_dims(s, u.size(), "u");
  check_dims(s, init.size(), "init");

  std::vector<double> a = init.values();
  NashResult result;
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double next = best_response(s, i, a, theta[i], u[i], opts);
      change = std::max(change, std::abs(next - a[i]));
      a[i] = next;
    }
    result.iterations = sweep;
    result.residual = change;
    if (change <= opts.tol_profile) {
      result.converged = true;
      break;
    }
  }
  result.profile = EcoProfile(std::move(a));
  return result;
}

std::vector<double> epsilon_nash_check(const Scenario& s, const TypeProfile& theta,
                                       const IncentiveVector& u, const EcoProfile& a,
                                       const SolverOptions& opts) {
  opts.validate();
  check_dims(s, theta.size(), "theta");
  check_dims(s, u.size(), "u");
  check_dims(s, a.size(), "a");

  std::vector<double> improvement(s.size(), 0.0);
  std::vector<double> probe = a.values();
  const int g = opts.grid_points;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double current = model::incentivized_cost(s, i, a, theta[i], u[i]);
    double best = 0.0;
    for (int k = 0; k < g; ++k) {
      probe[i] = static_cast<double>(k) / (g - 1);
      best = std::max(best, current - model::incentivized_cost(s, i, probe, theta[i], u[i]));
    }
    probe[i] = a[i];
    improvement[i] = best;
  }
  return improvement;
}

}  // namespace ecodrive
