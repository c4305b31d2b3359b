#pragma once

// Test-only reference implementations. They recompute the cost family from
// the raw weights and parameters in long double and never call into the
// library's model code, so agreement with them is meaningful.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "ecodrive/types.hpp"

namespace ecodrive::testing {

using Real = long double;

struct RefGame {
  std::size_t n = 0;
  std::vector<std::vector<Real>> w;
  std::vector<DriverParams> p;

  explicit RefGame(const Scenario& s) : n(s.size()), w(n, std::vector<Real>(n)), p(s.params().begin(), s.params().end()) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) w[i][j] = s.weight(i, j);
  }

  Real level(std::size_t i, const std::vector<Real>& a) const {
    Real t = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && w[i][j] > 0) t += w[i][j] * a[j];
    return t;
  }
  Real avg(std::size_t i, const std::vector<Real>& a) const {
    Real den = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && w[i][j] > 0) den += w[i][j];
    return den > 0 ? level(i, a) / den : 0;
  }
  Real x(std::size_t i, const std::vector<Real>& a) const {
    return p[i].xbar * std::pow(static_cast<Real>(p[i].alpha), a[i] + level(i, a));
  }
  Real y(std::size_t i, const std::vector<Real>& a) const {
    const Real d = a[i] - avg(i, a);
    return p[i].beta * d * d + p[i].gamma * level(i, a) + p[i].ybar;
  }
  Real c(std::size_t i, const std::vector<Real>& a, Real theta) const {
    return theta * x(i, a) + (1 - theta) * y(i, a);
  }
  Real ell(std::size_t i, const std::vector<Real>& a, Real theta, Real u) const {
    return c(i, a, theta) - u * a[i];
  }
  Real total(const std::vector<Real>& a) const {
    Real t = 0;
    for (std::size_t i = 0; i < n; ++i) t += x(i, a);
    return t;
  }
  // Own derivatives from the closed form.
  Real dx(std::size_t i, const std::vector<Real>& a) const {
    return x(i, a) * std::log(static_cast<Real>(p[i].alpha));
  }
  Real dy(std::size_t i, const std::vector<Real>& a) const {
    return 2 * p[i].beta * (a[i] - avg(i, a));
  }
  Real dc(std::size_t i, const std::vector<Real>& a, Real theta) const {
    return theta * dx(i, a) + (1 - theta) * dy(i, a);
  }
};

inline std::vector<Real> widen(std::span<const double> a) { return {a.begin(), a.end()}; }

/// argmin over [0,1] of ell_i along the own axis by dense grid then golden
/// refinement; ties resolve to the larger point.
inline Real ref_best_response(const RefGame& g, std::size_t i, std::vector<Real> a, Real theta,
                              Real u, int grid = 20000) {
  Real best = 0;
  Real best_val = INFINITY;
  for (int k = 0; k <= grid; ++k) {
    a[i] = static_cast<Real>(k) / grid;
    const Real v = g.ell(i, a, theta, u);
    if (v <= best_val) {
      best_val = v;
      best = a[i];
    }
  }
  Real lo = std::max<Real>(0, best - 1.0L / grid);
  Real hi = std::min<Real>(1, best + 1.0L / grid);
  for (int it = 0; it < 200; ++it) {
    const Real m1 = lo + (hi - lo) / 3;
    const Real m2 = hi - (hi - lo) / 3;
    a[i] = m1;
    const Real v1 = g.ell(i, a, theta, u);
    a[i] = m2;
    const Real v2 = g.ell(i, a, theta, u);
    if (v1 < v2) hi = m2; else lo = m1;
  }
  return (lo + hi) / 2;
}

/// Root of a continuous increasing function on [lo, hi] by bisection.
template <typename F>
Real bisect_root(F f, Real lo, Real hi) {
  for (int it = 0; it < 200; ++it) {
    const Real mid = (lo + hi) / 2;
    if (f(mid) < 0) lo = mid; else hi = mid;
  }
  return (lo + hi) / 2;
}

// Canonical single- and two-driver instances.
inline Scenario s1() { return Scenario(1, {1.0}, {DriverParams{}}); }
inline Scenario s2() { return Scenario(2, {1.0, 0.5, 0.5, 1.0}, {DriverParams{}, DriverParams{}}); }

/// Random instance with the simulation parameter ranges; isolated drivers
/// appear with probability zero_prob^(n-1).
inline Scenario random_scenario(std::mt19937_64& rng, std::size_t n, double zero_prob = 0.5) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<double> w(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w[i * n + j] = i == j ? 1.0 : (u01(rng) < zero_prob ? 0.0 : u01(rng));
  std::vector<DriverParams> p(n);
  for (auto& d : p) {
    d.alpha = 0.6 + 0.2 * u01(rng);
    d.beta = 2.0 + u01(rng);
    d.gamma = 3.0 + u01(rng);
  }
  return Scenario(n, std::move(w), std::move(p));
}

inline std::vector<double> random_unit_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u01(rng);
  return v;
}

inline TypeProfile random_theta(std::mt19937_64& rng, std::size_t n) {
  return TypeProfile(random_unit_vector(rng, n));
}

}  // namespace ecodrive::testing
