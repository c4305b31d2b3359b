#include "ecodrive/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace ecodrive::model {
namespace {

void check_access(const Scenario& s, std::size_t i, std::span<const double> a) {
  if (i >= s.size()) {
    throw std::out_of_range(fmt::format("driver index {} out of range for n = {}", i, s.size()));
  }
  if (a.size() != s.size()) {
    throw ValidationError("a", fmt::format("profile length {} does not match n = {}", a.size(),
                                           s.size()));
  }
}

void check_theta(double theta_i) { check_unit_interval(theta_i, "theta_i"); }

double emission_exponent(const Scenario& s, std::size_t i, std::span<const double> a) {
  return a[i] + neighbor_level(s, i, a);
}

double avg_unchecked(const Scenario& s, std::size_t i, std::span<const double> a) {
  const double wsum = s.neighbor_weight_sum(i);
  if (wsum == 0.0) return 0.0;
  return neighbor_level(s, i, a) / wsum;
}

}  // namespace

double neighbor_level(const Scenario& s, std::size_t i, std::span<const double> a) {
  check_access(s, i, a);
  double level = 0.0;
  for (std::size_t j : s.neighbors(i)) level += s.weight(i, j) * a[j];
  return level;
}

double neighbor_avg(const Scenario& s, std::size_t i, std::span<const double> a) {
  check_access(s, i, a);
  return avg_unchecked(s, i, a);
}

double emission(const Scenario& s, std::size_t i, std::span<const double> a) {
  check_access(s, i, a);
  const auto& p = s.params(i);
  return p.xbar * std::pow(p.alpha, emission_exponent(s, i, a));
}

double travel_time(const Scenario& s, std::size_t i, std::span<const double> a) {
  check_access(s, i, a);
  const auto& p = s.params(i);
  const double gap = a[i] - avg_unchecked(s, i, a);
  return p.beta * gap * gap + p.gamma * neighbor_level(s, i, a) + p.ybar;
}

double emission_grad_own(const Scenario& s, std::size_t i, std::span<const double> a) {
  check_access(s, i, a);
  const auto& p = s.params(i);
  return p.xbar * std::log(p.alpha) * std::pow(p.alpha, emission_exponent(s, i, a));
}

double travel_time_grad_own(const Scenario& s, std::size_t i, std::span<const double> a) {
  check_access(s, i, a);
  return 2.0 * s.params(i).beta * (a[i] - avg_unchecked(s, i, a));
}

double nominal_cost(const Scenario& s, std::size_t i, std::span<const double> a, double theta_i) {
  check_theta(theta_i);
  return theta_i * emission(s, i, a) + (1.0 - theta_i) * travel_time(s, i, a);
}

double nominal_cost_grad_own(const Scenario& s, std::size_t i, std::span<const double> a,
                             double theta_i) {
  check_theta(theta_i);
  return theta_i * emission_grad_own(s, i, a) + (1.0 - theta_i) * travel_time_grad_own(s, i, a);
}

double incentivized_cost(const Scenario& s, std::size_t i, std::span<const double> a,
                         double theta_i, double u_i) {
  if (!(u_i >= 0.0)) throw ValidationError("u_i", fmt::format("value {} must be >= 0", u_i));
  return nominal_cost(s, i, a, theta_i) - u_i * a[i];
}

double incentivized_cost_grad_own(const Scenario& s, std::size_t i, std::span<const double> a,
                                  double theta_i, double u_i) {
  if (!(u_i >= 0.0)) throw ValidationError("u_i", fmt::format("value {} must be >= 0", u_i));
  return nominal_cost_grad_own(s, i, a, theta_i) - u_i;
}

double total_emissions(const Scenario& s, std::span<const double> a) {
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) total += emission(s, i, a);
  return total;
}

void emission_gradient(const Scenario& s, std::size_t i, std::span<const double> a,
                       std::span<double> out) {
  // d x_i / d a_k = x_i ln(alpha_i) * (1 if k == i, w_ik if k in N_i, else 0)
  const double scale = emission_grad_own(s, i, a);
  std::fill(out.begin(), out.end(), 0.0);
  out[i] = scale;
  for (std::size_t k : s.neighbors(i)) out[k] = scale * s.weight(i, k);
}

void emission_grad_own_jacobian_row(const Scenario& s, std::size_t i, std::span<const double> a,
                                    std::span<double> out) {
  const double scale = emission_grad_own(s, i, a) * std::log(s.params(i).alpha);
  std::fill(out.begin(), out.end(), 0.0);
  out[i] = scale;
  for (std::size_t k : s.neighbors(i)) out[k] = scale * s.weight(i, k);
}

void travel_time_grad_own_jacobian_row(const Scenario& s, std::size_t i, std::span<double> out) {
  if (i >= s.size()) throw std::out_of_range("driver index out of range");
  const double two_beta = 2.0 * s.params(i).beta;
  std::fill(out.begin(), out.end(), 0.0);
  out[i] = two_beta;
  const double wsum = s.neighbor_weight_sum(i);
  if (wsum == 0.0) return;
  for (std::size_t k : s.neighbors(i)) out[k] = -two_beta * s.weight(i, k) / wsum;
}

std::vector<double> total_emissions_gradient(const Scenario& s, std::span<const double> a) {
  const std::size_t n = s.size();
  std::vector<double> grad(n, 0.0);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    emission_gradient(s, i, a, row);
    for (std::size_t k = 0; k < n; ++k) grad[k] += row[k];
  }
  return grad;
}

}  // namespace ecodrive::model
