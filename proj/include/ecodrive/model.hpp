#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ecodrive/types.hpp"

namespace ecodrive::model {

// Emission and travel-time evaluation for the parametric family
//
//   x_i(a) = xbar_i * alpha_i^(a_i + sum_{j in N_i} w_ij a_j)
//   y_i(a) = beta_i (a_i - avg_i)^2 + gamma_i sum_{j in N_i} w_ij a_j + ybar_i
//
// with avg_i the w-weighted mean of a over N_i (0 when N_i is empty).
// Profiles are passed as spans; an EcoProfile converts implicitly. Raw spans
// are trusted to lie in the box, only their length and the driver index are
// checked. Every function here is pure.

/// sum_{j in N_i} w_ij a_j
double neighbor_level(const Scenario& s, std::size_t i, std::span<const double> a);

/// Weighted average of a over N_i; 0 for an isolated driver.
double neighbor_avg(const Scenario& s, std::size_t i, std::span<const double> a);

double emission(const Scenario& s, std::size_t i, std::span<const double> a);
double travel_time(const Scenario& s, std::size_t i, std::span<const double> a);

/// d x_i / d a_i. Never positive.
double emission_grad_own(const Scenario& s, std::size_t i, std::span<const double> a);
/// d y_i / d a_i with the neighbor average held fixed.
double travel_time_grad_own(const Scenario& s, std::size_t i, std::span<const double> a);

/// theta_i x_i + (1 - theta_i) y_i. Throws ValidationError for theta_i outside [0,1].
double nominal_cost(const Scenario& s, std::size_t i, std::span<const double> a, double theta_i);
double nominal_cost_grad_own(const Scenario& s, std::size_t i, std::span<const double> a,
                             double theta_i);

/// Nominal cost minus the incentive u_i a_i. Throws ValidationError for u_i < 0.
double incentivized_cost(const Scenario& s, std::size_t i, std::span<const double> a,
                         double theta_i, double u_i);
double incentivized_cost_grad_own(const Scenario& s, std::size_t i, std::span<const double> a,
                                  double theta_i, double u_i);

/// sum_i x_i(a)
double total_emissions(const Scenario& s, std::span<const double> a);

// Full-profile derivatives used by the mechanism solver. Each writes a dense
// length-n row into `out`.

/// out[k] = d x_i / d a_k
void emission_gradient(const Scenario& s, std::size_t i, std::span<const double> a,
                       std::span<double> out);
/// out[k] = d/da_k of emission_grad_own(i)
void emission_grad_own_jacobian_row(const Scenario& s, std::size_t i, std::span<const double> a,
                                    std::span<double> out);
/// out[k] = d/da_k of travel_time_grad_own(i); independent of a.
void travel_time_grad_own_jacobian_row(const Scenario& s, std::size_t i, std::span<double> out);

/// d/da of total_emissions, length n.
std::vector<double> total_emissions_gradient(const Scenario& s, std::span<const double> a);

}  // namespace ecodrive::model
