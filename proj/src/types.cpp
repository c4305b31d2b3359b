#include "ecodrive/types.hpp"

#include <cmath>

#include <fmt/format.h>

namespace ecodrive {

ValidationError::ValidationError(std::string field, const std::string& message)
    : std::invalid_argument(fmt::format("{}: {}", field, message)), field_(std::move(field)) {}

void check_unit_interval(double v, const std::string& name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError(name, fmt::format("value {} outside [0,1]", v));
  }
}

void validate(const DriverParams& p, std::size_t driver) {
  if (!(p.alpha > 0.0 && p.alpha < 1.0)) {
    throw ValidationError(fmt::format("alpha[{}]", driver),
                          fmt::format("value {} outside (0,1)", p.alpha));
  }
  if (!(p.beta >= 0.0) || !std::isfinite(p.beta)) {
    throw ValidationError(fmt::format("beta[{}]", driver),
                          fmt::format("value {} must be finite and >= 0", p.beta));
  }
  if (!(p.gamma >= 0.0) || !std::isfinite(p.gamma)) {
    throw ValidationError(fmt::format("gamma[{}]", driver),
                          fmt::format("value {} must be finite and >= 0", p.gamma));
  }
  if (!(p.xbar > 0.0) || !std::isfinite(p.xbar)) {
    throw ValidationError(fmt::format("xbar[{}]", driver),
                          fmt::format("value {} must be finite and > 0", p.xbar));
  }
  if (!(p.ybar > 0.0) || !std::isfinite(p.ybar)) {
    throw ValidationError(fmt::format("ybar[{}]", driver),
                          fmt::format("value {} must be finite and > 0", p.ybar));
  }
}

Scenario::Scenario(std::size_t n, std::vector<double> weights, std::vector<DriverParams> params)
    : n_(n), weights_(std::move(weights)), params_(std::move(params)) {
  if (n_ == 0) throw ValidationError("n", "driver count must be positive");
  if (weights_.size() != n_ * n_) {
    throw ValidationError("weights", fmt::format("expected {}x{} entries, got {}", n_, n_,
                                                 weights_.size()));
  }
  if (params_.size() != n_) {
    throw ValidationError("params", fmt::format("expected {} drivers, got {}", n_, params_.size()));
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (weight(i, i) != 1.0) {
      throw ValidationError("weights diagonal",
                            fmt::format("w[{}][{}] = {} but must equal 1", i, i, weight(i, i)));
    }
    for (std::size_t j = 0; j < n_; ++j) {
      if (i == j) continue;
      const double w = weight(i, j);
      if (!(w >= 0.0 && w <= 1.0)) {
        throw ValidationError(fmt::format("weights[{}][{}]", i, j),
                              fmt::format("value {} outside [0,1]", w));
      }
    }
    validate(params_[i], i);
  }

  neighbors_.resize(n_);
  neighbor_weight_sum_.assign(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      if (j != i && weight(i, j) > 0.0) {
        neighbors_[i].push_back(j);
        neighbor_weight_sum_[i] += weight(i, j);
      }
    }
  }
}

namespace detail {

void ThetaTag::check(double v, std::size_t i) { check_unit_interval(v, fmt::format("theta[{}]", i)); }

void EcoTag::check(double v, std::size_t i) { check_unit_interval(v, fmt::format("a[{}]", i)); }

void IncentiveTag::check(double v, std::size_t i) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw ValidationError(fmt::format("u[{}]", i),
                          fmt::format("value {} must be finite and >= 0", v));
  }
}

}  // namespace detail
}  // namespace ecodrive
