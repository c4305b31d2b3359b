#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecodrive {

/// Raised when an input violates a domain invariant. `field()` names the
/// offending field, e.g. "weights diagonal" or "theta[3]".
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& message);

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Per-driver parameters of the emission and travel-time families.
struct DriverParams {
  double alpha = 0.7;  // emission decay base, in (0,1)
  double beta = 2.5;   // conformity weight
  double gamma = 3.5;  // neighborhood level weight
  double xbar = 4.0;   // emissions at the all-zero profile
  double ybar = 1.0;   // travel time at the all-zero profile

  bool operator==(const DriverParams&) const = default;
};

void validate(const DriverParams& p, std::size_t driver);

/// Immutable game instance. Weights are stored row-major; the neighbor
/// sets N_i = { j != i : w_ij > 0 } are derived once at construction.
class Scenario {
 public:
  Scenario(std::size_t n, std::vector<double> weights, std::vector<DriverParams> params);

  std::size_t size() const noexcept { return n_; }
  double weight(std::size_t i, std::size_t j) const { return weights_[i * n_ + j]; }
  std::span<const double> weights() const noexcept { return weights_; }
  const DriverParams& params(std::size_t i) const { return params_[i]; }
  std::span<const DriverParams> params() const noexcept { return params_; }

  std::span<const std::size_t> neighbors(std::size_t i) const { return neighbors_[i]; }
  /// Sum of w_ij over the neighbor set (0 for an isolated driver).
  double neighbor_weight_sum(std::size_t i) const { return neighbor_weight_sum_[i]; }

  bool operator==(const Scenario& other) const {
    return n_ == other.n_ && weights_ == other.weights_ && params_ == other.params_;
  }

 private:
  std::size_t n_;
  std::vector<double> weights_;
  std::vector<DriverParams> params_;
  std::vector<std::vector<std::size_t>> neighbors_;
  std::vector<double> neighbor_weight_sum_;
};

namespace detail {

/// Fixed-length real vector whose entries are checked on construction.
/// Values are never clamped; out-of-range entries raise ValidationError.
template <typename Tag>
class CheckedVector {
 public:
  CheckedVector() = default;
  explicit CheckedVector(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) Tag::check(values_[i], i);
  }
  CheckedVector(std::initializer_list<double> values)
      : CheckedVector(std::vector<double>(values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::span<const double> view() const noexcept { return values_; }
  operator std::span<const double>() const noexcept { return values_; }

  /// Copy with entry i replaced (checked).
  CheckedVector with(std::size_t i, double value) const {
    Tag::check(value, i);
    CheckedVector out = *this;
    out.values_.at(i) = value;
    return out;
  }

  bool operator==(const CheckedVector&) const = default;

 private:
  std::vector<double> values_;
};

struct ThetaTag {
  static void check(double v, std::size_t i);
};
struct EcoTag {
  static void check(double v, std::size_t i);
};
struct IncentiveTag {
  static void check(double v, std::size_t i);
};

}  // namespace detail

/// Driver types theta in [0,1]^n.
using TypeProfile = detail::CheckedVector<detail::ThetaTag>;
/// Eco-driving levels a in [0,1]^n.
using EcoProfile = detail::CheckedVector<detail::EcoTag>;
/// Incentive rates u in R_+^n.
using IncentiveVector = detail::CheckedVector<detail::IncentiveTag>;

/// Throws ValidationError unless v lies in [0,1]; `name` is used in the message.
void check_unit_interval(double v, const std::string& name);

}  // namespace ecodrive
