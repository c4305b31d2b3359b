#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>

#include "ecodrive/types.hpp"

namespace ecodrive {

/// Malformed scenario file; `field()` names the offending key.
class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct GenerationSpec {
  std::size_t n = 10;
  std::uint64_t seed = 0;
  double zero_prob = 0.5;
  Interval alpha_range{0.6, 0.8};
  Interval beta_range{2.0, 3.0};
  Interval gamma_range{3.0, 4.0};
  Interval theta_range{0.0, 0.4};
  double xbar = 4.0;
  double ybar = 1.0;

  void validate() const;
};

struct ScenarioWithTypes {
  Scenario scenario;
  TypeProfile theta;
};

/// Deterministic instance generation driven by SplitMix64(spec.seed).
///
/// Draw order:
///   1. off-diagonal weights in row-major order, two draws per entry: the
///      first decides zero (draw < zero_prob), the second is the weight
///      used otherwise;
///   2. per driver in index order: alpha, beta, gamma;
///   3. theta for each driver in index order.
/// Each ranged value is lo + (hi - lo) * u with u in [0,1).
ScenarioWithTypes generate(const GenerationSpec& spec);

/// JSON text of the scenario file (version 1). Reals use 17 significant
/// digits so a load reproduces every field bit for bit.
std::string to_json(const Scenario& s, const TypeProfile& theta);
ScenarioWithTypes from_json(const std::string& text);

/// Throws std::runtime_error when the file cannot be written.
void save(const Scenario& s, const TypeProfile& theta, const std::filesystem::path& path);
/// Throws std::runtime_error when the file cannot be read, ParseError when it
/// is malformed and ValidationError when it violates a scenario invariant.
ScenarioWithTypes load(const std::filesystem::path& path);

}  // namespace ecodrive
