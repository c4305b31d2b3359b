#include "ecodrive/scenario.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ecodrive/rng.hpp"

namespace ecodrive {
namespace {

using nlohmann::json;

void check_interval(const Interval& r, const char* name, double min, double max, bool open_min,
                    bool open_max) {
  const bool lo_ok = open_min ? r.lo > min : r.lo >= min;
  const bool hi_ok = open_max ? r.hi < max : r.hi <= max;
  if (!(r.lo <= r.hi) || !lo_ok || !hi_ok) {
    throw ValidationError(name, fmt::format("invalid interval [{}, {}]", r.lo, r.hi));
  }
}

std::string real(double v) { return fmt::format("{:.17g}", v); }

std::string real_array(const std::vector<double>& values) {
  std::string out = "[";
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out += ", ";
    out += real(values[k]);
  }
  return out + "]";
}

const json& require(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ParseError(key, "missing field");
  return *it;
}

double number_at(const json& v, const std::string& field) {
  if (!v.is_number()) throw ParseError(field, "expected a number");
  return v.get<double>();
}

std::vector<double> real_vector(const json& doc, const char* key, std::size_t n) {
  const json& v = require(doc, key);
  if (!v.is_array()) throw ParseError(key, "expected an array");
  if (v.size() != n) {
    throw ValidationError(key, fmt::format("expected {} entries, got {}", n, v.size()));
  }
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = number_at(v[k], fmt::format("{}[{}]", key, k));
  return out;
}

}  // namespace

void GenerationSpec::validate() const {
  if (n == 0) throw ValidationError("n", "driver count must be positive");
  if (!(zero_prob >= 0.0 && zero_prob <= 1.0)) {
    throw ValidationError("zero_prob", fmt::format("value {} outside [0,1]", zero_prob));
  }
  const double inf = std::numeric_limits<double>::infinity();
  check_interval(alpha_range, "alpha_range", 0.0, 1.0, true, true);
  check_interval(beta_range, "beta_range", 0.0, inf, false, true);
  check_interval(gamma_range, "gamma_range", 0.0, inf, false, true);
  check_interval(theta_range, "theta_range", 0.0, 1.0, false, false);
  if (!(xbar > 0.0)) throw ValidationError("xbar", "must be > 0");
  if (!(ybar > 0.0)) throw ValidationError("ybar", "must be > 0");
}

ScenarioWithTypes generate(const GenerationSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n;
  SplitMix64 rng(spec.seed);

  std::vector<double> weights(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        weights[i * n + j] = 1.0;
        continue;
      }
      const double zero_draw = rng.uniform01();
      const double value = rng.uniform01();
      weights[i * n + j] = zero_draw < spec.zero_prob ? 0.0 : value;
    }
  }

  std::vector<DriverParams> params(n);
  for (auto& p : params) {
    p.alpha = rng.uniform(spec.alpha_range.lo, spec.alpha_range.hi);
    p.beta = rng.uniform(spec.beta_range.lo, spec.beta_range.hi);
    p.gamma = rng.uniform(spec.gamma_range.lo, spec.gamma_range.hi);
    p.xbar = spec.xbar;
    p.ybar = spec.ybar;
  }

  std::vector<double> theta(n);
  for (double& t : theta) t = rng.uniform(spec.theta_range.lo, spec.theta_range.hi);

  return {Scenario(n, std::move(weights), std::move(params)), TypeProfile(std::move(theta))};
}

std::string to_json(const Scenario& s, const TypeProfile& theta) {
  if (theta.size() != s.size()) throw ValidationError("theta", "length does not match n");
  const std::size_t n = s.size();
  std::vector<double> alpha(n), beta(n), gamma(n), xbar(n), ybar(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = s.params(i);
    alpha[i] = p.alpha;
    beta[i] = p.beta;
    gamma[i] = p.gamma;
    xbar[i] = p.xbar;
    ybar[i] = p.ybar;
  }

  std::string out = "{\n  \"version\": 1,\n";
  out += fmt::format("  \"n\": {},\n  \"weights\": [\n", n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = s.weights().subspan(i * n, n);
    out += "    " + real_array({row.begin(), row.end()});
    out += i + 1 < n ? ",\n" : "\n";
  }
  out += "  ],\n";
  out += "  \"alpha\": " + real_array(alpha) + ",\n";
  out += "  \"beta\": " + real_array(beta) + ",\n";
  out += "  \"gamma\": " + real_array(gamma) + ",\n";
  out += "  \"xbar\": " + real_array(xbar) + ",\n";
  out += "  \"ybar\": " + real_array(ybar) + ",\n";
  out += "  \"theta\": " + real_array(theta.values()) + "\n}\n";
  return out;
}

ScenarioWithTypes from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("document", e.what());
  }
  if (!doc.is_object()) throw ParseError("document", "expected a JSON object");

  const json& version = require(doc, "version");
  if (!version.is_number_integer() || version.get<long long>() != 1) {
    throw ParseError("version", "unsupported scenario file version");
  }
  const json& n_field = require(doc, "n");
  if (!n_field.is_number_integer() || n_field.get<long long>() <= 0) {
    throw ParseError("n", "expected a positive integer");
  }
  const auto n = static_cast<std::size_t>(n_field.get<long long>());

  const json& rows = require(doc, "weights");
  if (!rows.is_array()) throw ParseError("weights", "expected an array of rows");
  if (rows.size() != n) {
    throw ValidationError("weights", fmt::format("expected {} rows, got {}", n, rows.size()));
  }
  std::vector<double> weights;
  weights.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!rows[i].is_array()) throw ParseError(fmt::format("weights[{}]", i), "expected an array");
    if (rows[i].size() != n) {
      throw ValidationError(fmt::format("weights[{}]", i),
                            fmt::format("expected {} entries, got {}", n, rows[i].size()));
    }
    for (std::size_t j = 0; j < n; ++j) {
      weights.push_back(number_at(rows[i][j], fmt::format("weights[{}][{}]", i, j)));
    }
  }

  const auto alpha = real_vector(doc, "alpha", n);
  const auto beta = real_vector(doc, "beta", n);
  const auto gamma = real_vector(doc, "gamma", n);
  const auto xbar = real_vector(doc, "xbar", n);
  const auto ybar = real_vector(doc, "ybar", n);
  auto theta = real_vector(doc, "theta", n);

  std::vector<DriverParams> params(n);
  for (std::size_t i = 0; i < n; ++i) params[i] = {alpha[i], beta[i], gamma[i], xbar[i], ybar[i]};
  Scenario scenario(n, std::move(weights), std::move(params));
  return {std::move(scenario), TypeProfile(std::move(theta))};
}

void save(const Scenario& s, const TypeProfile& theta, const std::filesystem::path& path) {
  const std::string text = to_json(s, theta);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
  out << text;
  if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
}

ScenarioWithTypes load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}' for reading", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

}  // namespace ecodrive
