#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace respclass {

using FeatureVector = std::vector<double>;

// Sign convention used everywhere: sign(0) = +1.
inline int sign_pm(double v) { return v >= 0.0 ? +1 : -1; }

// One randomized-experiment record. t and y are +/-1 coded.
struct Observation {
  FeatureVector x;
  int t = 0;
  int y = 0;
};

// Known treatment-assignment probability P(T=+1 | X): either a designed
// constant or a per-row value. Values must lie strictly inside (0, 1).
class PropensitySpec {
 public:
  PropensitySpec() : e_(0.5) {}

  static PropensitySpec constant(double e);
  static PropensitySpec per_observation(std::vector<double> e);

  bool is_constant() const { return std::holds_alternative<double>(e_); }
  double constant_value() const { return std::get<double>(e_); }
  const std::vector<double>& values() const { return std::get<std::vector<double>>(e_); }

  // P(T=+1) for a given row; row is ignored for constant specs.
  double e_at(std::size_t row) const;

 private:
  std::variant<double, std::vector<double>> e_;
};

struct Dataset {
  std::vector<Observation> observations;
  PropensitySpec propensity;  // defaults to Constant(0.5)
  std::size_t d = 0;

  std::size_t n() const { return observations.size(); }
};

// Counterfactual record for synthetic data: both potential outcomes plus the
// responder label r (+1 responder, -1 non-responder) and the non-responder
// outcome a.
struct GroundTruthUnit {
  FeatureVector x;
  int y_plus = 0;
  int y_minus = 0;
  int r = 0;
  int a = 0;
};

// Relative false-positive cost in [0, 1].
class Theta {
 public:
  Theta() = default;
  explicit Theta(double v);
  double value() const { return v_; }

 private:
  double v_ = 0.5;
};

// Probability that the realized treatment arm was assigned:
// Q = 1/2 + (e - 1/2) * t, so Q = e when t = +1 and 1 - e when t = -1.
double q_of(const Observation& obs, const PropensitySpec& propensity, std::size_t row);

// Q for every row of a dataset.
std::vector<double> q_values(const Dataset& ds);

struct ValidationReport {
  bool ok = false;
  std::vector<std::string> errors;
  // Row counts by (t, y) cell, indexed [t==+1][y==+1].
  std::array<std::array<long long, 2>, 2> cells{};
  std::size_t n = 0;
  std::size_t d = 0;
};

// Structural checks: nonempty, consistent dimension, +/-1 labels, finite
// features, propensity inside (0,1) and length-matched. Does not throw;
// errors carry row numbers.
ValidationReport validate_dataset(const Dataset& ds);

// Throws DataError with the joined report errors when validation fails.
void require_valid(const Dataset& ds);

}  // namespace respclass
