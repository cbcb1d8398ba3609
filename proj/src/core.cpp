#include "respclass/core.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "respclass/errors.hpp"

namespace respclass {

PropensitySpec PropensitySpec::constant(double e) {
  if (!(e > 0.0 && e < 1.0)) {
    throw std::invalid_argument("propensity must lie strictly inside (0,1)");
  }
  PropensitySpec spec;
  spec.e_ = e;
  return spec;
}

PropensitySpec PropensitySpec::per_observation(std::vector<double> e) {
  for (double v : e) {
    if (!(v > 0.0 && v < 1.0)) {
      throw std::invalid_argument("propensity must lie strictly inside (0,1)");
    }
  }
  PropensitySpec spec;
  spec.e_ = std::move(e);
  return spec;
}

double PropensitySpec::e_at(std::size_t row) const {
  if (is_constant()) return std::get<double>(e_);
  const auto& v = std::get<std::vector<double>>(e_);
  if (row >= v.size()) {
    throw std::out_of_range("propensity row index out of range");
  }
  return v[row];
}

Theta::Theta(double v) : v_(v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument("theta must lie in [0,1]");
  }
}

double q_of(const Observation& obs, const PropensitySpec& propensity,
            std::size_t row) {
  const double e = propensity.e_at(row);
  return 0.5 + (e - 0.5) * static_cast<double>(obs.t);
}

std::vector<double> q_values(const Dataset& ds) {
  std::vector<double> q(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    q[i] = q_of(ds.observations[i], ds.propensity, i);
  }
  return q;
}

namespace {

bool finite_features(const FeatureVector& x) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace

ValidationReport validate_dataset(const Dataset& ds) {
  constexpr std::size_t kMaxReported = 20;
  ValidationReport report;
  report.n = ds.n();
  report.d = ds.d;

  auto add_error = [&report](const std::string& msg) {
    if (report.errors.size() < kMaxReported) {
      report.errors.push_back(msg);
    } else if (report.errors.size() == kMaxReported) {
      report.errors.push_back("further errors suppressed");
    }
  };

  if (ds.n() == 0) add_error("empty dataset");

  if (!ds.propensity.is_constant() &&
      ds.propensity.values().size() != ds.n()) {
    add_error("propensity length mismatch");
  }

  for (std::size_t i = 0; i < ds.n(); ++i) {
    const Observation& obs = ds.observations[i];
    std::ostringstream at;
    at << "row " << (i + 1) << ": ";
    if (obs.x.size() != ds.d) add_error(at.str() + "dimension mismatch");
    if (!finite_features(obs.x)) add_error(at.str() + "non-finite feature");
    if (obs.t != 1 && obs.t != -1) add_error(at.str() + "treatment must be +/-1");
    if (obs.y != 1 && obs.y != -1) add_error(at.str() + "outcome must be +/-1");
    if (!ds.propensity.is_constant() && i < ds.propensity.values().size()) {
      const double e = ds.propensity.values()[i];
      if (!(e > 0.0 && e < 1.0)) add_error(at.str() + "propensity outside (0,1)");
    }
    if ((obs.t == 1 || obs.t == -1) && (obs.y == 1 || obs.y == -1)) {
      report.cells[obs.t == 1 ? 1 : 0][obs.y == 1 ? 1 : 0] += 1;
    }
  }

  report.ok = report.errors.empty();
  return report;
}

void require_valid(const Dataset& ds) {
  ValidationReport report = validate_dataset(ds);
  if (report.ok) return;
  std::string joined = "invalid dataset:";
  for (const auto& e : report.errors) {
    joined += "\n  " + e;
  }
  throw DataError(joined);
}

}  // namespace respclass
