#include "respclass/surrogate.hpp"

#include <algorithm>
#include <cmath>

namespace respclass {

std::vector<SurrogateExample> to_surrogate(const Dataset& ds, Theta theta) {
  const double two_theta = 2.0 * theta.value();
  std::vector<SurrogateExample> out;
  out.reserve(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const Observation& obs = ds.observations[i];
    const double q = q_of(obs, ds.propensity, i);
    const double s = static_cast<double>(obs.y) * static_cast<double>(obs.t) / q;
    SurrogateExample ex;
    ex.x = obs.x;
    ex.z = sign_pm(s - two_theta);
    ex.w = std::abs(s - two_theta);
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<WeightedObservation> pseudo_population(const Dataset& ds) {
  std::vector<WeightedObservation> out;
  out.reserve(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const double q = q_of(ds.observations[i], ds.propensity, i);
    out.push_back({ds.observations[i], 1.0 / q});
  }
  return out;
}

std::vector<SurrogateExample> generative_examples(const Dataset& ds) {
  std::vector<SurrogateExample> out;
  out.reserve(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const Observation& obs = ds.observations[i];
    const double q = q_of(obs, ds.propensity, i);
    SurrogateExample ex;
    ex.x = obs.x;
    ex.z = obs.y * obs.t;
    ex.w = 1.0 / q;
    out.push_back(std::move(ex));
  }
  return out;
}

Theta balanced_theta(const Dataset& ds) {
  double sum = 0.0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const Observation& obs = ds.observations[i];
    const double q = q_of(obs, ds.propensity, i);
    sum += static_cast<double>(obs.y) * static_cast<double>(obs.t) / (2.0 * q);
  }
  const double mean = ds.n() > 0 ? sum / static_cast<double>(ds.n()) : 0.5;
  return Theta(std::clamp(mean, 0.0, 1.0));
}

}  // namespace respclass
