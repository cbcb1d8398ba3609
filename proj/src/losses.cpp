#include "respclass/losses.hpp"

namespace respclass {

double weighted_empirical_risk(std::span<const SurrogateExample> examples,
                               std::span<const double> values, LossKind kind) {
  if (examples.size() != values.size()) {
    throw std::invalid_argument("weighted_empirical_risk: length mismatch");
  }
  if (examples.empty()) {
    throw std::invalid_argument("weighted_empirical_risk: empty input");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const int z = examples[i].z;
    const double v = values[i];
    double loss = 0.0;
    switch (kind) {
      case LossKind::Hinge: loss = hinge(v, z); break;
      case LossKind::LogisticSurrogate: loss = logistic_surrogate(v, z); break;
      case LossKind::GenerativeNll: loss = generative_nll(v, z); break;
      case LossKind::Wce: loss = wce(v, z); break;
      case LossKind::AdjustedNll: loss = adjusted_nll(v, z); break;
      case LossKind::ZeroOne: loss = zero_one(v, z); break;
    }
    total += examples[i].w * loss;
  }
  return total / static_cast<double>(examples.size());
}

double l_prime_estimate(std::span<const SurrogateExample> examples,
                        std::span<const int> predictions) {
  if (examples.size() != predictions.size()) {
    throw std::invalid_argument("l_prime_estimate: length mismatch");
  }
  if (examples.empty()) {
    throw std::invalid_argument("l_prime_estimate: empty input");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    total -= examples[i].w * static_cast<double>(predictions[i] * examples[i].z);
  }
  return total / static_cast<double>(examples.size());
}

}  // namespace respclass
