#pragma once

#include <vector>

#include "respclass/core.hpp"

namespace respclass {

// Weighted classification instance produced by the outcome transformation.
// z is the corrupted responder label, w its nonnegative instance weight.
struct SurrogateExample {
  FeatureVector x;
  int z = 0;
  double w = 0.0;
};

struct WeightedObservation {
  Observation obs;
  double weight = 0.0;  // 1/Q
};

// Maps each row to (x, z, w) with s = y*t/Q, z = sign(s - 2*theta) (ties to
// +1), w = |s - 2*theta|. Weight-zero rows are kept; learners may drop them.
std::vector<SurrogateExample> to_surrogate(const Dataset& ds, Theta theta);

// Inverse-assignment weighting: each row weighted by 1/Q. In the weighted
// population the two arms carry equal mass within every X stratum.
std::vector<WeightedObservation> pseudo_population(const Dataset& ds);

// Training pairs for the generative learner: label z = y*t with weight 1/Q,
// i.e. the half-propensity surrogate taken on the pseudo-population.
std::vector<SurrogateExample> generative_examples(const Dataset& ds);

// Data-driven break-even cost: clamp_[0,1] of mean(y_i t_i / (2 Q_i)). At
// this theta the empirical losses of the constant +1 and -1 rules coincide
// (exactly so when the mean lands inside [0,1]).
Theta balanced_theta(const Dataset& ds);

}  // namespace respclass
