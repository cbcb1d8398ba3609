#pragma once

#include <cstdint>
#include <vector>

#include "respclass/core.hpp"

namespace respclass {

enum class ScenarioKind { Linear, Spherical };

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::Linear;
  int d = 2;
  long n = 0;
  std::uint64_t seed = 0;
};

// Beta(4,4) CDF in closed form: P(Bin(7,u) >= 4).
double beta44_cdf(double u);

// Chi-squared CDF with d degrees of freedom. Even d uses the closed-form
// Poisson tail sum; odd d falls back to the regularized lower incomplete
// gamma function evaluated to 1e-12.
double chisq_cdf(double s, int d);

struct RhoAlpha {
  double rho = 0.0;    // responder probability P(R=+1 | x)
  double alpha = 0.0;  // non-responder outcome probability P(A=+1 | x)
};

// Scenario conditional probabilities.
//   Linear:    rho = 0.15 + 0.7*1{x1>0},
//              alpha = 1 - Beta44CDF(ChisqCDF(|x|^2, d)).
//   Spherical: rho = Beta44CDF(ChisqCDF(|x|^2, d)),
//              alpha = 0.15 + 0.7*1{XOR_j (x_{2j-1}+x_{2j} > 0)}.
// Spherical requires even d.
RhoAlpha rho_alpha(const FeatureVector& x, const ScenarioSpec& spec);

struct SyntheticDraw {
  Dataset dataset;                     // propensity Constant(0.5)
  std::vector<GroundTruthUnit> truth;  // aligned with dataset rows
};

// X ~ N(0, I_d), T a fair coin, R ~ pm-Bernoulli(rho(X)), A ~ pm-Bernoulli
// (alpha(X)), Y = T if R=+1 else A. Deterministic in spec.seed.
SyntheticDraw generate(const ScenarioSpec& spec);

// Optimal rule sign(rho(x) - theta), ties to +1.
int bayes_label(const FeatureVector& x, const ScenarioSpec& spec, Theta theta);

}  // namespace respclass
