#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

#include "respclass/core.hpp"
#include "respclass/surrogate.hpp"

namespace respclass {

// Probabilities are clamped to [kProbClamp, 1 - kProbClamp] before logs.
inline constexpr double kProbClamp = 1e-12;
inline constexpr double kLn2 = 0.6931471805599453094172321214581766;

enum class LossKind {
  Hinge,
  LogisticSurrogate,
  GenerativeNll,
  Wce,
  AdjustedNll,
  ZeroOne,
};

// Margin losses take a real-valued score and the +/-1 label z.

inline double hinge(double score, int z) {
  return std::max(0.0, 1.0 - static_cast<double>(z) * score);
}

// Logistic surrogate log(1 + e^s) - (1+z)/2 * s, written branch-wise so that
// large |score| neither overflows nor cancels.
inline double logistic_surrogate(double score, int z) {
  const double indicator = 0.5 * (1.0 + static_cast<double>(z));  // {0, 1}
  if (score > 0.0) {
    return std::log1p(std::exp(-score)) + score * (1.0 - indicator);
  }
  return std::log1p(std::exp(score)) - score * indicator;
}

inline double zero_one(double score, int z) { return sign_pm(score) == z ? 0.0 : 1.0; }

// Probability losses take an estimated responder probability rho.

// -log P(Z=z | rho) with P(Z=+1) = (1 + rho)/2. Bounded by log 2 on the
// z=+1 branch; grows like -log(1-rho) on the z=-1 branch.
inline double generative_nll(double rho, int z) {
  rho = std::clamp(rho, kProbClamp, 1.0 - kProbClamp);
  return kLn2 - std::log1p(static_cast<double>(z) * rho);
}

// Class-weighted cross entropy at break-even cost: unit weight on the z=-1
// branch, 1/3 on z=+1.
inline double wce(double rho, int z) {
  rho = std::clamp(rho, kProbClamp, 1.0 - kProbClamp);
  if (z < 0) return -std::log1p(-rho);
  return -std::log(rho) / 3.0;
}

// generative_nll shifted by -log 2 on the z=-1 branch; identical to wce
// there, bounded on z=+1.
inline double adjusted_nll(double rho, int z) {
  if (z < 0) {
    rho = std::clamp(rho, kProbClamp, 1.0 - kProbClamp);
    return -std::log1p(-rho);
  }
  return generative_nll(rho, z);
}

// (1/n) sum_i w_i * loss(value_i, z_i). Margin losses read values as scores,
// probability losses read them as rho estimates.
double weighted_empirical_risk(std::span<const SurrogateExample> examples,
                               std::span<const double> values, LossKind kind);

// Empirical transformed-loss objective: (1/n) sum_i w_i * (-pred_i * z_i),
// the +/-1 misclassification form. Lower is better; used as the CV score.
double l_prime_estimate(std::span<const SurrogateExample> examples,
                        std::span<const int> predictions);

}  // namespace respclass
