#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "respclass/surrogate.hpp"

namespace respclass {

struct KernelSpec {
  enum class Kind { Linear, Rbf };
  Kind kind = Kind::Linear;
  double gamma = 0.0;  // RBF only

  static KernelSpec linear() { return {Kind::Linear, 0.0}; }
  static KernelSpec rbf(double gamma) { return {Kind::Rbf, gamma}; }

  double eval(std::span<const double> a, std::span<const double> b) const;
};

// score(x) = sum_i dual_coefs[i] * k(sv_i, x) + bias, dual_coefs = alpha*z.
struct KernelScorer {
  KernelSpec kernel;
  std::vector<FeatureVector> support_vectors;
  std::vector<double> dual_coefs;
  double bias = 0.0;

  double score(std::span<const double> x) const;
};

struct SvmOptions {
  double c = 1.0;
  double tol = 1e-3;
  long max_iter = -1;  // -1 = 10 * n two-variable steps
  std::size_t cache_bytes = 256ull << 20;
};

struct SvmTrainResult {
  KernelScorer scorer;
  bool converged = false;
  bool degenerate = false;  // single-class input, constant rule returned
  double kkt_violation = 0.0;
  double dual_objective = 0.0;
  long iterations = 0;
};

// Weighted soft-margin dual
//   max sum_i a_i - 1/2 sum_ij a_i a_j z_i z_j k(x_i, x_j)
//   s.t. 0 <= a_i <= c * w_i, sum_i a_i z_i = 0,
// solved by two-variable SMO with maximal-violating-pair selection and an
// LRU kernel-row cache. Weight-zero examples are dropped up front. If only
// one class remains the result is the constant rule for that class, flagged
// degenerate. Non-convergence within max_iter returns the best iterate with
// converged = false.
SvmTrainResult train_respsvm(std::span<const SurrogateExample> examples,
                             const KernelSpec& kernel, const SvmOptions& opts);

}  // namespace respclass
