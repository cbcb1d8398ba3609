#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "respclass/core.hpp"
#include "respclass/learners.hpp"
#include "respclass/synthetic.hpp"

namespace respclass {

// Unbiased loss estimates from observed (x, t, y, Q) alone, s_i = y_i t_i/Q_i:
//   l_prime_hat = mean f_i (2 theta - s_i)
//   l_theta_hat = l_prime_hat/4 + mean(2 theta + (1-2 theta) s_i)/4
//   fn_hat      = mean (1 - f_i) s_i / 4
//   fp_hat      = mean (1 + f_i)(2 - s_i) / 4
// Always l_theta_hat = theta*fp_hat + (1-theta)*fn_hat; estimates may fall
// outside [0, 1] on finite samples.
struct EvalReport {
  double theta = 0.5;
  std::size_t n = 0;
  double l_theta_hat = 0.0;
  double l_prime_hat = 0.0;
  double fp_hat = 0.0;
  double fn_hat = 0.0;
};

EvalReport estimate_losses(const ResponderClassifier& clf, const Dataset& ds,
                           Theta theta);

// Fraction of points where the classifier matches sign(rho(x) - theta).
double accuracy_vs_bayes(const ResponderClassifier& clf,
                         std::span<const FeatureVector> xs,
                         const ScenarioSpec& spec, Theta theta);

// Policy-value estimate mean 1{t_i = f_i} y_i / Q_i - 2 theta P_hat(f = +1).
double policy_value(const ResponderClassifier& clf, const Dataset& ds,
                    Theta theta);

// Order-statistic percentile with linear interpolation, q in [0, 1].
double percentile(std::vector<double> values, double q);

struct BenchmarkConfig {
  ScenarioKind scenario = ScenarioKind::Linear;
  int d = 2;
  std::vector<long> n_grid;
  std::vector<std::string> learners;
  int replications = 20;
  long eval_n = 10000;
  double theta = 0.5;
  bool balanced_theta_mode = false;
  std::uint64_t seed = 0;
  LearnerOptions options;
  int max_threads = 0;  // 0 = hardware, capped by RESPCLASS_THREADS
};

struct ReplicationRow {
  std::string learner;
  long n = 0;
  int replication = 0;
  double accuracy = 0.0;
  bool failed = false;
  std::string error;
};

struct ReplicationSummary {
  std::string learner;
  long n = 0;
  double mean = 0.0;
  double p10 = 0.0;
  double p90 = 0.0;
  int replications = 0;
  int failures = 0;
};

struct BenchmarkResult {
  std::vector<ReplicationRow> rows;          // ordered by (learner, n, rep)
  std::vector<ReplicationSummary> summaries;
};

// Train/eval draws are paired across learners at the same (n, replication);
// a failed replication is recorded and excluded from its summary.
BenchmarkResult run_replications(const BenchmarkConfig& cfg);

struct CoefficientCi {
  int index = 0;        // 0..d-1 feature weights, d = intercept
  std::string name;
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  bool flagged = false;  // interval failed to bracket the estimate
};

struct BootstrapOptions {
  int outer_b = 200;
  int inner_b = 50;
  double level = 0.95;
  std::uint64_t seed = 0;
  TrainConfig train;
};

// Studentized (double) bootstrap intervals for the linear generative model's
// coefficients. Outer resamples supply t-statistics studentized by inner-
// bootstrap standard errors; the full-data SE is the spread of outer
// estimates. Degenerate resamples (single surrogate class) are redrawn up to
// ten times, then skipped.
std::vector<CoefficientCi> bootstrap_ci(const Dataset& ds,
                                        const BootstrapOptions& opts);

}  // namespace respclass
