#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "respclass/core.hpp"
#include "respclass/mlp.hpp"
#include "respclass/svm.hpp"

namespace respclass {

struct LinearScorer {
  std::vector<double> weights;
  double bias = 0.0;

  double score(std::span<const double> x) const;
};

// One arm of the outcome-regression baseline: a logistic model for
// P(Y=+1 | X, arm), or a smoothed constant when the arm is degenerate.
struct LogisticArm {
  bool is_constant = false;
  double const_prob = 0.5;
  LinearScorer model;

  double prob(std::span<const double> x) const;
};

using Scorer = std::variant<LinearScorer, KernelScorer, MlpScorer>;

// Classify by sign of a real-valued score.
struct ScoreThresholdClassifier {
  Scorer scorer;
};

// Classify by sign(rho_hat(x) - theta) from a sigmoid-head model.
struct ProbThresholdClassifier {
  MlpScorer model;
  double theta = 0.5;
};

// Plug-in rule sign(tau_hat(x) - 2*theta), tau_hat = 2*(p_plus - p_minus).
struct CatePluginClassifier {
  LogisticArm treated;
  LogisticArm control;
  double theta = 0.5;
};

using ResponderClassifier = std::variant<ScoreThresholdClassifier,
                                         ProbThresholdClassifier,
                                         CatePluginClassifier>;

int predict_one(const ResponderClassifier& clf, std::span<const double> x);
std::vector<int> predict(const ResponderClassifier& clf,
                         std::span<const FeatureVector> xs);

// Input dimension the classifier expects, when determinable (-1 otherwise).
int classifier_dim(const ResponderClassifier& clf);

// Constant rule as a degenerate linear scorer: zero weights, bias = label.
ResponderClassifier constant_classifier(int label, std::size_t d);

// Per-arm logistic regressions fit by the shared Adam loop; arms with no
// rows or a single outcome class fall back to the Laplace-smoothed base
// rate (n_+ + 1)/(n + 2).
CatePluginClassifier train_tlearner_lr(const Dataset& ds, Theta theta,
                                       const TrainConfig& cfg);

// One grid point for cross-validation. Grids are ordered strongest
// regularization first; score ties keep the earliest entry.
struct HyperSetting {
  double c = 1.0;
  double gamma = 0.0;   // 0 = not applicable / linear
  double lambda = 0.0;
};

struct CvResult {
  std::size_t best_index = 0;
  std::vector<double> mean_scores;               // per grid entry
  std::vector<std::vector<double>> fold_scores;  // [grid][fold]
};

using CvTrainer = std::function<ResponderClassifier(
    std::span<const SurrogateExample>, const HyperSetting&)>;

// Seeded k-fold split of the examples; each grid entry is scored by the
// mean held-out l_prime_estimate across folds.
CvResult cross_validate(std::span<const SurrogateExample> examples,
                        const CvTrainer& trainer,
                        std::span<const HyperSetting> grid, int k, Theta theta,
                        std::uint64_t seed);

struct LearnerOptions {
  TrainConfig train;
  SvmOptions svm;
  int cv_folds = 5;
  std::vector<double> svm_c_grid = {0.1, 1.0, 10.0, 100.0};
  // RBF bandwidth grid, divided by the input dimension at use.
  std::vector<double> svm_gamma_grid = {0.01, 0.1, 1.0, 10.0};
  // Explicit hyperparameters bypass cross-validation.
  std::optional<double> c_override;
  std::optional<double> gamma_override;
};

struct TrainDiagnostics {
  double final_loss = 0.0;
  double selected_c = 0.0;
  double selected_gamma = 0.0;
  std::vector<std::string> cv_table;
  bool svm_converged = true;
  bool degenerate = false;
};

// Registry of named learners:
//   respsvm-linear, respsvm-rbf, resplr-disc, respnet-disc,
//   resplr-gen, respnet-gen, tlearner-lr.
const std::vector<std::string>& learner_names();
bool is_known_learner(const std::string& name);

ResponderClassifier train_learner(const std::string& name, const Dataset& ds,
                                  Theta theta, const LearnerOptions& opts,
                                  std::uint64_t seed,
                                  TrainDiagnostics* diag = nullptr);

}  // namespace respclass
