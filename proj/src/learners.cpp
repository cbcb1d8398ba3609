#include "respclass/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "respclass/losses.hpp"
#include "respclass/rng.hpp"
#include "respclass/surrogate.hpp"

namespace respclass {

double LinearScorer::score(std::span<const double> x) const {
  if (x.size() != weights.size()) {
    throw std::invalid_argument("LinearScorer: dimension mismatch");
  }
  double acc = bias;
  for (std::size_t i = 0; i < weights.size(); ++i) acc += weights[i] * x[i];
  return acc;
}

double LogisticArm::prob(std::span<const double> x) const {
  if (is_constant) return const_prob;
  return 1.0 / (1.0 + std::exp(-model.score(x)));
}

namespace {

// MlpScorer scores via raw_score; its output() applies the head, but
// classification by score sign only needs the raw value.
struct ScoreVisitor {
  std::span<const double> x;
  double operator()(const LinearScorer& s) const { return s.score(x); }
  double operator()(const KernelScorer& s) const { return s.score(x); }
  double operator()(const MlpScorer& s) const { return s.raw_score(x); }
};

}  // namespace

int predict_one(const ResponderClassifier& clf, std::span<const double> x) {
  return std::visit(
      [&x](const auto& c) -> int {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, ScoreThresholdClassifier>) {
          return sign_pm(std::visit(ScoreVisitor{x}, c.scorer));
        } else if constexpr (std::is_same_v<T, ProbThresholdClassifier>) {
          return sign_pm(c.model.output(x) - c.theta);
        } else {
          const double tau = 2.0 * (c.treated.prob(x) - c.control.prob(x));
          return sign_pm(tau - 2.0 * c.theta);
        }
      },
      clf);
}

std::vector<int> predict(const ResponderClassifier& clf,
                         std::span<const FeatureVector> xs) {
  std::vector<int> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = predict_one(clf, xs[i]);
  return out;
}

int classifier_dim(const ResponderClassifier& clf) {
  return std::visit(
      [](const auto& c) -> int {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, ScoreThresholdClassifier>) {
          return std::visit(
              [](const auto& s) -> int {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, LinearScorer>) {
                  return static_cast<int>(s.weights.size());
                } else if constexpr (std::is_same_v<S, KernelScorer>) {
                  return s.support_vectors.empty()
                             ? -1
                             : static_cast<int>(s.support_vectors.front().size());
                } else {
                  return s.input_dim;
                }
              },
              c.scorer);
        } else if constexpr (std::is_same_v<T, ProbThresholdClassifier>) {
          return c.model.input_dim;
        } else {
          if (!c.treated.is_constant) return static_cast<int>(c.treated.model.weights.size());
          if (!c.control.is_constant) return static_cast<int>(c.control.model.weights.size());
          return -1;
        }
      },
      clf);
}

ResponderClassifier constant_classifier(int label, std::size_t d) {
  LinearScorer scorer;
  scorer.weights.assign(d, 0.0);
  scorer.bias = static_cast<double>(label);
  return ScoreThresholdClassifier{scorer};
}

namespace {

LogisticArm fit_arm(const Dataset& ds, int arm, const TrainConfig& cfg) {
  std::vector<SurrogateExample> rows;
  long pos = 0, total = 0;
  for (const auto& obs : ds.observations) {
    if (obs.t != arm) continue;
    ++total;
    if (obs.y == +1) ++pos;
    SurrogateExample ex;
    ex.x = obs.x;
    ex.z = obs.y;
    ex.w = 1.0;
    rows.push_back(std::move(ex));
  }

  LogisticArm out;
  if (total == 0 || pos == 0 || pos == total) {
    // Empty or single-outcome arm: Laplace-smoothed base rate.
    out.is_constant = true;
    out.const_prob = (static_cast<double>(pos) + 1.0) / (static_cast<double>(total) + 2.0);
    return out;
  }

  MlpScorer model = init_mlp(static_cast<int>(ds.d), {}, OutputHead::Sigmoid, cfg.seed);
  train_mlp(&model, rows, TrainLoss::BinaryCrossEntropy, cfg);
  out.model.weights.assign(model.params.begin(),
                           model.params.begin() + static_cast<long>(ds.d));
  out.model.bias = model.params[ds.d];
  return out;
}

}  // namespace

CatePluginClassifier train_tlearner_lr(const Dataset& ds, Theta theta,
                                       const TrainConfig& cfg) {
  if (ds.n() == 0) throw std::invalid_argument("train_tlearner_lr: empty dataset");
  CatePluginClassifier clf;
  TrainConfig arm_cfg = cfg;
  arm_cfg.seed = derive_seed(cfg.seed, 1);
  clf.treated = fit_arm(ds, +1, arm_cfg);
  arm_cfg.seed = derive_seed(cfg.seed, 2);
  clf.control = fit_arm(ds, -1, arm_cfg);
  clf.theta = theta.value();
  return clf;
}

CvResult cross_validate(std::span<const SurrogateExample> examples,
                        const CvTrainer& trainer,
                        std::span<const HyperSetting> grid, int k, Theta theta,
                        std::uint64_t seed) {
  (void)theta;  // folded into the examples' (z, w); kept for the call shape
  if (grid.empty()) throw std::invalid_argument("cross_validate: empty grid");
  if (k < 2) throw std::invalid_argument("cross_validate: k must be at least 2");
  if (examples.size() < static_cast<std::size_t>(k)) {
    throw std::invalid_argument("cross_validate: fewer examples than folds");
  }

  // Seeded shuffle, then strided fold assignment.
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, 0xCF));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.uniform_index(i)]);
  }

  CvResult result;
  result.fold_scores.assign(grid.size(), std::vector<double>(static_cast<std::size_t>(k), 0.0));
  result.mean_scores.assign(grid.size(), 0.0);

  for (int fold = 0; fold < k; ++fold) {
    std::vector<SurrogateExample> train_set, held;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      const SurrogateExample& ex = examples[order[pos]];
      if (static_cast<int>(pos % static_cast<std::size_t>(k)) == fold) {
        held.push_back(ex);
      } else {
        train_set.push_back(ex);
      }
    }
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const ResponderClassifier clf = trainer(train_set, grid[g]);
      std::vector<int> preds(held.size());
      for (std::size_t i = 0; i < held.size(); ++i) {
        preds[i] = predict_one(clf, held[i].x);
      }
      result.fold_scores[g][static_cast<std::size_t>(fold)] =
          l_prime_estimate(held, preds);
    }
  }

  for (std::size_t g = 0; g < grid.size(); ++g) {
    double mean = 0.0;
    for (double v : result.fold_scores[g]) mean += v;
    result.mean_scores[g] = mean / static_cast<double>(k);
  }

  // Strict improvement keeps the earliest (strongest-regularization) entry.
  result.best_index = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (result.mean_scores[g] < result.mean_scores[result.best_index]) {
      result.best_index = g;
    }
  }
  return result;
}

const std::vector<std::string>& learner_names() {
  static const std::vector<std::string> names = {
      "respsvm-linear", "respsvm-rbf", "resplr-disc", "respnet-disc",
      "resplr-gen",     "respnet-gen", "tlearner-lr",
  };
  return names;
}

bool is_known_learner(const std::string& name) {
  const auto& names = learner_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

namespace {

std::vector<int> default_hidden(std::size_t d) {
  return {static_cast<int>(2 * d), static_cast<int>(d)};
}

ResponderClassifier train_svm_learner(const Dataset& ds, Theta theta,
                                      const LearnerOptions& opts, bool rbf,
                                      std::uint64_t seed, TrainDiagnostics* diag) {
  const std::vector<SurrogateExample> examples = to_surrogate(ds, theta);

  const bool pinned = opts.c_override.has_value() ||
                      (rbf && opts.gamma_override.has_value()) ||
                      opts.cv_folds < 2;
  std::vector<HyperSetting> grid;
  if (pinned) {
    HyperSetting h;
    h.c = opts.c_override.value_or(opts.svm.c);
    if (rbf) {
      h.gamma = opts.gamma_override.value_or(1.0 / static_cast<double>(ds.d));
    }
    grid.push_back(h);
  } else {
    // Ordered strongest regularization first: C ascending, gamma ascending.
    for (double c : opts.svm_c_grid) {
      if (rbf) {
        for (double g : opts.svm_gamma_grid) {
          grid.push_back({c, g / static_cast<double>(ds.d), 0.0});
        }
      } else {
        grid.push_back({c, 0.0, 0.0});
      }
    }
    std::stable_sort(grid.begin(), grid.end(),
                     [](const HyperSetting& a, const HyperSetting& b) {
                       if (a.c != b.c) return a.c < b.c;
                       return a.gamma < b.gamma;
                     });
  }

  auto kernel_of = [rbf](const HyperSetting& h) {
    return rbf ? KernelSpec::rbf(h.gamma) : KernelSpec::linear();
  };

  HyperSetting chosen = grid.front();
  CvResult cv;
  if (grid.size() > 1 && opts.cv_folds >= 2 &&
      examples.size() >= static_cast<std::size_t>(opts.cv_folds)) {
    CvTrainer trainer = [&](std::span<const SurrogateExample> train_set,
                            const HyperSetting& h) -> ResponderClassifier {
      SvmOptions so = opts.svm;
      so.c = h.c;
      const SvmTrainResult r = train_respsvm(train_set, kernel_of(h), so);
      return ScoreThresholdClassifier{r.scorer};
    };
    cv = cross_validate(examples, trainer, grid, opts.cv_folds, theta,
                        derive_seed(seed, 17));
    chosen = grid[cv.best_index];
  }

  SvmOptions so = opts.svm;
  so.c = chosen.c;
  const SvmTrainResult final_fit = train_respsvm(examples, kernel_of(chosen), so);

  if (diag) {
    diag->final_loss = final_fit.dual_objective;
    diag->selected_c = chosen.c;
    diag->selected_gamma = rbf ? chosen.gamma : 0.0;
    diag->svm_converged = final_fit.converged;
    diag->degenerate = final_fit.degenerate;
    for (std::size_t g = 0; g < cv.mean_scores.size(); ++g) {
      std::ostringstream line;
      line << "cv c=" << grid[g].c;
      if (rbf) line << " gamma=" << grid[g].gamma;
      line << " score=" << cv.mean_scores[g];
      if (g == cv.best_index) line << " selected";
      diag->cv_table.push_back(line.str());
    }
  }
  return ScoreThresholdClassifier{final_fit.scorer};
}

ResponderClassifier train_net_learner(const Dataset& ds, Theta theta,
                                      const LearnerOptions& opts, bool generative,
                                      bool deep, std::uint64_t seed,
                                      TrainDiagnostics* diag) {
  TrainConfig cfg = opts.train;
  cfg.seed = derive_seed(seed, 29);
  const std::vector<int> hidden = deep ? default_hidden(ds.d) : std::vector<int>{};
  double final_loss = 0.0;
  ResponderClassifier clf = constant_classifier(+1, ds.d);
  if (generative) {
    const std::vector<SurrogateExample> pairs = generative_examples(ds);
    MlpScorer model = init_mlp(static_cast<int>(ds.d), hidden, OutputHead::Sigmoid, cfg.seed);
    final_loss = train_mlp(&model, pairs, TrainLoss::GenerativeNll, cfg);
    clf = ProbThresholdClassifier{std::move(model), theta.value()};
  } else {
    const std::vector<SurrogateExample> examples = to_surrogate(ds, theta);
    MlpScorer model = init_mlp(static_cast<int>(ds.d), hidden, OutputHead::Identity, cfg.seed);
    final_loss = train_mlp(&model, examples, TrainLoss::WeightedLogistic, cfg);
    clf = ScoreThresholdClassifier{std::move(model)};
  }
  if (diag) diag->final_loss = final_loss;
  return clf;
}

}  // namespace

ResponderClassifier train_learner(const std::string& name, const Dataset& ds,
                                  Theta theta, const LearnerOptions& opts,
                                  std::uint64_t seed, TrainDiagnostics* diag) {
  require_valid(ds);
  if (name == "respsvm-linear") {
    return train_svm_learner(ds, theta, opts, false, seed, diag);
  }
  if (name == "respsvm-rbf") {
    return train_svm_learner(ds, theta, opts, true, seed, diag);
  }
  if (name == "resplr-disc") {
    return train_net_learner(ds, theta, opts, false, false, seed, diag);
  }
  if (name == "respnet-disc") {
    return train_net_learner(ds, theta, opts, false, true, seed, diag);
  }
  if (name == "resplr-gen") {
    return train_net_learner(ds, theta, opts, true, false, seed, diag);
  }
  if (name == "respnet-gen") {
    return train_net_learner(ds, theta, opts, true, true, seed, diag);
  }
  if (name == "tlearner-lr") {
    TrainConfig cfg = opts.train;
    cfg.seed = derive_seed(seed, 31);
    return train_tlearner_lr(ds, theta, cfg);
  }
  throw std::invalid_argument("unknown learner: " + name);
}

}  // namespace respclass
