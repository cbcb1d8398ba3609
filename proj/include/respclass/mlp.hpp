#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "respclass/surrogate.hpp"

namespace respclass {

enum class OutputHead { Identity, Sigmoid };

// Dense feed-forward scorer with ELU interior activations and a single
// output unit. An empty hidden list degenerates to a linear model.
// Parameters are stored flat as [W0|b0|W1|b1|...], weights row-major.
struct MlpScorer {
  int input_dim = 0;
  std::vector<int> hidden;
  OutputHead head = OutputHead::Identity;
  std::vector<double> params;

  std::size_t parameter_count() const;
  // Pre-head output.
  double raw_score(std::span<const double> x) const;
  // Head applied: raw score for Identity, sigmoid of it for Sigmoid.
  double output(std::span<const double> x) const;
};

struct TrainConfig {
  int epochs = 100;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int batch_size = 0;  // 0 = full batch
  double lambda = 0.0;  // L2 penalty on weights (not biases)
  std::uint64_t seed = 0;
};

// Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases.
MlpScorer init_mlp(int input_dim, std::vector<int> hidden, OutputHead head,
                   std::uint64_t seed);

enum class TrainLoss {
  WeightedLogistic,    // w * logistic_surrogate(score, z), Identity head
  GenerativeNll,       // w * generative_nll(sigmoid(score), z), Sigmoid head
  BinaryCrossEntropy,  // w * BCE(sigmoid(score), z), Sigmoid head
};

// Mean weighted loss plus lambda * sum of squared weights, with its gradient
// in parameter order. Exposed so gradients can be verified numerically.
double loss_and_gradient(const MlpScorer& model,
                         std::span<const SurrogateExample> examples,
                         TrainLoss loss, double lambda,
                         std::vector<double>* grad);

// Adam on the objective above. Returns the final epoch's training loss.
// Throws NumericError if the loss turns non-finite.
double train_mlp(MlpScorer* model, std::span<const SurrogateExample> examples,
                 TrainLoss loss, const TrainConfig& cfg);

// Margin-based learner on transformed examples (hidden empty = linear).
MlpScorer train_resp_disc(std::span<const SurrogateExample> examples,
                          const std::vector<int>& hidden, const TrainConfig& cfg);

// Responder-probability learner: sigmoid head trained on pseudo-population
// pairs (x, z=y*t, w=1/Q) by maximum likelihood.
MlpScorer train_resp_gen(std::span<const SurrogateExample> examples,
                         const std::vector<int>& hidden, const TrainConfig& cfg);

}  // namespace respclass
