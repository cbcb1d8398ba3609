#include "respclass/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "respclass/errors.hpp"
#include "respclass/losses.hpp"
#include "respclass/rng.hpp"

namespace respclass {

namespace {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

double elu(double v) { return v > 0.0 ? v : std::expm1(v); }
double elu_grad(double v) { return v > 0.0 ? 1.0 : std::exp(v); }

struct Layout {
  std::vector<int> sizes;  // input, hidden..., output(1)
  std::vector<std::size_t> w_off;
  std::vector<std::size_t> b_off;
  std::size_t total = 0;
};

Layout layout_of(int input_dim, const std::vector<int>& hidden) {
  Layout lay;
  lay.sizes.push_back(input_dim);
  for (int h : hidden) lay.sizes.push_back(h);
  lay.sizes.push_back(1);
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < lay.sizes.size(); ++l) {
    const auto in = static_cast<std::size_t>(lay.sizes[l]);
    const auto out = static_cast<std::size_t>(lay.sizes[l + 1]);
    lay.w_off.push_back(off);
    off += in * out;
    lay.b_off.push_back(off);
    off += out;
  }
  lay.total = off;
  return lay;
}

// Per-example loss derivative with respect to the raw (pre-head) score.
double raw_gradient(TrainLoss loss, double raw, int z) {
  switch (loss) {
    case TrainLoss::WeightedLogistic:
      return sigmoid(raw) - 0.5 * (1.0 + static_cast<double>(z));
    case TrainLoss::GenerativeNll: {
      const double p = sigmoid(raw);
      if (z > 0) return -p * (1.0 - p) / (1.0 + p);
      return p;
    }
    case TrainLoss::BinaryCrossEntropy:
      return sigmoid(raw) - 0.5 * (1.0 + static_cast<double>(z));
  }
  return 0.0;
}

double example_loss(TrainLoss loss, double raw, int z) {
  switch (loss) {
    case TrainLoss::WeightedLogistic:
      return logistic_surrogate(raw, z);
    case TrainLoss::GenerativeNll:
      return generative_nll(sigmoid(raw), z);
    case TrainLoss::BinaryCrossEntropy: {
      const double p = std::clamp(sigmoid(raw), kProbClamp, 1.0 - kProbClamp);
      const double target = 0.5 * (1.0 + static_cast<double>(z));
      return -(target * std::log(p) + (1.0 - target) * std::log(1.0 - p));
    }
  }
  return 0.0;
}

}  // namespace

std::size_t MlpScorer::parameter_count() const {
  return layout_of(input_dim, hidden).total;
}

double MlpScorer::raw_score(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_dim) {
    throw std::invalid_argument("MlpScorer: dimension mismatch");
  }
  const Layout lay = layout_of(input_dim, hidden);
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> next;
  for (std::size_t l = 0; l + 1 < lay.sizes.size(); ++l) {
    const auto in = static_cast<std::size_t>(lay.sizes[l]);
    const auto out = static_cast<std::size_t>(lay.sizes[l + 1]);
    const bool last = (l + 2 == lay.sizes.size());
    next.assign(out, 0.0);
    for (std::size_t j = 0; j < out; ++j) {
      double acc = params[lay.b_off[l] + j];
      const double* w = params.data() + lay.w_off[l] + j * in;
      for (std::size_t k = 0; k < in; ++k) acc += w[k] * cur[k];
      next[j] = last ? acc : elu(acc);
    }
    cur.swap(next);
  }
  return cur[0];
}

double MlpScorer::output(std::span<const double> x) const {
  const double raw = raw_score(x);
  return head == OutputHead::Sigmoid ? sigmoid(raw) : raw;
}

MlpScorer init_mlp(int input_dim, std::vector<int> hidden, OutputHead head,
                   std::uint64_t seed) {
  if (input_dim <= 0) throw std::invalid_argument("init_mlp: input_dim must be positive");
  for (int h : hidden) {
    if (h <= 0) throw std::invalid_argument("init_mlp: hidden sizes must be positive");
  }
  MlpScorer m;
  m.input_dim = input_dim;
  m.hidden = std::move(hidden);
  m.head = head;
  const Layout lay = layout_of(m.input_dim, m.hidden);
  m.params.assign(lay.total, 0.0);
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < lay.sizes.size(); ++l) {
    const auto in = static_cast<std::size_t>(lay.sizes[l]);
    const auto out = static_cast<std::size_t>(lay.sizes[l + 1]);
    const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
    for (std::size_t j = 0; j < in * out; ++j) {
      m.params[lay.w_off[l] + j] = (2.0 * rng.next_double() - 1.0) * bound;
    }
    // biases stay zero
  }
  return m;
}

namespace {

// Shared forward/backward pass over a subset of examples. Accumulates the
// mean weighted loss and, when grad != nullptr, its gradient.
double batch_loss_grad(const MlpScorer& model, const Layout& lay,
                       std::span<const SurrogateExample> examples,
                       std::span<const std::size_t> subset, TrainLoss loss,
                       double lambda, std::vector<double>* grad) {
  const std::size_t layers = lay.sizes.size() - 1;
  std::vector<std::vector<double>> act(layers + 1), pre(layers), delta(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    pre[l].assign(static_cast<std::size_t>(lay.sizes[l + 1]), 0.0);
    delta[l].assign(static_cast<std::size_t>(lay.sizes[l + 1]), 0.0);
  }
  if (grad) grad->assign(lay.total, 0.0);

  const double inv_n = 1.0 / static_cast<double>(subset.size());
  double total = 0.0;
  for (std::size_t si : subset) {
    const SurrogateExample& ex = examples[si];
    act[0].assign(ex.x.begin(), ex.x.end());
    for (std::size_t l = 0; l < layers; ++l) {
      const auto in = static_cast<std::size_t>(lay.sizes[l]);
      const auto out = static_cast<std::size_t>(lay.sizes[l + 1]);
      const bool last = (l + 1 == layers);
      act[l + 1].assign(out, 0.0);
      for (std::size_t j = 0; j < out; ++j) {
        double acc = model.params[lay.b_off[l] + j];
        const double* w = model.params.data() + lay.w_off[l] + j * in;
        for (std::size_t k = 0; k < in; ++k) acc += w[k] * act[l][k];
        pre[l][j] = acc;
        act[l + 1][j] = last ? acc : elu(acc);
      }
    }
    const double raw = act[layers][0];
    total += ex.w * example_loss(loss, raw, ex.z) * inv_n;

    if (!grad) continue;
    delta[layers - 1][0] = ex.w * raw_gradient(loss, raw, ex.z) * inv_n;
    for (std::size_t l = layers; l-- > 0;) {
      const auto in = static_cast<std::size_t>(lay.sizes[l]);
      const auto out = static_cast<std::size_t>(lay.sizes[l + 1]);
      double* gw = grad->data() + lay.w_off[l];
      double* gb = grad->data() + lay.b_off[l];
      for (std::size_t j = 0; j < out; ++j) {
        const double dj = delta[l][j];
        gb[j] += dj;
        double* row = gw + j * in;
        for (std::size_t k = 0; k < in; ++k) row[k] += dj * act[l][k];
      }
      if (l > 0) {
        for (std::size_t k = 0; k < in; ++k) {
          double acc = 0.0;
          const double* w = model.params.data() + lay.w_off[l];
          for (std::size_t j = 0; j < out; ++j) acc += w[j * in + k] * delta[l][j];
          delta[l - 1][k] = acc * elu_grad(pre[l - 1][k]);
        }
      }
    }
  }

  if (lambda != 0.0) {
    for (std::size_t l = 0; l < layers; ++l) {
      const auto count = static_cast<std::size_t>(lay.sizes[l]) *
                         static_cast<std::size_t>(lay.sizes[l + 1]);
      for (std::size_t j = 0; j < count; ++j) {
        const double w = model.params[lay.w_off[l] + j];
        total += lambda * w * w;
        if (grad) (*grad)[lay.w_off[l] + j] += 2.0 * lambda * w;
      }
    }
  }
  return total;
}

}  // namespace

double loss_and_gradient(const MlpScorer& model,
                         std::span<const SurrogateExample> examples,
                         TrainLoss loss, double lambda,
                         std::vector<double>* grad) {
  if (examples.empty()) throw std::invalid_argument("loss_and_gradient: empty input");
  const Layout lay = layout_of(model.input_dim, model.hidden);
  std::vector<std::size_t> all(examples.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return batch_loss_grad(model, lay, examples, all, loss, lambda, grad);
}

double train_mlp(MlpScorer* model, std::span<const SurrogateExample> examples,
                 TrainLoss loss, const TrainConfig& cfg) {
  if (!model) throw std::invalid_argument("train_mlp: null model");
  if (examples.empty()) throw std::invalid_argument("train_mlp: empty input");
  for (const auto& ex : examples) {
    if (static_cast<int>(ex.x.size()) != model->input_dim) {
      throw std::invalid_argument("train_mlp: dimension mismatch");
    }
  }

  const Layout lay = layout_of(model->input_dim, model->hidden);
  std::vector<double> m(lay.total, 0.0), v(lay.total, 0.0), grad;
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  Rng shuffle_rng(derive_seed(cfg.seed, 5));
  const std::size_t batch =
      cfg.batch_size > 0
          ? std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size), examples.size())
          : examples.size();

  long step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (batch < examples.size()) {
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[shuffle_rng.uniform_index(i)]);
      }
    }
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t len = std::min(batch, order.size() - start);
      const double loss_value =
          batch_loss_grad(*model, lay, examples,
                          {order.data() + start, len}, loss, cfg.lambda, &grad);
      if (!std::isfinite(loss_value)) {
        throw NumericError("training diverged: non-finite loss");
      }
      ++step;
      const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
      for (std::size_t j = 0; j < lay.total; ++j) {
        m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * grad[j];
        v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * grad[j] * grad[j];
        const double mh = m[j] / bc1;
        const double vh = v[j] / bc2;
        model->params[j] -= cfg.learning_rate * mh / (std::sqrt(vh) + cfg.adam_eps);
      }
    }
  }

  const double final_loss = loss_and_gradient(*model, examples, loss, cfg.lambda, nullptr);
  if (!std::isfinite(final_loss)) {
    throw NumericError("training diverged: non-finite loss");
  }
  return final_loss;
}

MlpScorer train_resp_disc(std::span<const SurrogateExample> examples,
                          const std::vector<int>& hidden, const TrainConfig& cfg) {
  if (examples.empty()) throw std::invalid_argument("train_resp_disc: empty input");
  MlpScorer model = init_mlp(static_cast<int>(examples.front().x.size()), hidden,
                             OutputHead::Identity, cfg.seed);
  train_mlp(&model, examples, TrainLoss::WeightedLogistic, cfg);
  return model;
}

MlpScorer train_resp_gen(std::span<const SurrogateExample> examples,
                         const std::vector<int>& hidden, const TrainConfig& cfg) {
  if (examples.empty()) throw std::invalid_argument("train_resp_gen: empty input");
  MlpScorer model = init_mlp(static_cast<int>(examples.front().x.size()), hidden,
                             OutputHead::Sigmoid, cfg.seed);
  train_mlp(&model, examples, TrainLoss::GenerativeNll, cfg);
  return model;
}

}  // namespace respclass
