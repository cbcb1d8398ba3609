#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "respclass/errors.hpp"
#include "respclass/losses.hpp"
#include "respclass/mlp.hpp"
#include "respclass/rng.hpp"

using namespace respclass;

namespace {

std::vector<SurrogateExample> random_examples(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SurrogateExample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    SurrogateExample e;
    e.x.resize(static_cast<std::size_t>(d));
    for (auto& v : e.x) v = rng.normal();
    e.z = rng.next_double() < 0.5 ? -1 : +1;
    e.w = rng.next_double() < 0.5 ? 1.0 : 3.0;
    out.push_back(std::move(e));
  }
  return out;
}

// Central finite differences on the training objective.
std::vector<double> numeric_gradient(MlpScorer model,
                                     const std::vector<SurrogateExample>& ex,
                                     TrainLoss loss, double lambda) {
  const double h = 1e-5;
  std::vector<double> g(model.params.size());
  for (std::size_t i = 0; i < model.params.size(); ++i) {
    const double saved = model.params[i];
    model.params[i] = saved + h;
    const double up = loss_and_gradient(model, ex, loss, lambda, nullptr);
    model.params[i] = saved - h;
    const double down = loss_and_gradient(model, ex, loss, lambda, nullptr);
    model.params[i] = saved;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("parameter layout and zero-parameter scores") {
  MlpScorer linear = init_mlp(3, {}, OutputHead::Identity, 1);
  CHECK(linear.parameter_count() == 4);  // 3 weights + bias

  MlpScorer deep = init_mlp(3, {4, 2}, OutputHead::Sigmoid, 1);
  // (3*4+4) + (4*2+2) + (2*1+1) = 16 + 10 + 3
  CHECK(deep.parameter_count() == 29);
  CHECK(deep.params.size() == deep.parameter_count());

  // ELU(0) = 0, so an all-zero network scores zero everywhere.
  std::vector<double> x = {0.7, -1.3, 2.2};
  for (auto* m : {&linear, &deep}) {
    std::fill(m->params.begin(), m->params.end(), 0.0);
  }
  CHECK(linear.raw_score(x) == 0.0);
  CHECK(linear.output(x) == 0.0);  // identity head
  CHECK(deep.raw_score(x) == 0.0);
  CHECK(deep.output(x) == doctest::Approx(0.5).epsilon(1e-15));  // sigmoid head
}

TEST_CASE("glorot initialisation: bounded weights, zero biases, seeded") {
  MlpScorer a = init_mlp(5, {7}, OutputHead::Identity, 42);
  MlpScorer b = init_mlp(5, {7}, OutputHead::Identity, 42);
  MlpScorer c = init_mlp(5, {7}, OutputHead::Identity, 43);
  CHECK(a.params == b.params);
  CHECK(a.params != c.params);

  // First layer: 5*7 weights bounded by sqrt(6/12), then 7 zero biases.
  const double bound1 = std::sqrt(6.0 / (5 + 7));
  for (int i = 0; i < 35; ++i) CHECK(std::abs(a.params[i]) <= bound1);
  for (int i = 35; i < 42; ++i) CHECK(a.params[i] == 0.0);
  // Output layer: 7 weights bounded by sqrt(6/8), then the zero bias.
  const double bound2 = std::sqrt(6.0 / (7 + 1));
  for (int i = 42; i < 49; ++i) CHECK(std::abs(a.params[i]) <= bound2);
  CHECK(a.params[49] == 0.0);
}

TEST_CASE("init_mlp rejects bad shapes") {
  CHECK_THROWS_AS(init_mlp(0, {}, OutputHead::Identity, 1), std::invalid_argument);
  CHECK_THROWS_AS(init_mlp(2, {3, 0}, OutputHead::Identity, 1), std::invalid_argument);
}

TEST_CASE("backprop agrees with central differences") {
  const auto ex = random_examples(12, 2, 99);
  for (TrainLoss loss : {TrainLoss::WeightedLogistic, TrainLoss::GenerativeNll,
                         TrainLoss::BinaryCrossEntropy}) {
    const OutputHead head =
        loss == TrainLoss::WeightedLogistic ? OutputHead::Identity : OutputHead::Sigmoid;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      MlpScorer m = init_mlp(2, {3}, head, seed);
      const double lambda = 0.01;
      std::vector<double> grad;
      loss_and_gradient(m, ex, loss, lambda, &grad);
      REQUIRE(grad.size() == m.params.size());
      const auto fd = numeric_gradient(m, ex, loss, lambda);
      for (std::size_t i = 0; i < grad.size(); ++i) {
        const double scale = std::max(1.0, std::abs(fd[i]));
        CHECK(std::abs(grad[i] - fd[i]) / scale <= 1e-5);
      }
    }
  }
}

TEST_CASE("l2 penalty hits weights but not biases") {
  MlpScorer m = init_mlp(2, {}, OutputHead::Identity, 5);
  m.params = {0.5, -1.5, 7.0};  // w1, w2, bias
  const auto ex = random_examples(6, 2, 7);
  const double base = loss_and_gradient(m, ex, TrainLoss::WeightedLogistic, 0.0, nullptr);
  const double pen = loss_and_gradient(m, ex, TrainLoss::WeightedLogistic, 0.1, nullptr);
  CHECK(pen - base == doctest::Approx(0.1 * (0.25 + 2.25)).epsilon(1e-12));
}

TEST_CASE("discriminative training learns a separable sign rule") {
  // z = sign(x1) on one feature; the learned margin should beat chance by a lot.
  Rng rng(11);
  std::vector<SurrogateExample> ex;
  for (int i = 0; i < 200; ++i) {
    double x = rng.normal();
    if (std::abs(x) < 0.1) x = std::copysign(0.1, x == 0.0 ? 1.0 : x);
    ex.push_back({{x}, x > 0 ? +1 : -1, 1.0});
  }
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.learning_rate = 0.05;
  cfg.seed = 2;
  MlpScorer m = train_resp_disc(ex, {}, cfg);
  const double final_loss =
      loss_and_gradient(m, ex, TrainLoss::WeightedLogistic, 0.0, nullptr);
  CHECK(final_loss < kLn2);     // better than the zero model
  CHECK(m.params[0] > 0.5);     // slope points the right way
  int correct = 0;
  for (const auto& e : ex) {
    if ((m.raw_score(e.x) > 0 ? +1 : -1) == e.z) ++correct;
  }
  CHECK(correct == 200);
}

TEST_CASE("generative training saturates on unanimous labels") {
  Rng rng(13);
  std::vector<SurrogateExample> ex;
  for (int i = 0; i < 100; ++i) ex.push_back({{rng.normal()}, +1, 2.0});
  TrainConfig cfg;
  cfg.epochs = 500;
  cfg.learning_rate = 0.1;
  cfg.seed = 3;
  MlpScorer m = train_resp_gen(ex, {}, cfg);
  // All z = +1 pushes the responder probability toward 1 everywhere seen.
  CHECK(m.output(std::vector<double>{0.0}) > 0.9);

  for (auto& e : ex) e.z = -1;
  MlpScorer neg = train_resp_gen(ex, {}, cfg);
  CHECK(neg.output(std::vector<double>{0.0}) < 0.1);
}

TEST_CASE("minibatch training is deterministic per seed") {
  const auto ex = random_examples(64, 2, 21);
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.learning_rate = 0.01;
  cfg.batch_size = 8;
  cfg.seed = 77;
  MlpScorer a = init_mlp(2, {3}, OutputHead::Identity, 4);
  MlpScorer b = a;
  train_mlp(&a, ex, TrainLoss::WeightedLogistic, cfg);
  train_mlp(&b, ex, TrainLoss::WeightedLogistic, cfg);
  CHECK(a.params == b.params);

  MlpScorer c = init_mlp(2, {3}, OutputHead::Identity, 4);
  cfg.seed = 78;
  train_mlp(&c, ex, TrainLoss::WeightedLogistic, cfg);
  CHECK(a.params != c.params);
}

TEST_CASE("training rejects degenerate input") {
  std::vector<SurrogateExample> empty;
  MlpScorer m = init_mlp(2, {}, OutputHead::Identity, 1);
  TrainConfig cfg;
  CHECK_THROWS_AS(train_mlp(&m, empty, TrainLoss::WeightedLogistic, cfg),
                  std::invalid_argument);
  CHECK_THROWS_AS(train_mlp(nullptr, empty, TrainLoss::WeightedLogistic, cfg),
                  std::invalid_argument);
  std::vector<SurrogateExample> wrong = {{{1.0, 2.0, 3.0}, +1, 1.0}};
  CHECK_THROWS_AS(train_mlp(&m, wrong, TrainLoss::WeightedLogistic, cfg),
                  std::invalid_argument);
  CHECK_THROWS_AS(loss_and_gradient(m, empty, TrainLoss::WeightedLogistic, 0.0, nullptr),
                  std::invalid_argument);
}
