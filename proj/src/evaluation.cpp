#include "respclass/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "respclass/errors.hpp"
#include "respclass/losses.hpp"
#include "respclass/mlp.hpp"
#include "respclass/parallel.hpp"
#include "respclass/rng.hpp"
#include "respclass/surrogate.hpp"

namespace respclass {

EvalReport estimate_losses(const ResponderClassifier& clf, const Dataset& ds,
                           Theta theta) {
  require_valid(ds);
  const double two_theta = 2.0 * theta.value();
  const std::vector<double> q = q_values(ds);

  double sum_f_term = 0.0;
  double sum_base = 0.0;
  double sum_fn = 0.0;
  double sum_fp = 0.0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const Observation& obs = ds.observations[i];
    const double s = static_cast<double>(obs.y * obs.t) / q[i];
    const double f = static_cast<double>(predict_one(clf, obs.x));
    sum_f_term += f * (two_theta - s);
    sum_base += two_theta + (1.0 - two_theta) * s;
    sum_fn += (1.0 - f) * s;
    sum_fp += (1.0 + f) * (2.0 - s);
  }
  const double inv_n = 1.0 / static_cast<double>(ds.n());

  EvalReport report;
  report.theta = theta.value();
  report.n = ds.n();
  report.l_prime_hat = sum_f_term * inv_n;
  report.l_theta_hat = 0.25 * report.l_prime_hat + 0.25 * sum_base * inv_n;
  report.fn_hat = 0.25 * sum_fn * inv_n;
  report.fp_hat = 0.25 * sum_fp * inv_n;
  return report;
}

double accuracy_vs_bayes(const ResponderClassifier& clf,
                         std::span<const FeatureVector> xs,
                         const ScenarioSpec& spec, Theta theta) {
  if (xs.empty()) throw std::invalid_argument("accuracy_vs_bayes: no points");
  long agree = 0;
  for (const FeatureVector& x : xs) {
    if (predict_one(clf, x) == bayes_label(x, spec, theta)) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(xs.size());
}

double policy_value(const ResponderClassifier& clf, const Dataset& ds,
                    Theta theta) {
  require_valid(ds);
  const std::vector<double> q = q_values(ds);
  double sum_match = 0.0;
  long plus = 0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const Observation& obs = ds.observations[i];
    const int f = predict_one(clf, obs.x);
    if (f == +1) ++plus;
    if (f == obs.t) sum_match += static_cast<double>(obs.y) / q[i];
  }
  const double inv_n = 1.0 / static_cast<double>(ds.n());
  return sum_match * inv_n -
         2.0 * theta.value() * static_cast<double>(plus) * inv_n;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile: empty input");
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("percentile: q outside [0, 1]");
  }
  std::sort(values.begin(), values.end());
  const double rank = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

BenchmarkResult run_replications(const BenchmarkConfig& cfg) {
  if (cfg.n_grid.empty()) throw std::invalid_argument("benchmark: empty n grid");
  if (cfg.learners.empty()) throw std::invalid_argument("benchmark: no learners");
  if (cfg.replications <= 0) {
    throw std::invalid_argument("benchmark: replications must be positive");
  }
  if (cfg.eval_n <= 0) throw std::invalid_argument("benchmark: eval_n must be positive");
  for (const std::string& name : cfg.learners) {
    if (!is_known_learner(name)) {
      throw std::invalid_argument("benchmark: unknown learner " + name);
    }
  }

  const std::size_t n_learners = cfg.learners.size();
  const std::size_t n_sizes = cfg.n_grid.size();
  const std::size_t reps = static_cast<std::size_t>(cfg.replications);
  const std::size_t total = n_learners * n_sizes * reps;

  BenchmarkResult result;
  result.rows.resize(total);

  parallel_for(total, cfg.max_threads, [&](std::size_t task) {
    const std::size_t l_idx = task / (n_sizes * reps);
    const std::size_t n_idx = (task / reps) % n_sizes;
    const std::size_t rep = task % reps;

    ReplicationRow& row = result.rows[task];
    row.learner = cfg.learners[l_idx];
    row.n = cfg.n_grid[n_idx];
    row.replication = static_cast<int>(rep);

    // Draw seeds depend only on (n, replication) so every learner sees the
    // same train/eval data at a given cell.
    const std::uint64_t cell = derive_seed(cfg.seed, 1000 + n_idx);
    const std::uint64_t s_train = derive_seed(cell, 2 * rep);
    const std::uint64_t s_eval = derive_seed(cell, 2 * rep + 1);
    const std::uint64_t s_fit =
        derive_seed(derive_seed(cell, 3000 + rep), l_idx);

    try {
      ScenarioSpec train_spec{cfg.scenario, cfg.d, cfg.n_grid[n_idx], s_train};
      const SyntheticDraw train_draw = generate(train_spec);

      Theta theta = cfg.balanced_theta_mode
                        ? Theta(balanced_theta(train_draw.dataset))
                        : Theta(cfg.theta);
      const ResponderClassifier clf = train_learner(
          row.learner, train_draw.dataset, theta, cfg.options, s_fit);

      ScenarioSpec eval_spec{cfg.scenario, cfg.d, cfg.eval_n, s_eval};
      const SyntheticDraw eval_draw = generate(eval_spec);
      std::vector<FeatureVector> xs;
      xs.reserve(eval_draw.dataset.n());
      for (const Observation& obs : eval_draw.dataset.observations) {
        xs.push_back(obs.x);
      }
      row.accuracy = accuracy_vs_bayes(clf, xs, eval_spec, theta);
    } catch (const std::exception& ex) {
      row.failed = true;
      row.error = ex.what();
    }
  });

  for (std::size_t l_idx = 0; l_idx < n_learners; ++l_idx) {
    for (std::size_t n_idx = 0; n_idx < n_sizes; ++n_idx) {
      ReplicationSummary summary;
      summary.learner = cfg.learners[l_idx];
      summary.n = cfg.n_grid[n_idx];
      std::vector<double> accs;
      for (std::size_t rep = 0; rep < reps; ++rep) {
        const ReplicationRow& row =
            result.rows[(l_idx * n_sizes + n_idx) * reps + rep];
        if (row.failed) {
          ++summary.failures;
        } else {
          accs.push_back(row.accuracy);
        }
      }
      summary.replications = static_cast<int>(reps);
      if (!accs.empty()) {
        double mean = 0.0;
        for (double a : accs) mean += a;
        summary.mean = mean / static_cast<double>(accs.size());
        summary.p10 = percentile(accs, 0.10);
        summary.p90 = percentile(accs, 0.90);
      }
      result.summaries.push_back(std::move(summary));
    }
  }
  return result;
}

namespace {

Dataset resample_rows(const Dataset& ds, Rng* rng) {
  Dataset out;
  out.d = ds.d;
  out.observations.reserve(ds.n());
  std::vector<double> es;
  const bool per_row = !ds.propensity.is_constant();
  if (per_row) es.reserve(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const std::size_t j = rng->uniform_index(ds.n());
    out.observations.push_back(ds.observations[j]);
    if (per_row) es.push_back(ds.propensity.e_at(j));
  }
  out.propensity = per_row ? PropensitySpec::per_observation(std::move(es))
                           : ds.propensity;
  return out;
}

bool single_surrogate_class(const Dataset& ds) {
  int first = 0;
  for (const Observation& obs : ds.observations) {
    const int z = obs.y * obs.t;
    if (first == 0) {
      first = z;
    } else if (z != first) {
      return false;
    }
  }
  return true;
}

// Linear generative coefficients [w_1..w_d, intercept]; throws NumericError
// on divergence.
std::vector<double> fit_generative_coeffs(const Dataset& ds,
                                          const TrainConfig& cfg) {
  const std::vector<SurrogateExample> pairs = generative_examples(ds);
  MlpScorer model =
      init_mlp(static_cast<int>(ds.d), {}, OutputHead::Sigmoid, cfg.seed);
  train_mlp(&model, pairs, TrainLoss::GenerativeNll, cfg);
  std::vector<double> coeffs(model.params.begin(),
                             model.params.begin() + static_cast<long>(ds.d) + 1);
  return coeffs;
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

std::vector<CoefficientCi> bootstrap_ci(const Dataset& ds,
                                        const BootstrapOptions& opts) {
  require_valid(ds);
  if (opts.outer_b < 2) {
    throw std::invalid_argument("bootstrap_ci: outer_b must be at least 2");
  }
  if (opts.inner_b < 2) {
    throw std::invalid_argument(
        "bootstrap_ci: Studentization requires inner bootstrap (inner_b >= 2)");
  }
  if (!(opts.level > 0.0 && opts.level < 1.0)) {
    throw std::invalid_argument("bootstrap_ci: level outside (0, 1)");
  }
  if (single_surrogate_class(ds)) {
    throw DataError("bootstrap_ci: dataset has a single y*t class");
  }

  TrainConfig fit_cfg = opts.train;
  fit_cfg.seed = derive_seed(opts.seed, 1);
  const std::vector<double> full = fit_generative_coeffs(ds, fit_cfg);
  const std::size_t p = full.size();

  constexpr int kMaxRedraws = 10;
  constexpr double kSeFloor = 1e-12;

  std::vector<std::vector<double>> outer_estimates(p);
  std::vector<std::vector<double>> t_stats(p);

  Rng rng(derive_seed(opts.seed, 2));
  for (int b = 0; b < opts.outer_b; ++b) {
    Dataset outer;
    bool ok = false;
    for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
      outer = resample_rows(ds, &rng);
      if (!single_surrogate_class(outer)) {
        ok = true;
        break;
      }
    }
    if (!ok) continue;

    std::vector<double> est_b;
    try {
      TrainConfig cfg_b = opts.train;
      cfg_b.seed = derive_seed(opts.seed, 100 + static_cast<std::uint64_t>(b));
      est_b = fit_generative_coeffs(outer, cfg_b);
    } catch (const NumericError&) {
      continue;
    }

    // Inner resamples studentize this outer replicate.
    std::vector<std::vector<double>> inner_estimates(p);
    for (int j = 0; j < opts.inner_b; ++j) {
      Dataset inner;
      bool inner_ok = false;
      for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
        inner = resample_rows(outer, &rng);
        if (!single_surrogate_class(inner)) {
          inner_ok = true;
          break;
        }
      }
      if (!inner_ok) continue;
      try {
        TrainConfig cfg_j = opts.train;
        cfg_j.seed = derive_seed(
            opts.seed, 100000 + static_cast<std::uint64_t>(b) * 1000 +
                           static_cast<std::uint64_t>(j));
        const std::vector<double> est_j = fit_generative_coeffs(inner, cfg_j);
        for (std::size_t k = 0; k < p; ++k) inner_estimates[k].push_back(est_j[k]);
      } catch (const NumericError&) {
        continue;
      }
    }
    if (inner_estimates[0].size() < 2) continue;

    for (std::size_t k = 0; k < p; ++k) {
      const double se = std::max(sample_sd(inner_estimates[k]), kSeFloor);
      outer_estimates[k].push_back(est_b[k]);
      t_stats[k].push_back((est_b[k] - full[k]) / se);
    }
  }

  if (outer_estimates[0].size() < 2) {
    throw NumericError("bootstrap_ci: too few usable outer resamples");
  }

  const double alpha = 1.0 - opts.level;
  std::vector<CoefficientCi> out(p);
  for (std::size_t k = 0; k < p; ++k) {
    CoefficientCi& ci = out[k];
    ci.index = static_cast<int>(k);
    ci.name = k + 1 < p ? "x" + std::to_string(k + 1) : "intercept";
    ci.estimate = full[k];
    ci.level = opts.level;
    const double se_full = std::max(sample_sd(outer_estimates[k]), kSeFloor);
    const double t_hi = percentile(t_stats[k], 1.0 - alpha / 2.0);
    const double t_lo = percentile(t_stats[k], alpha / 2.0);
    ci.lower = full[k] - t_hi * se_full;
    ci.upper = full[k] - t_lo * se_full;
    if (ci.lower > ci.upper) std::swap(ci.lower, ci.upper);
    ci.flagged = !(ci.lower <= ci.estimate && ci.estimate <= ci.upper);
  }
  return out;
}

}  // namespace respclass
