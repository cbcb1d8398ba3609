#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "respclass/cli.hpp"
#include "respclass/errors.hpp"

namespace {

constexpr int kUsageExit = 2;
constexpr int kDataExit = 3;
constexpr int kNumericExit = 4;

void add_ingest_flags(CLI::App* cmd, bool* zero_one, double* default_e) {
  cmd->add_flag("--zero-one-labels", *zero_one,
                "Accept t,y coded 0/1 and map them to -1/+1");
  cmd->add_option("--default-e", *default_e,
                  "Constant treatment propensity when the data has no e column")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Responder classification under effect monotonicity"};
  app.require_subcommand(1);

  respclass::SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Draw a synthetic trial");
  simulate->add_option("--scenario", sim.scenario, "linear or spherical")
      ->default_val("linear");
  simulate->add_option("--d", sim.d, "Feature dimension")->default_val(2);
  simulate->add_option("--n", sim.n, "Number of units")->required();
  simulate->add_option("--seed", sim.seed, "RNG seed")->default_val(0);
  simulate->add_option("--out", sim.out, "Output prefix")->required();

  respclass::TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train", "Fit a responder classifier");
  train_cmd->add_option("--data", train.data_path, "Dataset CSV")->required();
  train_cmd->add_option("--learner", train.learner, "Learner name")->required();
  train_cmd->add_option("--theta", train.theta,
                        "Threshold in [0,1], or 'balanced'");
  train_cmd->add_option("--out", train.out, "Model output path")->required();
  add_ingest_flags(train_cmd, &train.zero_one_labels, &train.default_e);
  train_cmd->add_option("--epochs", train.epochs, "Training epochs");
  train_cmd->add_option("--learning-rate", train.learning_rate, "Adam step size");
  train_cmd->add_option("--lambda", train.lambda, "Squared-weight penalty");
  train_cmd->add_option("--batch-size", train.batch_size,
                        "Minibatch size (0 = full batch)");
  train_cmd->add_option("--cv-folds", train.cv_folds,
                        "Cross-validation folds (0/1 disables)");
  train_cmd->add_option("--svm-tol", train.svm_tol, "SVM KKT tolerance");
  train_cmd->add_option("--svm-max-iter", train.svm_max_iter,
                        "SVM iteration cap (-1 = 10n)");
  double svm_c = 0.0, svm_gamma = 0.0;
  CLI::Option* c_opt =
      train_cmd->add_option("--svm-c", svm_c, "Fix C instead of cross-validating");
  CLI::Option* gamma_opt = train_cmd->add_option(
      "--svm-gamma", svm_gamma, "Fix the RBF gamma instead of cross-validating");
  train_cmd->add_option("--seed", train.seed, "RNG seed");

  respclass::EvaluateArgs eval;
  CLI::App* eval_cmd =
      app.add_subcommand("evaluate", "Estimate losses for a saved model");
  eval_cmd->add_option("--data", eval.data_path, "Dataset CSV")->required();
  eval_cmd->add_option("--model", eval.model_path,
                       "Model file, or constant:+1 / constant:-1")
      ->required();
  eval_cmd->add_option("--theta", eval.theta, "Threshold in [0,1], or 'balanced'");
  eval_cmd->add_option("--truth", eval.truth_path,
                       "Ground-truth CSV (adds the bayes_accuracy column)");
  eval_cmd->add_option("--out", eval.out, "Metrics CSV path")->required();
  add_ingest_flags(eval_cmd, &eval.zero_one_labels, &eval.default_e);

  respclass::BenchmarkArgs bench;
  CLI::App* bench_cmd =
      app.add_subcommand("benchmark", "Replicated accuracy experiment");
  bench_cmd->add_option("--config", bench.config_path, "key=value config file")
      ->required();
  bench_cmd->add_option("--out", bench.out_override,
                        "Override the config's output prefix");

  respclass::BootstrapArgs boot;
  CLI::App* boot_cmd = app.add_subcommand(
      "bootstrap", "Studentized bootstrap intervals for the linear generative model");
  boot_cmd->add_option("--data", boot.data_path, "Dataset CSV")->required();
  boot_cmd->add_option("--out", boot.out, "Interval table CSV path")->required();
  boot_cmd->add_option("--outer", boot.outer_b, "Outer bootstrap resamples");
  boot_cmd->add_option("--inner", boot.inner_b, "Inner resamples per outer fit");
  boot_cmd->add_option("--level", boot.level, "Confidence level");
  boot_cmd->add_option("--epochs", boot.epochs, "Epochs per refit");
  boot_cmd->add_option("--learning-rate", boot.learning_rate, "Adam step size");
  boot_cmd->add_option("--batch-size", boot.batch_size,
                       "Minibatch size (0 = full batch)");
  boot_cmd->add_option("--seed", boot.seed, "RNG seed");
  add_ingest_flags(boot_cmd, &boot.zero_one_labels, &boot.default_e);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsageExit;
  }

  try {
    if (simulate->parsed()) return respclass::cmd_simulate(sim);
    if (train_cmd->parsed()) {
      if (c_opt->count() > 0) train.c_override = svm_c;
      if (gamma_opt->count() > 0) train.gamma_override = svm_gamma;
      return respclass::cmd_train(train);
    }
    if (eval_cmd->parsed()) return respclass::cmd_evaluate(eval);
    if (bench_cmd->parsed()) return respclass::cmd_benchmark(bench);
    if (boot_cmd->parsed()) return respclass::cmd_bootstrap(boot);
  } catch (const respclass::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageExit;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageExit;
  } catch (const respclass::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataExit;
  } catch (const respclass::NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericExit;
  }
  return kUsageExit;
}
