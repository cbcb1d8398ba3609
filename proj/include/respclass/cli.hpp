#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "respclass/evaluation.hpp"

namespace respclass {

// Command implementations shared by the CLI binary and the test suites.
// Each writes its outputs plus a <out>.cfg echo of the fully resolved
// configuration, and returns the process exit code (0 on success). Typed
// errors (UsageError/DataError/NumericError) propagate to the caller.

struct SimulateArgs {
  std::string scenario = "linear";
  int d = 2;
  long n = 0;
  std::uint64_t seed = 0;
  std::string out;  // prefix: writes <out>.csv, <out>_truth.csv, <out>.cfg
};
int cmd_simulate(const SimulateArgs& args);

struct TrainArgs {
  std::string data_path;
  std::string learner;
  std::string theta = "0.5";  // number or "balanced"
  std::string out;            // model path; also writes <out>.log, <out>.cfg
  bool zero_one_labels = false;
  double default_e = 0.5;
  int epochs = 100;
  double learning_rate = 1e-3;
  double lambda = 0.0;
  int batch_size = 0;  // 0 = full batch
  int cv_folds = 5;
  double svm_tol = 1e-3;
  long svm_max_iter = -1;
  std::optional<double> c_override;
  std::optional<double> gamma_override;
  std::uint64_t seed = 0;
};
int cmd_train(const TrainArgs& args);

struct EvaluateArgs {
  std::string data_path;
  std::string model_path;  // file path or "constant:+1" / "constant:-1"
  std::string theta = "0.5";
  std::string truth_path;  // optional ground-truth CSV
  std::string out;         // metrics CSV
  bool zero_one_labels = false;
  double default_e = 0.5;
};
int cmd_evaluate(const EvaluateArgs& args);

struct BenchmarkArgs {
  std::string config_path;
  std::string out_override;  // optional output prefix override
};
int cmd_benchmark(const BenchmarkArgs& args);

struct BootstrapArgs {
  std::string data_path;
  std::string out;  // intervals CSV
  int outer_b = 200;
  int inner_b = 50;
  double level = 0.95;
  int epochs = 100;
  double learning_rate = 1e-3;
  int batch_size = 0;  // 0 = full batch
  std::uint64_t seed = 0;
  bool zero_one_labels = false;
  double default_e = 0.5;
};
int cmd_bootstrap(const BootstrapArgs& args);

// Flat key=value config for benchmark runs; repeated keys append to lists.
// Exposed for tests. The out prefix lives under key "out".
struct BenchmarkFileConfig {
  BenchmarkConfig run;
  std::string out_prefix = "benchmark";
};
BenchmarkFileConfig parse_benchmark_config(const std::string& path);

// Resolves "balanced" against the dataset, otherwise parses a number.
Theta resolve_theta(const std::string& text, const Dataset& ds);

}  // namespace respclass
