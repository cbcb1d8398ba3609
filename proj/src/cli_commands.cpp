#include "respclass/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "respclass/csv.hpp"
#include "respclass/errors.hpp"
#include "respclass/serialize.hpp"
#include "respclass/surrogate.hpp"

namespace respclass {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw DataError("write failed: " + path);
}

// Resolved-config echo so every run is replayable from its outputs.
class ConfigEcho {
 public:
  explicit ConfigEcho(std::string command) { add("command", std::move(command)); }

  void add(const std::string& key, const std::string& value) {
    lines_.push_back(key + "=" + value);
  }
  void add(const std::string& key, double value) { add(key, format_double(value)); }
  void add(const std::string& key, long value) { add(key, std::to_string(value)); }
  void add(const std::string& key, int value) { add(key, std::to_string(value)); }
  void add(const std::string& key, bool value) {
    add(key, std::string(value ? "true" : "false"));
  }
  void add(const std::string& key, std::uint64_t value) {
    add(key, std::to_string(value));
  }

  void write(const std::string& path) const {
    std::ofstream out = open_out(path);
    for (const std::string& line : lines_) out << line << '\n';
    finish(out, path);
  }

 private:
  std::vector<std::string> lines_;
};

ScenarioKind parse_scenario(const std::string& name) {
  if (name == "linear") return ScenarioKind::Linear;
  if (name == "spherical") return ScenarioKind::Spherical;
  throw UsageError("unknown scenario '" + name + "' (expected linear|spherical)");
}

const char* scenario_name(ScenarioKind kind) {
  return kind == ScenarioKind::Linear ? "linear" : "spherical";
}

double parse_real(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError(what + ": cannot parse number '" + text + "'");
  }
}

long parse_long(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError(what + ": cannot parse integer '" + text + "'");
  }
}

}  // namespace

Theta resolve_theta(const std::string& text, const Dataset& ds) {
  if (text == "balanced") return Theta(balanced_theta(ds));
  const double v = parse_real(text, "theta");
  try {
    return Theta(v);
  } catch (const std::exception& ex) {
    throw UsageError(std::string("theta: ") + ex.what());
  }
}

int cmd_simulate(const SimulateArgs& args) {
  if (args.out.empty()) throw UsageError("simulate: missing output prefix");
  if (args.n <= 0) throw UsageError("simulate: n must be positive");

  ScenarioSpec spec;
  spec.kind = parse_scenario(args.scenario);
  spec.d = args.d;
  spec.n = args.n;
  spec.seed = args.seed;

  const SyntheticDraw draw = generate(spec);
  write_dataset_csv(args.out + ".csv", draw.dataset);
  write_ground_truth_csv(args.out + "_truth.csv", draw.truth);

  ConfigEcho echo("simulate");
  echo.add("scenario", std::string(scenario_name(spec.kind)));
  echo.add("d", spec.d);
  echo.add("n", spec.n);
  echo.add("seed", spec.seed);
  echo.add("out", args.out);
  echo.write(args.out + ".cfg");
  return 0;
}

int cmd_train(const TrainArgs& args) {
  if (args.out.empty()) throw UsageError("train: missing output path");
  if (!is_known_learner(args.learner)) {
    std::string names;
    for (const std::string& n : learner_names()) {
      if (!names.empty()) names += ", ";
      names += n;
    }
    throw UsageError("train: unknown learner '" + args.learner +
                     "' (expected one of: " + names + ")");
  }
  if (args.epochs < 1) throw UsageError("train: epochs must be at least 1");
  if (args.learning_rate <= 0.0) throw UsageError("train: learning rate must be positive");
  if (args.lambda < 0.0) throw UsageError("train: lambda must be nonnegative");
  if (args.batch_size < 0) throw UsageError("train: batch size must be nonnegative");

  CsvReadOptions read_opts;
  read_opts.zero_one_labels = args.zero_one_labels;
  read_opts.default_e = args.default_e;
  const Dataset ds = read_dataset_csv(args.data_path, read_opts);
  const Theta theta = resolve_theta(args.theta, ds);

  LearnerOptions opts;
  opts.train.epochs = args.epochs;
  opts.train.learning_rate = args.learning_rate;
  opts.train.lambda = args.lambda;
  opts.train.batch_size = args.batch_size;
  opts.cv_folds = args.cv_folds;
  opts.svm.tol = args.svm_tol;
  opts.svm.max_iter = args.svm_max_iter;
  opts.c_override = args.c_override;
  opts.gamma_override = args.gamma_override;

  TrainDiagnostics diag;
  const ResponderClassifier clf =
      train_learner(args.learner, ds, theta, opts, args.seed, &diag);
  save_classifier(args.out, clf);

  {
    std::ofstream log = open_out(args.out + ".log");
    log << "learner=" << args.learner << '\n';
    log << "n=" << ds.n() << '\n';
    log << "d=" << ds.d << '\n';
    log << "theta=" << format_double(theta.value()) << '\n';
    log << "final_loss=" << format_double(diag.final_loss) << '\n';
    if (args.learner == "respsvm-linear" || args.learner == "respsvm-rbf") {
      log << "selected_c=" << format_double(diag.selected_c) << '\n';
      if (args.learner == "respsvm-rbf") {
        log << "selected_gamma=" << format_double(diag.selected_gamma) << '\n';
      }
      log << "converged=" << (diag.svm_converged ? "true" : "false") << '\n';
      log << "degenerate=" << (diag.degenerate ? "true" : "false") << '\n';
      for (const std::string& line : diag.cv_table) log << line << '\n';
    }
    finish(log, args.out + ".log");
  }

  ConfigEcho echo("train");
  echo.add("data", args.data_path);
  echo.add("learner", args.learner);
  echo.add("theta", args.theta);
  echo.add("theta_resolved", theta.value());
  echo.add("zero_one_labels", args.zero_one_labels);
  echo.add("default_e", args.default_e);
  echo.add("epochs", args.epochs);
  echo.add("learning_rate", args.learning_rate);
  echo.add("lambda", args.lambda);
  echo.add("batch_size", args.batch_size);
  echo.add("cv_folds", args.cv_folds);
  echo.add("svm_tol", args.svm_tol);
  echo.add("svm_max_iter", args.svm_max_iter);
  if (args.c_override) echo.add("svm_c", *args.c_override);
  if (args.gamma_override) echo.add("svm_gamma", *args.gamma_override);
  echo.add("seed", args.seed);
  echo.add("out", args.out);
  echo.write(args.out + ".cfg");
  return 0;
}

int cmd_evaluate(const EvaluateArgs& args) {
  if (args.out.empty()) throw UsageError("evaluate: missing output path");

  CsvReadOptions read_opts;
  read_opts.zero_one_labels = args.zero_one_labels;
  read_opts.default_e = args.default_e;
  const Dataset ds = read_dataset_csv(args.data_path, read_opts);
  const Theta theta = resolve_theta(args.theta, ds);

  ResponderClassifier clf = constant_classifier(+1, ds.d);
  if (args.model_path == "constant:+1") {
    // already the default
  } else if (args.model_path == "constant:-1") {
    clf = constant_classifier(-1, ds.d);
  } else {
    clf = load_classifier(args.model_path);
    const int dim = classifier_dim(clf);
    if (dim >= 0 && static_cast<std::size_t>(dim) != ds.d) {
      throw DataError("model expects d=" + std::to_string(dim) +
                      " but data has d=" + std::to_string(ds.d));
    }
  }

  const EvalReport report = estimate_losses(clf, ds, theta);
  const double policy = policy_value(clf, ds, theta);

  bool have_truth = false;
  double bayes_accuracy = 0.0;
  if (!args.truth_path.empty()) {
    const std::vector<GroundTruthUnit> truth = read_ground_truth_csv(args.truth_path);
    if (truth.size() != ds.n()) {
      throw DataError("truth row count " + std::to_string(truth.size()) +
                      " does not match dataset rows " + std::to_string(ds.n()));
    }
    long agree = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (predict_one(clf, ds.observations[i].x) == truth[i].r) ++agree;
    }
    bayes_accuracy = static_cast<double>(agree) / static_cast<double>(truth.size());
    have_truth = true;
  }

  {
    std::ofstream out = open_out(args.out);
    out << "theta,n,l_theta_hat,l_prime_hat,fp_hat,fn_hat,policy_value";
    if (have_truth) out << ",bayes_accuracy";
    out << '\n';
    out << format_double(report.theta) << ',' << report.n << ','
        << format_double(report.l_theta_hat) << ','
        << format_double(report.l_prime_hat) << ','
        << format_double(report.fp_hat) << ',' << format_double(report.fn_hat)
        << ',' << format_double(policy);
    if (have_truth) out << ',' << format_double(bayes_accuracy);
    out << '\n';
    finish(out, args.out);
  }

  ConfigEcho echo("evaluate");
  echo.add("data", args.data_path);
  echo.add("model", args.model_path);
  echo.add("theta", args.theta);
  echo.add("theta_resolved", theta.value());
  if (have_truth) echo.add("truth", args.truth_path);
  echo.add("zero_one_labels", args.zero_one_labels);
  echo.add("default_e", args.default_e);
  echo.add("out", args.out);
  echo.write(args.out + ".cfg");
  return 0;
}

BenchmarkFileConfig parse_benchmark_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);

  BenchmarkFileConfig cfg;
  cfg.run.n_grid.clear();
  cfg.run.learners.clear();

  bool theta_balanced = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // Strip comments and whitespace-only lines.
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string text;
    for (char ch : line) {
      if (ch != '\r') text.push_back(ch);
    }
    const auto first = text.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = text.find_last_not_of(" \t");
    text = text.substr(first, last - first + 1);

    const std::size_t eq = text.find('=');
    if (eq == std::string::npos) {
      throw DataError(path + " line " + std::to_string(line_no) +
                      ": expected key=value");
    }
    std::string key = text.substr(0, eq);
    std::string value = text.substr(eq + 1);
    auto strip = [](std::string& s) {
      const auto b = s.find_first_not_of(" \t");
      if (b == std::string::npos) {
        s.clear();
        return;
      }
      const auto e = s.find_last_not_of(" \t");
      s = s.substr(b, e - b + 1);
    };
    strip(key);
    strip(value);
    const std::string where = path + " line " + std::to_string(line_no);
    if (key.empty() || value.empty()) {
      throw DataError(where + ": expected key=value");
    }

    if (key == "scenario") {
      cfg.run.scenario = parse_scenario(value);
    } else if (key == "d") {
      cfg.run.d = static_cast<int>(parse_long(value, where));
    } else if (key == "n") {
      cfg.run.n_grid.push_back(parse_long(value, where));
    } else if (key == "learner") {
      if (!is_known_learner(value)) {
        throw DataError(where + ": unknown learner '" + value + "'");
      }
      cfg.run.learners.push_back(value);
    } else if (key == "replications") {
      cfg.run.replications = static_cast<int>(parse_long(value, where));
    } else if (key == "eval_n") {
      cfg.run.eval_n = parse_long(value, where);
    } else if (key == "theta") {
      if (value == "balanced") {
        theta_balanced = true;
      } else {
        theta_balanced = false;
        cfg.run.theta = parse_real(value, where);
      }
    } else if (key == "seed") {
      cfg.run.seed = static_cast<std::uint64_t>(parse_long(value, where));
    } else if (key == "out") {
      cfg.out_prefix = value;
    } else if (key == "max_threads") {
      cfg.run.max_threads = static_cast<int>(parse_long(value, where));
    } else if (key == "epochs") {
      cfg.run.options.train.epochs = static_cast<int>(parse_long(value, where));
    } else if (key == "learning_rate") {
      cfg.run.options.train.learning_rate = parse_real(value, where);
    } else if (key == "lambda") {
      cfg.run.options.train.lambda = parse_real(value, where);
    } else if (key == "batch_size") {
      cfg.run.options.train.batch_size = static_cast<int>(parse_long(value, where));
    } else if (key == "cv_folds") {
      cfg.run.options.cv_folds = static_cast<int>(parse_long(value, where));
    } else if (key == "svm_tol") {
      cfg.run.options.svm.tol = parse_real(value, where);
    } else if (key == "svm_max_iter") {
      cfg.run.options.svm.max_iter = parse_long(value, where);
    } else if (key == "svm_c") {
      cfg.run.options.c_override = parse_real(value, where);
    } else if (key == "svm_gamma") {
      cfg.run.options.gamma_override = parse_real(value, where);
    } else if (key == "svm_c_grid") {
      cfg.run.options.svm_c_grid.clear();
      std::istringstream vs(value);
      std::string tok;
      while (vs >> tok) cfg.run.options.svm_c_grid.push_back(parse_real(tok, where));
    } else if (key == "svm_gamma_grid") {
      cfg.run.options.svm_gamma_grid.clear();
      std::istringstream vs(value);
      std::string tok;
      while (vs >> tok) {
        cfg.run.options.svm_gamma_grid.push_back(parse_real(tok, where));
      }
    } else {
      throw DataError(where + ": unknown key '" + key + "'");
    }
  }
  cfg.run.balanced_theta_mode = theta_balanced;
  return cfg;
}

int cmd_benchmark(const BenchmarkArgs& args) {
  BenchmarkFileConfig cfg = parse_benchmark_config(args.config_path);
  if (!args.out_override.empty()) cfg.out_prefix = args.out_override;

  const BenchmarkResult result = run_replications(cfg.run);

  const std::string rows_path = cfg.out_prefix + "_replications.csv";
  {
    std::ofstream out = open_out(rows_path);
    out << "learner,n,replication,accuracy,failed,error\n";
    for (const ReplicationRow& row : result.rows) {
      std::string err = row.error;
      std::replace(err.begin(), err.end(), ',', ';');
      std::replace(err.begin(), err.end(), '\n', ' ');
      out << row.learner << ',' << row.n << ',' << row.replication << ','
          << (row.failed ? "" : format_double(row.accuracy)) << ','
          << (row.failed ? "true" : "false") << ',' << err << '\n';
    }
    finish(out, rows_path);
  }

  const std::string summary_path = cfg.out_prefix + "_summary.csv";
  {
    std::ofstream out = open_out(summary_path);
    out << "learner,n,mean_accuracy,p10_accuracy,p90_accuracy,replications,failures\n";
    for (const ReplicationSummary& s : result.summaries) {
      out << s.learner << ',' << s.n << ',' << format_double(s.mean) << ','
          << format_double(s.p10) << ',' << format_double(s.p90) << ','
          << s.replications << ',' << s.failures << '\n';
    }
    finish(out, summary_path);
  }

  ConfigEcho echo("benchmark");
  echo.add("config", args.config_path);
  echo.add("scenario", std::string(scenario_name(cfg.run.scenario)));
  echo.add("d", cfg.run.d);
  for (long n : cfg.run.n_grid) echo.add("n", n);
  for (const std::string& l : cfg.run.learners) echo.add("learner", l);
  echo.add("replications", cfg.run.replications);
  echo.add("eval_n", cfg.run.eval_n);
  if (cfg.run.balanced_theta_mode) {
    echo.add("theta", std::string("balanced"));
  } else {
    echo.add("theta", cfg.run.theta);
  }
  echo.add("seed", cfg.run.seed);
  echo.add("max_threads", cfg.run.max_threads);
  echo.add("epochs", cfg.run.options.train.epochs);
  echo.add("learning_rate", cfg.run.options.train.learning_rate);
  echo.add("lambda", cfg.run.options.train.lambda);
  echo.add("batch_size", cfg.run.options.train.batch_size);
  echo.add("cv_folds", cfg.run.options.cv_folds);
  echo.add("out", cfg.out_prefix);
  echo.write(cfg.out_prefix + ".cfg");
  return 0;
}

int cmd_bootstrap(const BootstrapArgs& args) {
  if (args.out.empty()) throw UsageError("bootstrap: missing output path");
  if (args.outer_b <= 0) throw UsageError("bootstrap: outer_b must be positive");
  if (args.inner_b <= 0) {
    throw UsageError("bootstrap: Studentization requires inner bootstrap");
  }
  if (!(args.level > 0.0 && args.level < 1.0)) {
    throw UsageError("bootstrap: level must lie in (0, 1)");
  }

  CsvReadOptions read_opts;
  read_opts.zero_one_labels = args.zero_one_labels;
  read_opts.default_e = args.default_e;
  const Dataset ds = read_dataset_csv(args.data_path, read_opts);

  BootstrapOptions opts;
  opts.outer_b = args.outer_b;
  opts.inner_b = args.inner_b;
  opts.level = args.level;
  opts.seed = args.seed;
  opts.train.epochs = args.epochs;
  opts.train.learning_rate = args.learning_rate;
  opts.train.batch_size = args.batch_size;

  const std::vector<CoefficientCi> cis = bootstrap_ci(ds, opts);

  {
    std::ofstream out = open_out(args.out);
    out << "coefficient,estimate,lower,upper,level,significant,flagged\n";
    for (const CoefficientCi& ci : cis) {
      const bool significant = ci.lower > 0.0 || ci.upper < 0.0;
      out << ci.name << ',' << format_double(ci.estimate) << ','
          << format_double(ci.lower) << ',' << format_double(ci.upper) << ','
          << format_double(ci.level) << ',' << (significant ? "true" : "false")
          << ',' << (ci.flagged ? "true" : "false") << '\n';
    }
    finish(out, args.out);
  }

  ConfigEcho echo("bootstrap");
  echo.add("data", args.data_path);
  echo.add("outer_b", args.outer_b);
  echo.add("inner_b", args.inner_b);
  echo.add("level", args.level);
  echo.add("epochs", args.epochs);
  echo.add("learning_rate", args.learning_rate);
  echo.add("batch_size", args.batch_size);
  echo.add("seed", args.seed);
  echo.add("zero_one_labels", args.zero_one_labels);
  echo.add("default_e", args.default_e);
  echo.add("out", args.out);
  echo.write(args.out + ".cfg");
  return 0;
}

}  // namespace respclass
