#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "respclass/cli.hpp"
#include "respclass/csv.hpp"
#include "respclass/errors.hpp"

using namespace respclass;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("respclass_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string write_file(const TempDir& tmp, const std::string& name,
                       const std::string& body) {
  const auto p = tmp.file(name);
  std::ofstream out(p);
  out << body;
  return p;
}

SimulateArgs small_sim(const TempDir& tmp, const std::string& name,
                       std::uint64_t seed) {
  SimulateArgs s;
  s.scenario = "linear";
  s.d = 2;
  s.n = 160;
  s.seed = seed;
  s.out = tmp.file(name);
  return s;
}

}  // namespace

TEST_CASE("simulate writes data, truth, and config echo deterministically") {
  TempDir tmp;
  auto args = small_sim(tmp, "a", 40);
  REQUIRE(cmd_simulate(args) == 0);
  const auto csv = slurp(tmp.file("a.csv"));
  const auto truth = slurp(tmp.file("a_truth.csv"));
  const auto cfg = slurp(tmp.file("a.cfg"));
  CHECK(csv.rfind("x1,x2,t,y\n", 0) == 0);
  CHECK(truth.rfind("x1,x2,y_plus,y_minus,r,a\n", 0) == 0);
  CHECK(cfg.find("command=simulate\n") != std::string::npos);
  CHECK(cfg.find("scenario=linear\n") != std::string::npos);
  CHECK(cfg.find("seed=40\n") != std::string::npos);

  auto again = small_sim(tmp, "b", 40);
  REQUIRE(cmd_simulate(again) == 0);
  CHECK(slurp(tmp.file("b.csv")) == csv);
  CHECK(slurp(tmp.file("b_truth.csv")) == truth);

  auto other = small_sim(tmp, "c", 41);
  REQUIRE(cmd_simulate(other) == 0);
  CHECK(slurp(tmp.file("c.csv")) != csv);

  // The data and truth files agree row by row on x and with y = realized arm.
  const auto ds = read_dataset_csv(tmp.file("a.csv"));
  const auto gt = read_ground_truth_csv(tmp.file("a_truth.csv"));
  REQUIRE(ds.n() == gt.size());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    REQUIRE(ds.observations[i].x == gt[i].x);
    const int expect =
        ds.observations[i].t == +1 ? gt[i].y_plus : gt[i].y_minus;
    REQUIRE(ds.observations[i].y == expect);
  }
}

TEST_CASE("simulate validates its arguments") {
  TempDir tmp;
  SimulateArgs bad = small_sim(tmp, "x", 1);
  bad.scenario = "cubic";
  CHECK_THROWS_AS(cmd_simulate(bad), UsageError);
  bad = small_sim(tmp, "x", 1);
  bad.n = 0;
  CHECK_THROWS_AS(cmd_simulate(bad), UsageError);
  bad = small_sim(tmp, "x", 1);
  bad.scenario = "spherical";
  bad.d = 3;  // spherical needs even d
  CHECK_THROWS_AS(cmd_simulate(bad), UsageError);
  bad = small_sim(tmp, "x", 1);
  bad.out.clear();
  CHECK_THROWS_AS(cmd_simulate(bad), UsageError);
}

TEST_CASE("train then evaluate round trip") {
  TempDir tmp;
  auto sim = small_sim(tmp, "data", 50);
  sim.n = 500;
  REQUIRE(cmd_simulate(sim) == 0);

  TrainArgs t;
  t.data_path = tmp.file("data.csv");
  t.learner = "resplr-gen";
  t.out = tmp.file("model.txt");
  t.epochs = 60;
  t.learning_rate = 0.01;
  t.batch_size = 16;
  t.seed = 9;
  REQUIRE(cmd_train(t) == 0);

  const auto log = slurp(tmp.file("model.txt.log"));
  CHECK(log.find("learner=resplr-gen") != std::string::npos);
  CHECK(log.find("final_loss=") != std::string::npos);
  const auto cfg = slurp(tmp.file("model.txt.cfg"));
  CHECK(cfg.find("batch_size=16") != std::string::npos);
  CHECK(cfg.find("theta_resolved=0.5") != std::string::npos);

  EvaluateArgs e;
  e.data_path = tmp.file("data.csv");
  e.model_path = tmp.file("model.txt");
  e.truth_path = tmp.file("data_truth.csv");
  e.out = tmp.file("metrics.csv");
  REQUIRE(cmd_evaluate(e) == 0);
  const auto metrics = slurp(tmp.file("metrics.csv"));
  CHECK(metrics.rfind("theta,n,l_theta_hat,l_prime_hat,fp_hat,fn_hat,"
                      "policy_value,bayes_accuracy\n", 0) == 0);
  // Exactly one data row.
  CHECK(std::count(metrics.begin(), metrics.end(), '\n') == 2);

  // Without truth the bayes column disappears.
  EvaluateArgs e2 = e;
  e2.truth_path.clear();
  e2.out = tmp.file("metrics2.csv");
  REQUIRE(cmd_evaluate(e2) == 0);
  CHECK(slurp(tmp.file("metrics2.csv"))
            .rfind("theta,n,l_theta_hat,l_prime_hat,fp_hat,fn_hat,policy_value\n",
                   0) == 0);
}

TEST_CASE("constant rules evaluate without a model file") {
  TempDir tmp;
  auto sim = small_sim(tmp, "data", 51);
  REQUIRE(cmd_simulate(sim) == 0);

  EvaluateArgs e;
  e.data_path = tmp.file("data.csv");
  e.model_path = "constant:+1";
  e.theta = "balanced";
  e.out = tmp.file("p.csv");
  REQUIRE(cmd_evaluate(e) == 0);
  e.model_path = "constant:-1";
  e.out = tmp.file("m.csv");
  REQUIRE(cmd_evaluate(e) == 0);

  // At the balanced theta both constants share one weighted loss.
  auto field = [](const std::string& contents, int idx) {
    std::istringstream in(contents);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    auto cells = split_csv_line(row);
    return std::stod(cells.at(static_cast<std::size_t>(idx)));
  };
  const double lp = field(slurp(tmp.file("p.csv")), 2);
  const double lm = field(slurp(tmp.file("m.csv")), 2);
  CHECK(lp == doctest::Approx(lm).epsilon(1e-12));
}

TEST_CASE("evaluate rejects a model whose dimension mismatches the data") {
  TempDir tmp;
  auto sim2 = small_sim(tmp, "d2", 52);
  REQUIRE(cmd_simulate(sim2) == 0);
  SimulateArgs sim4 = small_sim(tmp, "d4", 52);
  sim4.d = 4;
  REQUIRE(cmd_simulate(sim4) == 0);

  TrainArgs t;
  t.data_path = tmp.file("d2.csv");
  t.learner = "resplr-disc";
  t.out = tmp.file("m2.txt");
  t.epochs = 5;
  REQUIRE(cmd_train(t) == 0);

  EvaluateArgs e;
  e.data_path = tmp.file("d4.csv");
  e.model_path = tmp.file("m2.txt");
  e.out = tmp.file("mm.csv");
  CHECK_THROWS_AS(cmd_evaluate(e), DataError);
}

TEST_CASE("train validates learner names and hyperparameters") {
  TempDir tmp;
  auto sim = small_sim(tmp, "data", 53);
  REQUIRE(cmd_simulate(sim) == 0);
  TrainArgs t;
  t.data_path = tmp.file("data.csv");
  t.out = tmp.file("m.txt");

  t.learner = "mystery";
  CHECK_THROWS_AS(cmd_train(t), UsageError);
  t.learner = "resplr-disc";
  t.epochs = 0;
  CHECK_THROWS_AS(cmd_train(t), UsageError);
  t.epochs = 10;
  t.learning_rate = 0.0;
  CHECK_THROWS_AS(cmd_train(t), UsageError);
  t.learning_rate = 0.01;
  t.theta = "1.5";
  CHECK_THROWS_AS(cmd_train(t), UsageError);
  t.theta = "nonsense";
  CHECK_THROWS_AS(cmd_train(t), UsageError);
}

TEST_CASE("benchmark config parsing") {
  TempDir tmp;
  const auto p = write_file(tmp, "run.cfg",
                            "# comment line\n"
                            "scenario=spherical\n"
                            "d=4\n"
                            "n=100\n"
                            "n=200\n"
                            "learner=resplr-gen\n"
                            "learner=tlearner-lr\n"
                            "replications=3\n"
                            "eval_n=500\n"
                            "theta=balanced\n"
                            "seed=77\n"
                            "out=" + tmp.file("bench") + "\n"
                            "batch_size=16\n"
                            "cv_folds=2\n"
                            "svm_c=2.5\n"
                            "svm_gamma_grid=0.5 5\n");
  const auto cfg = parse_benchmark_config(p);
  CHECK(cfg.run.scenario == ScenarioKind::Spherical);
  CHECK(cfg.run.d == 4);
  CHECK(cfg.run.n_grid == std::vector<long>{100, 200});
  CHECK(cfg.run.learners == std::vector<std::string>{"resplr-gen", "tlearner-lr"});
  CHECK(cfg.run.replications == 3);
  CHECK(cfg.run.eval_n == 500);
  CHECK(cfg.run.balanced_theta_mode);
  CHECK(cfg.run.seed == 77);
  CHECK(cfg.out_prefix == tmp.file("bench"));
  CHECK(cfg.run.options.train.batch_size == 16);
  CHECK(cfg.run.options.cv_folds == 2);
  REQUIRE(cfg.run.options.c_override.has_value());
  CHECK(*cfg.run.options.c_override == 2.5);
  CHECK(cfg.run.options.svm_gamma_grid == std::vector<double>{0.5, 5.0});

  CHECK_THROWS_AS(
      parse_benchmark_config(write_file(tmp, "bad.cfg", "mystery_key=1\n")),
      DataError);
  CHECK_THROWS_AS(
      parse_benchmark_config(write_file(tmp, "bad2.cfg", "learner=unknown\n")),
      DataError);
  CHECK_THROWS_AS(parse_benchmark_config(tmp.file("absent.cfg")), DataError);
}

TEST_CASE("benchmark produces ordered rows and a summary") {
  TempDir tmp;
  const auto p = write_file(tmp, "run.cfg",
                            "scenario=linear\n"
                            "d=2\n"
                            "n=200\n"
                            "learner=resplr-gen\n"
                            "learner=tlearner-lr\n"
                            "replications=2\n"
                            "eval_n=400\n"
                            "seed=5\n"
                            "epochs=40\n"
                            "batch_size=16\n"
                            "learning_rate=0.01\n"
                            "out=" + tmp.file("bench") + "\n");
  BenchmarkArgs args;
  args.config_path = p;
  REQUIRE(cmd_benchmark(args) == 0);

  const auto rows = slurp(tmp.file("bench_replications.csv"));
  std::istringstream in(rows);
  std::string line;
  std::getline(in, line);
  CHECK(line == "learner,n,replication,accuracy,failed,error");
  std::vector<std::string> data_lines;
  while (std::getline(in, line)) data_lines.push_back(line);
  REQUIRE(data_lines.size() == 4);
  CHECK(data_lines[0].rfind("resplr-gen,200,0,", 0) == 0);
  CHECK(data_lines[1].rfind("resplr-gen,200,1,", 0) == 0);
  CHECK(data_lines[2].rfind("tlearner-lr,200,0,", 0) == 0);
  CHECK(data_lines[3].rfind("tlearner-lr,200,1,", 0) == 0);

  const auto summary = slurp(tmp.file("bench_summary.csv"));
  CHECK(summary.rfind("learner,n,mean_accuracy,p10_accuracy,p90_accuracy,"
                      "replications,failures\n", 0) == 0);
  CHECK(std::count(summary.begin(), summary.end(), '\n') == 3);

  // Reruns are byte-identical.
  BenchmarkArgs rerun;
  rerun.config_path = p;
  rerun.out_override = tmp.file("again");
  REQUIRE(cmd_benchmark(rerun) == 0);
  CHECK(slurp(tmp.file("again_replications.csv")) == rows);
  CHECK(slurp(tmp.file("again_summary.csv")) == summary);
}

TEST_CASE("bootstrap command writes interval rows") {
  TempDir tmp;
  auto sim = small_sim(tmp, "data", 54);
  sim.n = 120;
  REQUIRE(cmd_simulate(sim) == 0);

  BootstrapArgs b;
  b.data_path = tmp.file("data.csv");
  b.out = tmp.file("ci.csv");
  b.outer_b = 8;
  b.inner_b = 3;
  b.epochs = 30;
  b.learning_rate = 0.05;
  b.batch_size = 16;
  b.seed = 3;
  REQUIRE(cmd_bootstrap(b) == 0);

  const auto ci = slurp(tmp.file("ci.csv"));
  std::istringstream in(ci);
  std::string line;
  std::getline(in, line);
  CHECK(line == "coefficient,estimate,lower,upper,level,significant,flagged");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  REQUIRE(rows.size() == 3);  // x1, x2, intercept
  CHECK(rows[0].rfind("x1,", 0) == 0);
  CHECK(rows[1].rfind("x2,", 0) == 0);
  CHECK(rows[2].rfind("intercept,", 0) == 0);
  for (const auto& r : rows) {
    const auto cells = split_csv_line(r);
    REQUIRE(cells.size() == 7);
    CHECK(std::stod(cells[2]) <= std::stod(cells[3]));  // lower <= upper
    CHECK(cells[4] == "0.95");
  }

  // Validation.
  BootstrapArgs bad = b;
  bad.inner_b = 0;
  CHECK_THROWS_AS(cmd_bootstrap(bad), UsageError);
  bad = b;
  bad.outer_b = 0;
  CHECK_THROWS_AS(cmd_bootstrap(bad), UsageError);
  bad = b;
  bad.level = 1.0;
  CHECK_THROWS_AS(cmd_bootstrap(bad), UsageError);
}

TEST_CASE("resolve_theta") {
  Dataset ds;
  ds.d = 1;
  ds.observations = {{{0.1}, +1, +1}, {{0.2}, -1, -1}};
  ds.propensity = PropensitySpec::constant(0.5);
  CHECK(resolve_theta("0.25", ds).value() == 0.25);
  CHECK_THROWS_AS(resolve_theta("2.0", ds), UsageError);
  CHECK_THROWS_AS(resolve_theta("abc", ds), UsageError);
  CHECK_THROWS_AS(resolve_theta("", ds), UsageError);
  // yt/Q = +2 for both rows, so the balancing point is mean(s)/2 = 1.
  CHECK(resolve_theta("balanced", ds).value() == doctest::Approx(1.0));
}
