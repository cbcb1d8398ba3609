#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "qp_oracle.hpp"
#include "respclass/rng.hpp"
#include "respclass/svm.hpp"

using namespace respclass;

namespace {

// Dual objective of a trained scorer evaluated against the raw instance list,
// reconstructed from alpha = |dual_coef| implied by coef = alpha * z.
double dual_value(const std::vector<SurrogateExample>& ex, const KernelSpec& k,
                  const std::vector<double>& alpha) {
  const std::size_t n = ex.size();
  double lin = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lin += alpha[i];
    for (std::size_t j = 0; j < n; ++j) {
      quad += alpha[i] * alpha[j] * ex[i].z * ex[j].z * k.eval(ex[i].x, ex[j].x);
    }
  }
  return lin - 0.5 * quad;
}

std::vector<SurrogateExample> random_instance(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SurrogateExample> ex;
  for (int i = 0; i < n; ++i) {
    SurrogateExample e;
    e.x.resize(static_cast<std::size_t>(d));
    for (auto& v : e.x) v = rng.normal();
    e.z = rng.next_double() < 0.5 ? -1 : +1;
    e.w = rng.next_double() < 0.5 ? 1.0 : 3.0;
    ex.push_back(std::move(e));
  }
  // Make sure both classes appear so the problem is not degenerate.
  ex[0].z = +1;
  ex[1].z = -1;
  return ex;
}

}  // namespace

TEST_CASE("kernel evaluations") {
  std::vector<double> a = {1.0, 2.0}, b = {3.0, -1.0};
  CHECK(KernelSpec::linear().eval(a, b) == doctest::Approx(1.0));
  // ||a-b||^2 = 4 + 9 = 13
  CHECK(KernelSpec::rbf(0.5).eval(a, b) == doctest::Approx(std::exp(-0.5 * 13.0)));
  CHECK(KernelSpec::rbf(0.5).eval(a, a) == doctest::Approx(1.0));
}

TEST_CASE("two separable points get unit margins") {
  std::vector<SurrogateExample> ex = {
      {{1.0}, +1, 1.0},
      {{-1.0}, -1, 1.0},
  };
  SvmOptions opts;
  opts.c = 10.0;
  opts.tol = 1e-6;
  auto r = train_respsvm(ex, KernelSpec::linear(), opts);
  CHECK(r.converged);
  CHECK_FALSE(r.degenerate);
  // Max-margin separator is w = 1, b = 0: scores +-1.
  CHECK(r.scorer.score(ex[0].x) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.scorer.score(ex[1].x) == doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("smo matches the exhaustive qp oracle on small instances") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const int n = 3 + static_cast<int>(seed % 4);  // 3..6 points
    auto ex = random_instance(n, 2, 1000 + seed);
    const KernelSpec kernel = seed % 2 == 0 ? KernelSpec::linear() : KernelSpec::rbf(0.7);
    SvmOptions opts;
    opts.c = 1.5;
    opts.tol = 1e-6;
    opts.max_iter = 100000;  // the default 10n cap is sized for tol 1e-3
    auto r = train_respsvm(ex, kernel, opts);
    REQUIRE(r.converged);

    std::vector<int> z;
    std::vector<double> upper;
    std::vector<std::vector<double>> kmat;
    for (const auto& e : ex) {
      z.push_back(e.z);
      upper.push_back(opts.c * e.w);
    }
    kmat.resize(ex.size(), std::vector<double>(ex.size()));
    for (std::size_t i = 0; i < ex.size(); ++i) {
      for (std::size_t j = 0; j < ex.size(); ++j) {
        kmat[i][j] = kernel.eval(ex[i].x, ex[j].x);
      }
    }
    auto best = qp_oracle::solve(z, kmat, upper);
    REQUIRE(best.found);
    CHECK(std::abs(r.dual_objective - best.objective) <= 1e-4);
    CHECK(r.kkt_violation <= opts.tol);
  }
}

TEST_CASE("weight three equals the point written down three times") {
  auto base = random_instance(8, 2, 555);
  for (auto& e : base) e.w = 1.0;
  base[2].w = 3.0;
  base[5].w = 3.0;

  std::vector<SurrogateExample> tripled;
  for (const auto& e : base) {
    int copies = e.w == 3.0 ? 3 : 1;
    for (int c = 0; c < copies; ++c) tripled.push_back({e.x, e.z, 1.0});
  }

  SvmOptions opts;
  opts.c = 1.0;
  opts.tol = 1e-7;
  opts.max_iter = 100000;
  for (const KernelSpec& k : {KernelSpec::linear(), KernelSpec::rbf(0.5)}) {
    auto a = train_respsvm(base, k, opts);
    auto b = train_respsvm(tripled, k, opts);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    // The duals agree up to splitting one box into three, so compare the
    // induced decision surfaces on a grid rather than the coefficients.
    CHECK(a.dual_objective == doctest::Approx(b.dual_objective).epsilon(1e-4));
    Rng rng(9);
    for (int g = 0; g < 100; ++g) {
      std::vector<double> x = {rng.normal() * 2.0, rng.normal() * 2.0};
      CHECK(a.scorer.score(x) == doctest::Approx(b.scorer.score(x)).epsilon(5e-3));
    }
  }
}

TEST_CASE("single-class input degenerates to a constant rule") {
  std::vector<SurrogateExample> ex = {
      {{0.0, 1.0}, +1, 1.0},
      {{2.0, -1.0}, +1, 3.0},
  };
  auto r = train_respsvm(ex, KernelSpec::linear(), SvmOptions{});
  CHECK(r.degenerate);
  CHECK(r.scorer.support_vectors.empty());
  CHECK(r.scorer.score(std::vector<double>{5.0, 5.0}) > 0.0);

  for (auto& e : ex) e.z = -1;
  auto neg = train_respsvm(ex, KernelSpec::linear(), SvmOptions{});
  CHECK(neg.degenerate);
  CHECK(neg.scorer.score(std::vector<double>{5.0, 5.0}) < 0.0);
}

TEST_CASE("zero-weight rows do not influence the fit") {
  auto ex = random_instance(6, 2, 777);
  auto with_noise = ex;
  // A wild zero-weight point must be ignored entirely.
  with_noise.push_back({{100.0, -100.0}, -1, 0.0});
  SvmOptions opts;
  opts.tol = 1e-6;
  auto a = train_respsvm(ex, KernelSpec::linear(), opts);
  auto b = train_respsvm(with_noise, KernelSpec::linear(), opts);
  CHECK(a.dual_objective == doctest::Approx(b.dual_objective).epsilon(1e-10));
  CHECK(a.scorer.bias == doctest::Approx(b.scorer.bias).epsilon(1e-8));
}

TEST_CASE("training is deterministic") {
  auto ex = random_instance(30, 3, 31);
  SvmOptions opts;
  opts.c = 2.0;
  auto a = train_respsvm(ex, KernelSpec::rbf(0.3), opts);
  auto b = train_respsvm(ex, KernelSpec::rbf(0.3), opts);
  CHECK(a.dual_objective == b.dual_objective);
  CHECK(a.scorer.dual_coefs == b.scorer.dual_coefs);
  CHECK(a.scorer.bias == b.scorer.bias);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("dual objective reported matches its definition") {
  auto ex = random_instance(12, 2, 404);
  SvmOptions opts;
  opts.tol = 1e-6;
  auto r = train_respsvm(ex, KernelSpec::linear(), opts);
  REQUIRE(r.converged);
  // Recover alpha over the kept (nonzero-weight) points in input order.
  std::vector<double> alpha(ex.size(), 0.0);
  std::size_t sv = 0;
  for (std::size_t i = 0; i < ex.size() && sv < r.scorer.support_vectors.size(); ++i) {
    if (ex[i].x == r.scorer.support_vectors[sv]) {
      alpha[i] = r.scorer.dual_coefs[sv] * ex[i].z;
      ++sv;
    }
  }
  CHECK(sv == r.scorer.support_vectors.size());
  CHECK(dual_value(ex, KernelSpec::linear(), alpha) ==
        doctest::Approx(r.dual_objective).epsilon(1e-10));
}
