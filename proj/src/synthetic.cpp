#include "respclass/synthetic.hpp"

#include <cmath>
#include <stdexcept>

#include "respclass/errors.hpp"
#include "respclass/rng.hpp"

namespace respclass {

double beta44_cdf(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  // Regularized incomplete beta I_u(4,4) = P(Bin(7,u) >= 4).
  const double v = 1.0 - u;
  const double u2 = u * u, u4 = u2 * u2;
  const double v2 = v * v;
  return 35.0 * u4 * v2 * v + 21.0 * u4 * u * v2 + 7.0 * u4 * u2 * v + u4 * u2 * u;
}

namespace {

constexpr int kGammaMaxIter = 500;
constexpr double kGammaTol = 1e-14;

// Regularized lower incomplete gamma P(a, x) via series (x < a + 1) or
// Lentz continued fraction for the complement.
double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  const double log_prefix = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    double denom = a;
    for (int k = 0; k < kGammaMaxIter; ++k) {
      denom += 1.0;
      term *= x / denom;
      sum += term;
      if (std::abs(term) < std::abs(sum) * kGammaTol) break;
    }
    return sum * std::exp(log_prefix);
  }
  // Continued fraction for Q(a, x).
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int k = 1; k <= kGammaMaxIter; ++k) {
    const double an = -static_cast<double>(k) * (static_cast<double>(k) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kGammaTol) break;
  }
  return 1.0 - std::exp(log_prefix) * h;
}

}  // namespace

double chisq_cdf(double s, int d) {
  if (d <= 0) throw std::invalid_argument("chisq_cdf: d must be positive");
  if (s <= 0.0) return 0.0;
  const double half = 0.5 * s;
  if (d % 2 == 0) {
    // 1 - e^{-s/2} sum_{k<d/2} (s/2)^k / k!
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < d / 2; ++k) {
      term *= half / static_cast<double>(k);
      sum += term;
    }
    return 1.0 - std::exp(-half) * sum;
  }
  return gamma_p(0.5 * static_cast<double>(d), half);
}

namespace {

double sq_norm(const FeatureVector& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

bool pair_sign_xor(const FeatureVector& x) {
  bool acc = false;
  for (std::size_t j = 0; j + 1 < x.size(); j += 2) {
    acc ^= (x[j] + x[j + 1] > 0.0);
  }
  return acc;
}

}  // namespace

RhoAlpha rho_alpha(const FeatureVector& x, const ScenarioSpec& spec) {
  if (static_cast<int>(x.size()) != spec.d) {
    throw std::invalid_argument("rho_alpha: dimension mismatch");
  }
  RhoAlpha out;
  if (spec.kind == ScenarioKind::Linear) {
    out.rho = 0.15 + 0.7 * (x[0] > 0.0 ? 1.0 : 0.0);
    out.alpha = 1.0 - beta44_cdf(chisq_cdf(sq_norm(x), spec.d));
  } else {
    if (spec.d % 2 != 0) throw UsageError("spherical requires even d");
    out.rho = beta44_cdf(chisq_cdf(sq_norm(x), spec.d));
    out.alpha = 0.15 + 0.7 * (pair_sign_xor(x) ? 1.0 : 0.0);
  }
  return out;
}

SyntheticDraw generate(const ScenarioSpec& spec) {
  if (spec.n <= 0) throw std::invalid_argument("generate: n must be positive");
  if (spec.d <= 0) throw std::invalid_argument("generate: d must be positive");
  if (spec.kind == ScenarioKind::Spherical && spec.d % 2 != 0) {
    throw UsageError("spherical requires even d");
  }

  Rng rng(spec.seed);
  SyntheticDraw draw;
  draw.dataset.d = static_cast<std::size_t>(spec.d);
  draw.dataset.propensity = PropensitySpec::constant(0.5);
  draw.dataset.observations.reserve(static_cast<std::size_t>(spec.n));
  draw.truth.reserve(static_cast<std::size_t>(spec.n));

  for (long i = 0; i < spec.n; ++i) {
    FeatureVector x(static_cast<std::size_t>(spec.d));
    for (auto& v : x) v = rng.normal();
    const RhoAlpha p = rho_alpha(x, spec);
    const int t = rng.bernoulli_pm1(0.5);
    const int r = rng.bernoulli_pm1(p.rho);
    const int a = rng.bernoulli_pm1(p.alpha);
    const int y = (r == +1) ? t : a;

    Observation obs;
    obs.x = x;
    obs.t = t;
    obs.y = y;
    draw.dataset.observations.push_back(std::move(obs));

    GroundTruthUnit unit;
    unit.x = std::move(x);
    unit.y_plus = (r == +1) ? +1 : a;
    unit.y_minus = (r == +1) ? -1 : a;
    unit.r = r;
    unit.a = a;
    draw.truth.push_back(std::move(unit));
  }
  return draw;
}

int bayes_label(const FeatureVector& x, const ScenarioSpec& spec, Theta theta) {
  return sign_pm(rho_alpha(x, spec).rho - theta.value());
}

}  // namespace respclass
