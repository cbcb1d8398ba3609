#include "respclass/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <stdexcept>
#include <unordered_map>

namespace respclass {

double KernelSpec::eval(std::span<const double> a, std::span<const double> b) const {
  double dot = 0.0;
  if (kind == Kind::Linear) {
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    return dot;
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sq += diff * diff;
  }
  return std::exp(-gamma * sq);
}

double KernelScorer::score(std::span<const double> x) const {
  double acc = bias;
  for (std::size_t i = 0; i < support_vectors.size(); ++i) {
    acc += dual_coefs[i] * kernel.eval(support_vectors[i], x);
  }
  return acc;
}

namespace {

// LRU cache of kernel matrix rows, bounded by a byte budget.
class RowCache {
 public:
  RowCache(std::size_t n, std::size_t d, const double* xs, const KernelSpec& kernel,
           std::size_t budget_bytes)
      : n_(n), d_(d), xs_(xs), kernel_(kernel) {
    max_rows_ = std::max<std::size_t>(2, budget_bytes / (n * sizeof(double)));
    if (kernel_.kind == KernelSpec::Kind::Rbf) {
      sq_norms_.resize(n_);
      for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        const double* xi = xs_ + i * d_;
        for (std::size_t k = 0; k < d_; ++k) s += xi[k] * xi[k];
        sq_norms_[i] = s;
      }
    }
  }

  const double* row(std::size_t i) {
    auto it = map_.find(i);
    if (it != map_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second.lru_it);
      return it->second.values.data();
    }
    if (map_.size() >= max_rows_) {
      const std::size_t victim = lru_.back();
      lru_.pop_back();
      map_.erase(victim);
    }
    Entry entry;
    entry.values.resize(n_);
    compute_row(i, entry.values.data());
    lru_.push_front(i);
    entry.lru_it = lru_.begin();
    const double* out = entry.values.data();
    map_.emplace(i, std::move(entry));
    return out;
  }

 private:
  void compute_row(std::size_t i, double* out) const {
    const double* xi = xs_ + i * d_;
    if (kernel_.kind == KernelSpec::Kind::Linear) {
      for (std::size_t j = 0; j < n_; ++j) {
        const double* xj = xs_ + j * d_;
        double dot = 0.0;
        for (std::size_t k = 0; k < d_; ++k) dot += xi[k] * xj[k];
        out[j] = dot;
      }
      return;
    }
    const double g = kernel_.gamma;
    for (std::size_t j = 0; j < n_; ++j) {
      const double* xj = xs_ + j * d_;
      double dot = 0.0;
      for (std::size_t k = 0; k < d_; ++k) dot += xi[k] * xj[k];
      out[j] = std::exp(-g * (sq_norms_[i] + sq_norms_[j] - 2.0 * dot));
    }
  }

  struct Entry {
    std::vector<double> values;
    std::list<std::size_t>::iterator lru_it;
  };

  std::size_t n_, d_;
  const double* xs_;
  KernelSpec kernel_;
  std::size_t max_rows_;
  std::vector<double> sq_norms_;
  std::list<std::size_t> lru_;
  std::unordered_map<std::size_t, Entry> map_;
};

constexpr double kQuadFloor = 1e-12;

}  // namespace

SvmTrainResult train_respsvm(std::span<const SurrogateExample> examples,
                             const KernelSpec& kernel, const SvmOptions& opts) {
  if (!(opts.c > 0.0)) throw std::invalid_argument("train_respsvm: c must be positive");
  if (kernel.kind == KernelSpec::Kind::Rbf && !(kernel.gamma > 0.0)) {
    throw std::invalid_argument("train_respsvm: rbf gamma must be positive");
  }

  // Keep strictly positive-weight examples.
  std::vector<std::size_t> keep;
  keep.reserve(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (examples[i].w > 0.0) keep.push_back(i);
  }

  SvmTrainResult result;
  result.scorer.kernel = kernel;

  bool has_pos = false, has_neg = false;
  for (std::size_t i : keep) {
    (examples[i].z > 0 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) {
    // Single-class (or empty) input: constant rule for the surviving class.
    result.degenerate = true;
    result.converged = true;
    result.scorer.bias = keep.empty() ? 1.0 : static_cast<double>(examples[keep.front()].z);
    return result;
  }

  const std::size_t n = keep.size();
  const std::size_t d = examples[keep.front()].x.size();
  std::vector<double> xs(n * d);
  std::vector<int> z(n);
  std::vector<double> upper(n);
  for (std::size_t i = 0; i < n; ++i) {
    const SurrogateExample& ex = examples[keep[i]];
    if (ex.x.size() != d) throw std::invalid_argument("train_respsvm: dimension mismatch");
    std::copy(ex.x.begin(), ex.x.end(), xs.begin() + static_cast<long>(i * d));
    z[i] = ex.z;
    upper[i] = opts.c * ex.w;
  }

  RowCache cache(n, d, xs.data(), kernel, opts.cache_bytes);
  std::vector<double> alpha(n, 0.0);
  // Gradient of 1/2 a'Qa - sum a with Q_ij = z_i z_j K_ij; starts at -1.
  std::vector<double> grad(n, -1.0);

  const long max_iter = opts.max_iter >= 0 ? opts.max_iter
                                           : static_cast<long>(10 * n);
  long iter = 0;
  double violation = std::numeric_limits<double>::infinity();

  while (iter < max_iter) {
    // Maximal violating pair over -z_t * grad_t.
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    std::size_t i_up = n, i_low = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -static_cast<double>(z[t]) * grad[t];
      const bool in_up = (z[t] > 0) ? (alpha[t] < upper[t]) : (alpha[t] > 0.0);
      const bool in_low = (z[t] > 0) ? (alpha[t] > 0.0) : (alpha[t] < upper[t]);
      if (in_up && v > m_up) {
        m_up = v;
        i_up = t;
      }
      if (in_low && v < m_low) {
        m_low = v;
        i_low = t;
      }
    }
    violation = m_up - m_low;
    if (i_up == n || i_low == n || violation <= opts.tol) break;

    const std::size_t i = i_up, j = i_low;
    const double* ki = cache.row(i);
    const double* kj = cache.row(j);

    // Line alpha_i += z_i*s, alpha_j -= z_j*s keeps the equality constraint.
    const double quad = std::max(ki[i] + kj[j] - 2.0 * ki[j], kQuadFloor);
    double s = (m_up - m_low) / quad;
    double lo, hi;
    if (z[i] > 0) {
      lo = -alpha[i];
      hi = upper[i] - alpha[i];
    } else {
      lo = alpha[i] - upper[i];
      hi = alpha[i];
    }
    if (z[j] > 0) {
      lo = std::max(lo, alpha[j] - upper[j]);
      hi = std::min(hi, alpha[j]);
    } else {
      lo = std::max(lo, -alpha[j]);
      hi = std::min(hi, upper[j] - alpha[j]);
    }
    s = std::clamp(s, lo, hi);
    if (s == 0.0) break;  // numerically stuck on the best pair

    alpha[i] += static_cast<double>(z[i]) * s;
    alpha[j] -= static_cast<double>(z[j]) * s;
    alpha[i] = std::clamp(alpha[i], 0.0, upper[i]);
    alpha[j] = std::clamp(alpha[j], 0.0, upper[j]);
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += static_cast<double>(z[t]) * s * (ki[t] - kj[t]);
    }
    ++iter;
  }

  result.iterations = iter;
  result.kkt_violation = violation;
  result.converged = violation <= opts.tol;

  // Dual objective sum a - 1/2 a'Qa = 1/2 sum a_i (1 - grad_i).
  double objective = 0.0;
  for (std::size_t t = 0; t < n; ++t) objective += 0.5 * alpha[t] * (1.0 - grad[t]);
  result.dual_objective = objective;

  // Bias from free vectors, else the midpoint of the KKT interval.
  double free_sum = 0.0;
  std::size_t free_count = 0;
  double m_up = -std::numeric_limits<double>::infinity();
  double m_low = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < n; ++t) {
    const double v = -static_cast<double>(z[t]) * grad[t];
    if (alpha[t] > 0.0 && alpha[t] < upper[t]) {
      free_sum += v;
      ++free_count;
    }
    const bool in_up = (z[t] > 0) ? (alpha[t] < upper[t]) : (alpha[t] > 0.0);
    const bool in_low = (z[t] > 0) ? (alpha[t] > 0.0) : (alpha[t] < upper[t]);
    if (in_up) m_up = std::max(m_up, v);
    if (in_low) m_low = std::min(m_low, v);
  }
  result.scorer.bias = free_count > 0 ? free_sum / static_cast<double>(free_count)
                                      : 0.5 * (m_up + m_low);

  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0) {
      result.scorer.support_vectors.push_back(examples[keep[t]].x);
      result.scorer.dual_coefs.push_back(alpha[t] * static_cast<double>(z[t]));
    }
  }
  return result;
}

}  // namespace respclass
