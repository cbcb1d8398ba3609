#include "respclass/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "respclass/csv.hpp"
#include "respclass/errors.hpp"

namespace respclass {

namespace {

constexpr const char* kMagic = "respclass-model";
constexpr int kVersion = 1;

// Token-stream reader with uniform failure reporting.
class TokenReader {
 public:
  TokenReader(std::istream& in, std::string path)
      : in_(in), path_(std::move(path)) {}

  std::string word(const char* what) {
    std::string tok;
    if (!(in_ >> tok)) fail(what, "end of file");
    return tok;
  }

  void expect(const char* literal) {
    const std::string tok = word(literal);
    if (tok != literal) fail(literal, "'" + tok + "'");
  }

  double real(const char* what) {
    const std::string tok = word(what);
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      fail(what, "'" + tok + "'");
    }
  }

  long integer(const char* what) {
    const std::string tok = word(what);
    try {
      std::size_t used = 0;
      const long v = std::stol(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      fail(what, "'" + tok + "'");
    }
  }

  long count(const char* what, long max_allowed) {
    const long v = integer(what);
    if (v < 0 || v > max_allowed) {
      fail(what, "out-of-range count " + std::to_string(v));
    }
    return v;
  }

  [[noreturn]] void fail(const std::string& expected, const std::string& got) {
    throw DataError(path_ + ": expected " + expected + ", got " + got);
  }

 private:
  std::istream& in_;
  std::string path_;
};

constexpr long kMaxCount = 100'000'000;

void write_real(std::ostream& out, double v) {
  if (!std::isfinite(v)) {
    throw DataError("cannot save model with non-finite parameter");
  }
  out << ' ' << format_double17(v);
}

void write_linear(std::ostream& out, const LinearScorer& s) {
  out << "linear " << s.weights.size();
  write_real(out, s.bias);
  for (double w : s.weights) write_real(out, w);
  out << '\n';
}

LinearScorer read_linear(TokenReader& r) {
  LinearScorer s;
  const long d = r.count("linear dimension", kMaxCount);
  s.bias = r.real("linear bias");
  s.weights.resize(static_cast<std::size_t>(d));
  for (double& w : s.weights) w = r.real("linear weight");
  return s;
}

void write_kernel(std::ostream& out, const KernelScorer& s) {
  out << "kernel " << (s.kernel.kind == KernelSpec::Kind::Rbf ? "rbf" : "linear");
  write_real(out, s.kernel.gamma);
  write_real(out, s.bias);
  const std::size_t d = s.support_vectors.empty() ? 0 : s.support_vectors.front().size();
  out << ' ' << s.support_vectors.size() << ' ' << d << '\n';
  for (std::size_t i = 0; i < s.support_vectors.size(); ++i) {
    if (s.support_vectors[i].size() != d) {
      throw DataError("cannot save model with ragged support vectors");
    }
    out << format_double17(s.dual_coefs[i]);
    for (double v : s.support_vectors[i]) write_real(out, v);
    out << '\n';
  }
}

KernelScorer read_kernel(TokenReader& r) {
  KernelScorer s;
  const std::string kind = r.word("kernel kind");
  if (kind == "rbf") {
    s.kernel.kind = KernelSpec::Kind::Rbf;
  } else if (kind == "linear") {
    s.kernel.kind = KernelSpec::Kind::Linear;
  } else {
    r.fail("kernel kind rbf|linear", "'" + kind + "'");
  }
  s.kernel.gamma = r.real("kernel gamma");
  s.bias = r.real("kernel bias");
  const long m = r.count("support vector count", kMaxCount);
  const long d = r.count("support vector dimension", kMaxCount);
  s.support_vectors.resize(static_cast<std::size_t>(m));
  s.dual_coefs.resize(static_cast<std::size_t>(m));
  for (long i = 0; i < m; ++i) {
    s.dual_coefs[static_cast<std::size_t>(i)] = r.real("dual coefficient");
    auto& sv = s.support_vectors[static_cast<std::size_t>(i)];
    sv.resize(static_cast<std::size_t>(d));
    for (double& v : sv) v = r.real("support vector entry");
  }
  return s;
}

void write_mlp(std::ostream& out, const MlpScorer& m) {
  out << "mlp " << m.input_dim << ' '
      << (m.head == OutputHead::Sigmoid ? "sigmoid" : "identity") << ' '
      << m.hidden.size();
  for (int h : m.hidden) out << ' ' << h;
  out << ' ' << m.params.size() << '\n';
  for (std::size_t i = 0; i < m.params.size(); ++i) {
    out << format_double17(m.params[i]) << (i + 1 == m.params.size() ? '\n' : ' ');
  }
}

// Body after the "mlp" tag (the tag doubles as the scorer-kind token).
MlpScorer read_mlp_body(TokenReader& r) {
  MlpScorer m;
  m.input_dim = static_cast<int>(r.count("mlp input dimension", kMaxCount));
  const std::string head = r.word("mlp head");
  if (head == "sigmoid") {
    m.head = OutputHead::Sigmoid;
  } else if (head == "identity") {
    m.head = OutputHead::Identity;
  } else {
    r.fail("mlp head sigmoid|identity", "'" + head + "'");
  }
  const long layers = r.count("mlp hidden layer count", 1000);
  m.hidden.resize(static_cast<std::size_t>(layers));
  for (int& h : m.hidden) {
    h = static_cast<int>(r.count("mlp hidden width", kMaxCount));
    if (h == 0) r.fail("positive hidden width", "0");
  }
  const long n_params = r.count("mlp parameter count", kMaxCount);
  m.params.resize(static_cast<std::size_t>(n_params));
  for (double& v : m.params) v = r.real("mlp parameter");
  if (m.params.size() != m.parameter_count()) {
    r.fail("parameter count " + std::to_string(m.parameter_count()),
           std::to_string(m.params.size()));
  }
  return m;
}

MlpScorer read_mlp(TokenReader& r) {
  r.expect("mlp");
  return read_mlp_body(r);
}

void write_arm(std::ostream& out, const LogisticArm& arm) {
  if (arm.is_constant) {
    out << "constant";
    write_real(out, arm.const_prob);
    out << '\n';
  } else {
    write_linear(out, arm.model);
  }
}

LogisticArm read_arm(TokenReader& r) {
  LogisticArm arm;
  const std::string kind = r.word("arm kind");
  if (kind == "constant") {
    arm.is_constant = true;
    arm.const_prob = r.real("arm probability");
  } else if (kind == "linear") {
    arm.model = read_linear(r);
  } else {
    r.fail("arm kind constant|linear", "'" + kind + "'");
  }
  return arm;
}

}  // namespace

void save_classifier(const std::string& path, const ResponderClassifier& clf) {
  std::ostringstream out;
  out << kMagic << ' ' << kVersion << '\n';
  std::visit(
      [&out](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, ScoreThresholdClassifier>) {
          out << "score_threshold ";
          std::visit(
              [&out](const auto& s) {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, LinearScorer>) {
                  write_linear(out, s);
                } else if constexpr (std::is_same_v<S, KernelScorer>) {
                  write_kernel(out, s);
                } else {
                  write_mlp(out, s);
                }
              },
              c.scorer);
        } else if constexpr (std::is_same_v<T, ProbThresholdClassifier>) {
          out << "prob_threshold";
          write_real(out, c.theta);
          out << '\n';
          write_mlp(out, c.model);
        } else {
          out << "cate_plugin";
          write_real(out, c.theta);
          out << '\n';
          write_arm(out, c.treated);
          write_arm(out, c.control);
        }
      },
      clf);
  out << "end\n";

  std::ofstream file(path);
  if (!file) throw DataError("cannot open for writing: " + path);
  file << out.str();
  if (!file) throw DataError("write failed: " + path);
}

ResponderClassifier load_classifier(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw DataError("cannot open: " + path);
  TokenReader r(file, path);

  r.expect(kMagic);
  const long version = r.integer("model version");
  if (version != kVersion) {
    r.fail("model version " + std::to_string(kVersion), std::to_string(version));
  }

  ResponderClassifier clf = constant_classifier(+1, 0);
  const std::string kind = r.word("classifier kind");
  if (kind == "score_threshold") {
    const std::string scorer = r.word("scorer kind");
    if (scorer == "linear") {
      clf = ScoreThresholdClassifier{read_linear(r)};
    } else if (scorer == "kernel") {
      clf = ScoreThresholdClassifier{read_kernel(r)};
    } else if (scorer == "mlp") {
      clf = ScoreThresholdClassifier{read_mlp_body(r)};
    } else {
      r.fail("scorer kind linear|kernel|mlp", "'" + scorer + "'");
    }
  } else if (kind == "prob_threshold") {
    ProbThresholdClassifier c;
    c.theta = r.real("theta");
    c.model = read_mlp(r);
    clf = std::move(c);
  } else if (kind == "cate_plugin") {
    CatePluginClassifier c;
    c.theta = r.real("theta");
    c.treated = read_arm(r);
    c.control = read_arm(r);
    clf = std::move(c);
  } else {
    r.fail("classifier kind", "'" + kind + "'");
  }

  r.expect("end");
  return clf;
}

}  // namespace respclass
