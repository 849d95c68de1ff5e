#include "gltlab/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gltlab/error.hpp"
#include "gltlab/kernels.hpp"

namespace gltlab {

namespace {
constexpr double kPi = std::numbers::pi;

bool exactly_zero(const CMatrix& m) {
  for (Eigen::Index j = 0; j < m.size(); ++j)
    if (m.data()[j] != 0.0) return false;
  return true;
}
}  // namespace

// ---------------------------------------------------------------------------
// TrigPolynomial

TrigPolynomial::TrigPolynomial(int d, int r) : d_(d), r_(r) {
  if (d < 1 || r < 1) throw Error(ErrorKind::invalid_size, "trigonometric polynomial needs d, r >= 1");
}

void TrigPolynomial::set(const MultiIndex& k, const CMatrix& block) {
  if (static_cast<int>(k.dim()) != d_)
    throw Error(ErrorKind::invalid_size, "offset " + k.to_string() + " has wrong dimension");
  if (block.rows() != r_ || block.cols() != r_)
    throw Error(ErrorKind::invalid_size, "coefficient block must be r x r");
  if (exactly_zero(block))
    coefficients_.erase(k);
  else
    coefficients_[k] = block;
}

CMatrix TrigPolynomial::coefficient(const MultiIndex& k) const {
  auto it = coefficients_.find(k);
  return it == coefficients_.end() ? CMatrix::Zero(r_, r_) : it->second;
}

MultiIndex TrigPolynomial::degree() const {
  MultiIndex deg = MultiIndex::filled(d_, 0);
  for (const auto& [k, c] : coefficients_)
    for (int j = 0; j < d_; ++j) deg[j] = std::max(deg[j], k[j] < 0 ? -k[j] : k[j]);
  return deg;
}

TrigPolynomial TrigPolynomial::truncated(const MultiIndex& max_degree) const {
  TrigPolynomial out(d_, r_);
  for (const auto& [k, c] : coefficients_) {
    bool keep = true;
    for (int j = 0; j < d_; ++j) keep = keep && std::abs(k[j]) <= max_degree[j];
    if (keep) out.coefficients_[k] = c;
  }
  return out;
}

CMatrix TrigPolynomial::evaluate(std::span<const double> theta) const {
  CMatrix out = CMatrix::Zero(r_, r_);
  for (const auto& [k, c] : coefficients_) {
    double phase = 0.0;
    for (int j = 0; j < d_; ++j) phase += static_cast<double>(k[j]) * theta[j];
    out += std::polar(1.0, phase) * c;
  }
  return out;
}

bool TrigPolynomial::hermitian() const {
  double scale = 0.0;
  for (const auto& [k, c] : coefficients_) scale = std::max(scale, c.cwiseAbs().maxCoeff());
  const double tol = 8.0 * std::numeric_limits<double>::epsilon() * scale;
  for (const auto& [k, c] : coefficients_) {
    const CMatrix mirror = coefficient(-k);
    if ((mirror - c.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

bool operator==(const TrigPolynomial& a, const TrigPolynomial& b) {
  if (a.d_ != b.d_ || a.r_ != b.r_ || a.coefficients_.size() != b.coefficients_.size()) return false;
  auto it = b.coefficients_.begin();
  for (const auto& [k, c] : a.coefficients_) {
    if (it->first != k || it->second != c) return false;
    ++it;
  }
  return true;
}

// ---------------------------------------------------------------------------
// ExprMatrix / CoefficientFunction

ExprMatrix ExprMatrix::scalar(ScalarExprPtr e) {
  ExprMatrix m;
  m.entries.push_back(std::move(e));
  return m;
}

CMatrix ExprMatrix::evaluate(std::span<const double> x, std::span<const double> t, int r) const {
  if (!bracketed) return gltlab::evaluate(*entries.front(), x, t) * CMatrix::Identity(r, r);
  CMatrix out(rows, rows);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < rows; ++j) out(i, j) = gltlab::evaluate(*entries[i * rows + j], x, t);
  return out;
}

int ExprMatrix::max_variable(ScalarOp kind) const {
  int m = 0;
  for (const auto& e : entries) m = std::max(m, gltlab::max_variable(*e, kind));
  return m;
}

bool structurally_equal(const ExprMatrix& a, const ExprMatrix& b) {
  if (a.rows != b.rows || a.bracketed != b.bracketed || a.entries.size() != b.entries.size())
    return false;
  for (std::size_t j = 0; j < a.entries.size(); ++j)
    if (!structurally_equal(*a.entries[j], *b.entries[j])) return false;
  return true;
}

CoefficientFunction::CoefficientFunction(int d, int r, Evaluator fn, bool hermitian)
    : d_(d), r_(r), fn_(std::move(fn)), hermitian_(hermitian) {
  if (d < 1 || r < 1) throw Error(ErrorKind::invalid_size, "coefficient function needs d, r >= 1");
}

bool hermitian_on_probe(const ExprMatrix& m, int d, int r, bool space) {
  constexpr int kProbe = 7;
  std::vector<double> x(d, 0.5), t(d, 0.0);
  std::int64_t total = 1;
  for (int j = 0; j < d && total < 4096; ++j) total *= kProbe;
  for (std::int64_t idx = 0; idx < total; ++idx) {
    std::int64_t rem = idx;
    for (int j = d; j-- > 0;) {
      const double u = static_cast<double>(rem % kProbe) / (kProbe - 1);
      rem /= kProbe;
      if (space)
        x[j] = u;
      else
        t[j] = -kPi + 2.0 * kPi * u;
    }
    CMatrix v;
    try {
      v = m.evaluate(x, t, r);
    } catch (const Error&) {
      continue;
    }
    if (v != v.adjoint()) return false;
  }
  return true;
}

CoefficientFunction CoefficientFunction::from_expressions(ExprMatrix m, int d, int r) {
  if (m.bracketed && m.rows != r)
    throw Error(ErrorKind::invalid_size, "coefficient matrix is " + std::to_string(m.rows) +
                                             "x" + std::to_string(m.rows) + ", expected r = " +
                                             std::to_string(r));
  const bool herm = hermitian_on_probe(m, d, r, true);
  auto shared = std::make_shared<const ExprMatrix>(std::move(m));
  CoefficientFunction a(
      d, r,
      [shared, r](std::span<const double> x) { return shared->evaluate(x, {}, r); }, herm);
  a.expressions_ = shared;
  return a;
}

// ---------------------------------------------------------------------------
// NamedFunction

cplx NamedFunction::operator()(cplx z) const {
  switch (kind) {
    case Kind::poly: {
      cplx acc = 0.0;
      for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * z + *it;
      return acc;
    }
    case Kind::exp: return z.imag() == 0.0 ? cplx(std::exp(z.real())) : std::exp(z);
    case Kind::sin: return z.imag() == 0.0 ? cplx(std::sin(z.real())) : std::sin(z);
    case Kind::cos: return z.imag() == 0.0 ? cplx(std::cos(z.real())) : std::cos(z);
    case Kind::abs: return std::abs(z);
  }
  return {};
}

std::string NamedFunction::name() const {
  switch (kind) {
    case Kind::exp: return "exp";
    case Kind::sin: return "sin";
    case Kind::cos: return "cos";
    case Kind::abs: return "abs";
    case Kind::poly: {
      std::string s = "poly[";
      for (std::size_t j = 0; j < coefficients.size(); ++j) {
        if (j) s += ",";
        s += format_number(coefficients[j]);
      }
      return s + "]";
    }
  }
  return "?";
}

NamedFunction NamedFunction::parse(const std::string& name) {
  NamedFunction f;
  if (name == "exp") f.kind = Kind::exp;
  else if (name == "sin") f.kind = Kind::sin;
  else if (name == "cos") f.kind = Kind::cos;
  else if (name == "abs") f.kind = Kind::abs;
  else if (name.rfind("poly[", 0) == 0 && name.back() == ']') {
    f.kind = Kind::poly;
    std::string body = name.substr(5, name.size() - 6);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != item.size())
        throw Error(ErrorKind::semantic, "bad polynomial coefficient '" + item + "'");
      f.coefficients.push_back(v);
    }
    if (f.coefficients.empty()) throw Error(ErrorKind::semantic, "empty polynomial");
  } else {
    throw Error(ErrorKind::semantic,
                "unknown matrix function '" + name + "' (expected exp, sin, cos, abs or poly[...])");
  }
  return f;
}

// ---------------------------------------------------------------------------
// Symbol nodes

struct Symbol::Node {
  int d = 1;
  int r = 1;
  bool hermitian = false;
  bool space = false;
  bool freq = false;
  virtual ~Node() = default;
  virtual CMatrix eval(std::span<const double> x, std::span<const double> t) const = 0;
  virtual std::string describe() const = 0;
};

namespace {

using Node = Symbol::Node;

struct TrigNode final : Node {
  TrigPolynomial f;
  explicit TrigNode(TrigPolynomial p) : f(std::move(p)) {}
  CMatrix eval(std::span<const double>, std::span<const double> t) const override {
    return f.evaluate(t);
  }
  std::string describe() const override {
    std::string s = "trig(degree " + f.degree().to_string() + ")";
    return s;
  }
};

struct FreqExprNode final : Node {
  ExprMatrix m;
  explicit FreqExprNode(ExprMatrix e) : m(std::move(e)) {}
  CMatrix eval(std::span<const double>, std::span<const double> t) const override {
    return m.evaluate({}, t, r);
  }
  std::string describe() const override {
    return m.bracketed ? "f(theta)[matrix]" : "f(theta) = " + format(*m.entries.front());
  }
};

struct CoefNode final : Node {
  CoefficientFunction a;
  explicit CoefNode(CoefficientFunction f) : a(std::move(f)) {}
  CMatrix eval(std::span<const double> x, std::span<const double>) const override { return a(x); }
  std::string describe() const override {
    const auto* e = a.expressions();
    return e && !e->bracketed ? "a(x) = " + format(*e->entries.front()) : "a(x)";
  }
};

struct ConstNode final : Node {
  CMatrix c;
  CMatrix eval(std::span<const double>, std::span<const double>) const override { return c; }
  std::string describe() const override { return "const"; }
};

struct AdjointNode final : Node {
  std::shared_ptr<const Node> child;
  CMatrix eval(std::span<const double> x, std::span<const double> t) const override {
    return child->eval(x, t).adjoint();
  }
  std::string describe() const override { return "(" + child->describe() + ")^*"; }
};

struct LinCombNode final : Node {
  cplx alpha, beta;
  std::shared_ptr<const Node> a, b;
  CMatrix eval(std::span<const double> x, std::span<const double> t) const override {
    return alpha * a->eval(x, t) + beta * b->eval(x, t);
  }
  std::string describe() const override {
    return format_complex(alpha) + "*" + a->describe() + " + " + format_complex(beta) + "*" +
           b->describe();
  }
};

struct ProductNode final : Node {
  std::shared_ptr<const Node> a, b;
  CMatrix eval(std::span<const double> x, std::span<const double> t) const override {
    return a->eval(x, t) * b->eval(x, t);
  }
  std::string describe() const override { return "(" + a->describe() + ")(" + b->describe() + ")"; }
};

struct InverseNode final : Node {
  std::shared_ptr<const Node> child;
  CMatrix eval(std::span<const double> x, std::span<const double> t) const override {
    const CMatrix v = child->eval(x, t);
    if (r == 1) {
      if (v(0, 0) == 0.0) throw Error(ErrorKind::singular_evaluation, "pointwise inverse of 0");
      return CMatrix::Constant(1, 1, 1.0 / v(0, 0));
    }
    Eigen::JacobiSVD<CMatrix> svd(v, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    if (s(s.size() - 1) <= std::numeric_limits<double>::epsilon() * s(0) * r || s(0) == 0.0)
      throw Error(ErrorKind::singular_evaluation, "pointwise inverse of a singular matrix");
    return svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().adjoint();
  }
  std::string describe() const override { return "(" + child->describe() + ")^-1"; }
};

struct ApplyNode final : Node {
  NamedFunction f;
  std::shared_ptr<const Node> child;
  CMatrix eval(std::span<const double> x, std::span<const double> t) const override {
    const CMatrix v = child->eval(x, t);
    if (r == 1) return CMatrix::Constant(1, 1, f(cplx(v(0, 0).real())));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(v);
    Eigen::VectorXcd fv(r);
    for (int j = 0; j < r; ++j) fv(j) = f(cplx(es.eigenvalues()(j)));
    return es.eigenvectors() * fv.asDiagonal() * es.eigenvectors().adjoint();
  }
  std::string describe() const override { return f.name() + "(" + child->describe() + ")"; }
};

void require_compatible(const Symbol& a, const Symbol& b) {
  if (a.d() != b.d() || a.r() != b.r())
    throw Error(ErrorKind::calculus, "symbols have incompatible (d, r): (" + std::to_string(a.d()) +
                                         ", " + std::to_string(a.r()) + ") vs (" +
                                         std::to_string(b.d()) + ", " + std::to_string(b.r()) + ")");
}

}  // namespace

int Symbol::d() const { return node_->d; }
int Symbol::r() const { return node_->r; }
bool Symbol::hermitian() const { return node_->hermitian; }
bool Symbol::depends_on_space() const { return node_->space; }
bool Symbol::depends_on_frequency() const { return node_->freq; }
std::string Symbol::describe() const { return node_->describe(); }

CMatrix Symbol::evaluate(std::span<const double> x, std::span<const double> theta) const {
  const int d = node_->d;
  if (static_cast<int>(x.size()) < d || static_cast<int>(theta.size()) < d)
    throw Error(ErrorKind::domain, "evaluation point has fewer than d coordinates");
  constexpr double slack = 1e-12;
  for (int j = 0; j < d; ++j) {
    if (!(x[j] >= -slack && x[j] <= 1.0 + slack))
      throw Error(ErrorKind::domain, "x" + std::to_string(j + 1) + " = " + format_number(x[j]) +
                                         " outside [0,1]");
    if (!(theta[j] >= -kPi - slack && theta[j] <= kPi + slack))
      throw Error(ErrorKind::domain, "t" + std::to_string(j + 1) + " = " +
                                         format_number(theta[j]) + " outside [-pi,pi]");
  }
  return node_->eval(x, theta);
}

CMatrix Symbol::evaluate_unchecked(std::span<const double> x, std::span<const double> theta) const {
  return node_->eval(x, theta);
}

Symbol Symbol::trigonometric(TrigPolynomial f) {
  auto n = std::make_shared<TrigNode>(std::move(f));
  n->d = n->f.d();
  n->r = n->f.r();
  n->hermitian = n->f.hermitian();
  n->freq = true;
  return Symbol(n);
}

Symbol Symbol::frequency(ExprMatrix f, int d, int r, bool hermitian) {
  if (f.bracketed && f.rows != r)
    throw Error(ErrorKind::invalid_size, "frequency symbol matrix has wrong order");
  auto n = std::make_shared<FreqExprNode>(std::move(f));
  n->d = d;
  n->r = r;
  n->hermitian = hermitian;
  n->freq = true;
  return Symbol(n);
}

Symbol Symbol::coefficient(CoefficientFunction a) {
  auto n = std::make_shared<CoefNode>(std::move(a));
  n->d = n->a.d();
  n->r = n->a.r();
  n->hermitian = n->a.hermitian();
  n->space = true;
  return Symbol(n);
}

Symbol Symbol::constant(const CMatrix& c, int d) {
  auto n = std::make_shared<ConstNode>();
  n->c = c;
  n->d = d;
  n->r = static_cast<int>(c.rows());
  n->hermitian = c == c.adjoint();
  return Symbol(n);
}

Symbol Symbol::adjoint(const Symbol& s) {
  auto n = std::make_shared<AdjointNode>();
  n->child = s.node_;
  n->d = s.d();
  n->r = s.r();
  n->hermitian = s.hermitian();
  n->space = s.depends_on_space();
  n->freq = s.depends_on_frequency();
  return Symbol(n);
}

Symbol Symbol::linear_combination(cplx alpha, const Symbol& a, cplx beta, const Symbol& b) {
  require_compatible(a, b);
  auto n = std::make_shared<LinCombNode>();
  n->alpha = alpha;
  n->beta = beta;
  n->a = a.node_;
  n->b = b.node_;
  n->d = a.d();
  n->r = a.r();
  n->hermitian = a.hermitian() && b.hermitian() && alpha.imag() == 0.0 && beta.imag() == 0.0;
  n->space = a.depends_on_space() || b.depends_on_space();
  n->freq = a.depends_on_frequency() || b.depends_on_frequency();
  return Symbol(n);
}

Symbol Symbol::product(const Symbol& a, const Symbol& b) {
  require_compatible(a, b);
  auto n = std::make_shared<ProductNode>();
  n->a = a.node_;
  n->b = b.node_;
  n->d = a.d();
  n->r = a.r();
  // Scalar Hermitian symbols are real-valued, so their product is too.
  n->hermitian = a.r() == 1 && a.hermitian() && b.hermitian();
  n->space = a.depends_on_space() || b.depends_on_space();
  n->freq = a.depends_on_frequency() || b.depends_on_frequency();
  return Symbol(n);
}

Symbol Symbol::inverse(const Symbol& s) {
  auto n = std::make_shared<InverseNode>();
  n->child = s.node_;
  n->d = s.d();
  n->r = s.r();
  n->hermitian = s.hermitian();
  n->space = s.depends_on_space();
  n->freq = s.depends_on_frequency();
  return Symbol(n);
}

Symbol Symbol::apply(const NamedFunction& f, const Symbol& s) {
  if (!s.hermitian())
    throw Error(ErrorKind::calculus, "matrix function " + f.name() +
                                         " applied to a symbol not declared Hermitian");
  auto n = std::make_shared<ApplyNode>();
  n->f = f;
  n->child = s.node_;
  n->d = s.d();
  n->r = s.r();
  n->hermitian = true;
  n->space = s.depends_on_space();
  n->freq = s.depends_on_frequency();
  return Symbol(n);
}

const char* to_string(SpectralMode m) { return m == SpectralMode::singular ? "sigma" : "lambda"; }

// ---------------------------------------------------------------------------
// Grids and surfaces

std::size_t TensorGrid::size() const {
  std::size_t n = 1;
  for (const auto& a : x) n *= a.size();
  for (const auto& a : theta) n *= a.size();
  return n;
}

void TensorGrid::node(std::size_t index, std::span<double> x_out, std::span<double> theta_out) const {
  for (std::size_t j = theta.size(); j-- > 0;) {
    theta_out[j] = theta[j][index % theta[j].size()];
    index /= theta[j].size();
  }
  for (std::size_t j = x.size(); j-- > 0;) {
    x_out[j] = x[j][index % x[j].size()];
    index /= x[j].size();
  }
}

TensorGrid TensorGrid::midpoint(const Symbol& s, int points_per_dim) {
  if (points_per_dim < 1) throw Error(ErrorKind::configuration, "grid needs at least one point");
  TensorGrid g;
  const int d = s.d();
  for (int j = 0; j < d; ++j) {
    std::vector<double> xs, ts;
    if (s.depends_on_space())
      for (int k = 0; k < points_per_dim; ++k) xs.push_back((k + 0.5) / points_per_dim);
    else
      xs.push_back(0.5);
    if (s.depends_on_frequency())
      for (int k = 0; k < points_per_dim; ++k) ts.push_back(-kPi + (k + 0.5) * 2.0 * kPi / points_per_dim);
    else
      ts.push_back(0.0);
    g.x.push_back(std::move(xs));
    g.theta.push_back(std::move(ts));
  }
  return g;
}

TensorGrid TensorGrid::equispaced(const Symbol& s, const MultiIndex& n) {
  if (static_cast<int>(n.dim()) != s.d())
    throw Error(ErrorKind::invalid_size, "grid size " + n.to_string() + " does not match d");
  nu(n);
  TensorGrid g;
  for (int j = 0; j < s.d(); ++j) {
    std::vector<double> xs, ts;
    const auto nj = n[j];
    if (s.depends_on_space())
      for (std::int64_t k = 1; k <= nj; ++k) xs.push_back(static_cast<double>(k) / nj);
    else
      xs.push_back(0.5);
    if (s.depends_on_frequency())
      for (std::int64_t k = 1; k <= nj; ++k)
        ts.push_back(std::min(kPi, -kPi + 2.0 * kPi * static_cast<double>(k) / nj));
    else
      ts.push_back(0.0);
    g.x.push_back(std::move(xs));
    g.theta.push_back(std::move(ts));
  }
  return g;
}

std::vector<double> SurfaceSamples::real_values() const {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [](cplx v) { return v.real(); });
  return out;
}

std::vector<cplx> point_spectrum(const CMatrix& value, SpectralMode mode, bool hermitian) {
  const auto r = value.rows();
  std::vector<cplx> out(r);
  if (mode == SpectralMode::singular) {
    if (r == 1) {
      out[0] = std::abs(value(0, 0));
      return out;
    }
    Eigen::JacobiSVD<CMatrix> svd(value);
    for (Eigen::Index j = 0; j < r; ++j) out[j] = svd.singularValues()(j);
    return out;
  }
  if (r == 1) {
    out[0] = hermitian ? cplx(value(0, 0).real()) : value(0, 0);
    return out;
  }
  if (hermitian) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(value, Eigen::EigenvaluesOnly);
    for (Eigen::Index j = 0; j < r; ++j) out[j] = es.eigenvalues()(j);
    return out;
  }
  Eigen::ComplexEigenSolver<CMatrix> es(value, false);
  for (Eigen::Index j = 0; j < r; ++j) out[j] = es.eigenvalues()(j);
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

SurfaceSamples spectral_surfaces(const Symbol& s, const TensorGrid& grid, SpectralMode mode, Exec exec) {
  return kernels::surface_samples(s, grid, mode, exec);
}

TrigPolynomial fourier_coefficients(const Symbol& f, const MultiIndex& degree, int samples_per_dim,
                                    Exec exec) {
  if (f.depends_on_space())
    throw Error(ErrorKind::configuration, "Fourier coefficients need a frequency-only symbol");
  if (static_cast<int>(degree.dim()) != f.d())
    throw Error(ErrorKind::configuration, "degree " + degree.to_string() + " does not match d");
  for (auto v : degree)
    if (v < 0) throw Error(ErrorKind::configuration, "negative truncation degree");
  if (samples_per_dim <= 2 * degree.max_abs_entry())
    throw Error(ErrorKind::configuration,
                "aliasing guard: samples_per_dim = " + std::to_string(samples_per_dim) +
                    " must exceed 2 * max degree = " + std::to_string(2 * degree.max_abs_entry()));
  const int d = f.d();
  std::int64_t total = 1;
  for (int j = 0; j < d; ++j) total *= samples_per_dim;
  std::vector<CMatrix> samples(total);
  std::vector<double> x(d, 0.5), t(d);
  for (std::int64_t idx = 0; idx < total; ++idx) {
    std::int64_t rem = idx;
    for (int j = d; j-- > 0;) {
      t[j] = -kPi + 2.0 * kPi * static_cast<double>(rem % samples_per_dim) / samples_per_dim;
      rem /= samples_per_dim;
    }
    samples[idx] = f.evaluate_unchecked(x, t);
    if (!samples[idx].allFinite())
      throw Error(ErrorKind::numerical, "non-finite symbol value at Fourier node " + std::to_string(idx));
  }
  const auto coeffs = kernels::dft_coefficients(samples, samples_per_dim, degree, exec);
  TrigPolynomial out(d, f.r());
  const MultiIndexInterval range(-degree, degree);
  for (std::size_t k = 0; k < coeffs.size(); ++k)
    out.set(lex_unrank(static_cast<std::int64_t>(k), range), coeffs[k]);
  return out;
}

}  // namespace gltlab
