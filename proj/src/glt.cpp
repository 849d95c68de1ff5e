#include "gltlab/glt.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "gltlab/error.hpp"
#include "gltlab/linalg.hpp"
#include "gltlab/report.hpp"

namespace gltlab {

struct GltExpr::Node {
  GltKind kind = GltKind::zero;
  int d = 1;
  int r = 1;
  bool hermitian = true;
  std::shared_ptr<const ToeplitzLeaf> toeplitz;
  std::shared_ptr<const CoefficientFunction> diag;
  ZeroKind zero = ZeroKind::null;
  cplx alpha{1.0};
  cplx beta{0.0};
  std::optional<GltExpr> left;
  std::optional<GltExpr> right;
  bool invertible = false;
  NamedFunction fn;
};

namespace {

void require_compatible(const GltExpr& a, const GltExpr& b) {
  if (a.d() != b.d() || a.r() != b.r())
    throw Error(ErrorKind::invalid_size, "operands disagree on (d, r): (" + std::to_string(a.d()) + ", " +
                                             std::to_string(a.r()) + ") vs (" + std::to_string(b.d()) + ", " +
                                             std::to_string(b.r()) + ")");
}

const GltExpr::Node& checked(const std::shared_ptr<const GltExpr::Node>& node, GltKind kind, const char* what) {
  if (node->kind != kind) throw Error(ErrorKind::configuration, std::string("expression node is not ") + what);
  return *node;
}

}  // namespace

GltExpr GltExpr::toeplitz(TrigPolynomial f, bool bracketed) {
  ToeplitzLeaf leaf{std::move(f), bracketed, true, std::nullopt, MultiIndex()};
  return toeplitz(std::move(leaf));
}

GltExpr GltExpr::toeplitz(ToeplitzLeaf leaf) {
  if (!leaf.band_limited && !leaf.source)
    throw Error(ErrorKind::configuration, "non-band-limited Toeplitz leaf needs its source expression");
  auto n = std::make_shared<Node>();
  n->kind = GltKind::toeplitz;
  n->d = leaf.coefficients.d();
  n->r = leaf.coefficients.r();
  n->hermitian = leaf.coefficients.hermitian();
  n->toeplitz = std::make_shared<const ToeplitzLeaf>(std::move(leaf));
  return GltExpr(std::move(n));
}

GltExpr GltExpr::diag(CoefficientFunction a) {
  auto n = std::make_shared<Node>();
  n->kind = GltKind::diag;
  n->d = a.d();
  n->r = a.r();
  n->hermitian = a.hermitian();
  n->diag = std::make_shared<const CoefficientFunction>(std::move(a));
  return GltExpr(std::move(n));
}

GltExpr GltExpr::zero(int d, int r, ZeroKind kind) {
  if (d < 1 || r < 1) throw Error(ErrorKind::invalid_size, "zero leaf needs d, r >= 1");
  auto n = std::make_shared<Node>();
  n->kind = GltKind::zero;
  n->d = d;
  n->r = r;
  n->zero = kind;
  return GltExpr(std::move(n));
}

GltExpr GltExpr::adjoint(const GltExpr& e) {
  auto n = std::make_shared<Node>();
  n->kind = GltKind::adjoint;
  n->d = e.d();
  n->r = e.r();
  n->hermitian = e.hermitian();
  n->left = e;
  return GltExpr(std::move(n));
}

GltExpr GltExpr::lincomb(cplx alpha, const GltExpr& a, cplx beta, const GltExpr& b) {
  require_compatible(a, b);
  auto n = std::make_shared<Node>();
  n->kind = GltKind::lincomb;
  n->d = a.d();
  n->r = a.r();
  n->alpha = alpha;
  n->beta = beta;
  n->hermitian = alpha.imag() == 0.0 && beta.imag() == 0.0 && a.hermitian() && (beta == 0.0 || b.hermitian());
  n->left = a;
  n->right = b;
  return GltExpr(std::move(n));
}

GltExpr GltExpr::scaled(cplx alpha, const GltExpr& a) {
  return lincomb(alpha, a, 0.0, zero(a.d(), a.r()));
}

GltExpr GltExpr::product(const GltExpr& a, const GltExpr& b) {
  require_compatible(a, b);
  auto n = std::make_shared<Node>();
  n->kind = GltKind::product;
  n->d = a.d();
  n->r = a.r();
  n->hermitian = false;
  n->left = a;
  n->right = b;
  return GltExpr(std::move(n));
}

GltExpr GltExpr::pseudo_inverse(const GltExpr& e, bool invertible_declared) {
  auto n = std::make_shared<Node>();
  n->kind = GltKind::pseudo_inverse;
  n->d = e.d();
  n->r = e.r();
  n->hermitian = e.hermitian();
  n->invertible = invertible_declared;
  n->left = e;
  return GltExpr(std::move(n));
}

GltExpr GltExpr::apply(const NamedFunction& f, const GltExpr& e) {
  auto n = std::make_shared<Node>();
  n->kind = GltKind::apply;
  n->d = e.d();
  n->r = e.r();
  n->hermitian = true;
  n->fn = f;
  n->left = e;
  return GltExpr(std::move(n));
}

GltKind GltExpr::kind() const { return node_->kind; }
int GltExpr::d() const { return node_->d; }
int GltExpr::r() const { return node_->r; }
bool GltExpr::hermitian() const { return node_->hermitian; }
const ToeplitzLeaf& GltExpr::toeplitz_leaf() const { return *checked(node_, GltKind::toeplitz, "Toeplitz").toeplitz; }
const CoefficientFunction& GltExpr::coefficient() const { return *checked(node_, GltKind::diag, "diagonal").diag; }
ZeroKind GltExpr::zero_kind() const { return checked(node_, GltKind::zero, "zero").zero; }
cplx GltExpr::alpha() const { return checked(node_, GltKind::lincomb, "a linear combination").alpha; }
cplx GltExpr::beta() const { return checked(node_, GltKind::lincomb, "a linear combination").beta; }
const GltExpr& GltExpr::child() const {
  if (!node_->left) throw Error(ErrorKind::configuration, "expression leaf has no children");
  return *node_->left;
}
const GltExpr& GltExpr::left() const { return child(); }
const GltExpr& GltExpr::right() const {
  if (!node_->right) throw Error(ErrorKind::configuration, "expression node has no right operand");
  return *node_->right;
}
bool GltExpr::invertible_declared() const { return node_->invertible; }
const NamedFunction& GltExpr::function() const { return checked(node_, GltKind::apply, "a function application").fn; }

bool GltExpr::is_scaled_single() const {
  return node_->kind == GltKind::lincomb && node_->beta == 0.0 && node_->right->kind() == GltKind::zero &&
         node_->right->zero_kind() == ZeroKind::null;
}

// ---------------------------------------------------------------------------

bool structurally_equal(const GltExpr& a, const GltExpr& b) {
  if (a.kind() != b.kind() || a.d() != b.d() || a.r() != b.r()) return false;
  switch (a.kind()) {
    case GltKind::toeplitz: {
      const auto& x = a.toeplitz_leaf();
      const auto& y = b.toeplitz_leaf();
      if (x.bracketed != y.bracketed || x.band_limited != y.band_limited) return false;
      if (x.band_limited) return x.coefficients == y.coefficients;
      return x.degree == y.degree && structurally_equal(*x.source, *y.source);
    }
    case GltKind::diag: {
      const auto* x = a.coefficient().expressions();
      const auto* y = b.coefficient().expressions();
      if (!x || !y) return &a.coefficient() == &b.coefficient();
      return structurally_equal(*x, *y);
    }
    case GltKind::zero: return a.zero_kind() == b.zero_kind();
    case GltKind::adjoint: return structurally_equal(a.child(), b.child());
    case GltKind::lincomb:
      return a.alpha() == b.alpha() && a.beta() == b.beta() && structurally_equal(a.left(), b.left()) &&
             structurally_equal(a.right(), b.right());
    case GltKind::product: return structurally_equal(a.left(), b.left()) && structurally_equal(a.right(), b.right());
    case GltKind::pseudo_inverse:
      return a.invertible_declared() == b.invertible_declared() && structurally_equal(a.child(), b.child());
    case GltKind::apply: return a.function() == b.function() && structurally_equal(a.child(), b.child());
  }
  return false;
}

Symbol symbol_of(const GltExpr& e) {
  switch (e.kind()) {
    case GltKind::toeplitz: return Symbol::trigonometric(e.toeplitz_leaf().coefficients);
    case GltKind::diag: return Symbol::coefficient(e.coefficient());
    case GltKind::zero: return Symbol::constant(CMatrix::Zero(e.r(), e.r()), e.d());
    case GltKind::adjoint: return Symbol::adjoint(symbol_of(e.child()));
    case GltKind::lincomb:
      return Symbol::linear_combination(e.alpha(), symbol_of(e.left()), e.beta(), symbol_of(e.right()));
    case GltKind::product: return Symbol::product(symbol_of(e.left()), symbol_of(e.right()));
    case GltKind::pseudo_inverse:
      if (!e.invertible_declared())
        throw Error(ErrorKind::calculus, "pseudo-inverse without an invertible-almost-everywhere declaration");
      return Symbol::inverse(symbol_of(e.child()));
    case GltKind::apply:
      if (!e.child().hermitian())
        throw Error(ErrorKind::calculus, "matrix function " + e.function().name() +
                                             " applied to an expression not declared Hermitian");
      return Symbol::apply(e.function(), symbol_of(e.child()));
  }
  throw Error(ErrorKind::configuration, "unknown expression node");
}

// ---------------------------------------------------------------------------
// Materialization

namespace {

CMatrix hermitian_part(const CMatrix& a) { return (a + a.adjoint()) / 2.0; }

CMatrix build(const GltExpr& e, const MultiIndex& n, const MaterializeOptions& opt,
              std::vector<std::string>& warnings) {
  switch (e.kind()) {
    case GltKind::toeplitz: return toeplitz(e.toeplitz_leaf().coefficients, n, opt.limits, opt.exec).values;
    case GltKind::diag: return diag_sampling(e.coefficient(), n, opt.limits, opt.exec).values;
    case GltKind::zero: {
      const auto order = checked_order(e.r(), n, opt.limits);
      CMatrix z = CMatrix::Zero(order, order);
      if (e.zero_kind() == ZeroKind::spikes) {
        const auto k = static_cast<Eigen::Index>(std::ceil(std::sqrt(static_cast<double>(order))));
        for (Eigen::Index i = 0; i < std::min<Eigen::Index>(k, order); ++i) z(i, i) = 1.0;
      }
      return z;
    }
    case GltKind::adjoint: return build(e.child(), n, opt, warnings).adjoint();
    case GltKind::lincomb: {
      CMatrix a = e.alpha() * build(e.left(), n, opt, warnings);
      if (e.beta() != 0.0) a += e.beta() * build(e.right(), n, opt, warnings);
      return a;
    }
    case GltKind::product: return build(e.left(), n, opt, warnings) * build(e.right(), n, opt, warnings);
    case GltKind::pseudo_inverse: {
      const CMatrix a = build(e.child(), n, opt, warnings);
      if (a.size() == 0) return a;
      if (e.child().hermitian() && linalg::is_hermitian(a)) {
        const auto eig = linalg::hermitian_eigen(hermitian_part(a));
        const double top = eig.values.cwiseAbs().maxCoeff();
        const double cut = opt.pinv_threshold * top;
        Eigen::VectorXd inv(eig.values.size());
        std::int64_t dropped = 0;
        for (Eigen::Index i = 0; i < inv.size(); ++i) {
          const double v = eig.values(i);
          if (std::abs(v) <= cut || v == 0.0) {
            inv(i) = 0.0;
            ++dropped;
          } else {
            inv(i) = 1.0 / v;
          }
        }
        if (dropped)
          warnings.push_back("pseudo-inverse at n = " + n.to_string() + ": " + std::to_string(dropped) +
                             " eigenvalue(s) below " + format_number(opt.pinv_threshold) + " * |lambda|_max truncated");
        return hermitian_part(eig.vectors * inv.asDiagonal() * eig.vectors.adjoint());
      }
      const auto svd = linalg::svd(a);
      const double cut = opt.pinv_threshold * (svd.s.size() ? svd.s(0) : 0.0);
      Eigen::VectorXd inv(svd.s.size());
      std::int64_t dropped = 0;
      for (Eigen::Index i = 0; i < inv.size(); ++i) {
        if (svd.s(i) <= cut || svd.s(i) == 0.0) {
          inv(i) = 0.0;
          ++dropped;
        } else {
          inv(i) = 1.0 / svd.s(i);
        }
      }
      if (dropped)
        warnings.push_back("pseudo-inverse at n = " + n.to_string() + ": " + std::to_string(dropped) +
                           " singular value(s) below " + format_number(opt.pinv_threshold) + " * sigma_1 truncated");
      return svd.v * inv.asDiagonal() * svd.u.adjoint();
    }
    case GltKind::apply: {
      if (!e.child().hermitian())
        throw Error(ErrorKind::calculus, "matrix function " + e.function().name() +
                                             " applied to an expression not declared Hermitian");
      const CMatrix a = build(e.child(), n, opt, warnings);
      if (!linalg::is_hermitian(a, 1e-10))
        throw Error(ErrorKind::calculus, "matrix function argument at n = " + n.to_string() +
                                             " is not Hermitian: " + linalg::fingerprint(a));
      const auto eig = linalg::hermitian_eigen(hermitian_part(a));
      Eigen::VectorXd fv(eig.values.size());
      for (Eigen::Index i = 0; i < fv.size(); ++i) fv(i) = e.function()(cplx(eig.values(i))).real();
      return hermitian_part(eig.vectors * fv.asDiagonal() * eig.vectors.adjoint());
    }
  }
  throw Error(ErrorKind::configuration, "unknown expression node");
}

}  // namespace

Materialized materialize(const GltExpr& e, const MultiIndex& n, const MaterializeOptions& options) {
  if (static_cast<int>(n.dim()) != e.d())
    throw Error(ErrorKind::invalid_size, "size " + n.to_string() + " does not match d = " + std::to_string(e.d()));
  checked_order(e.r(), n, options.limits);
  Materialized out;
  out.matrix.values = build(e, n, options, out.warnings);
  out.matrix.r = e.r();
  out.matrix.n = n;
  return out;
}

// ---------------------------------------------------------------------------
// Quasi-Hermitian split and distribution verification

std::string QuasiHermitianSplit::to_csv() const {
  std::ostringstream out;
  out << "n,d_n,x_norm,y_norm,y_trace_normalized\n";
  for (std::size_t i = 0; i < sizes.size(); ++i)
    out << report::csv_field(sizes[i].to_string()) << ',' << orders[i] << ',' << report::number(x_norm[i]) << ','
        << report::number(y_norm[i]) << ',' << report::number(y_trace_normalized[i]) << '\n';
  return out.str();
}

QuasiHermitianSplit glt5_split_check(const MatrixSequence& seq, const std::vector<MultiIndex>& sizes,
                                     const Glt5Options& options) {
  if (sizes.empty()) throw Error(ErrorKind::configuration, "sizes: at least one size is required");
  validate_sizes(sizes, static_cast<int>(sizes.front().dim()));
  QuasiHermitianSplit res;
  res.sizes = sizes;
  for (const auto& n : sizes) {
    const CMatrix a = seq(n);
    if (a.rows() != a.cols()) throw Error(ErrorKind::invalid_size, "non-square matrix at n = " + n.to_string());
    CMatrix x = hermitian_part(a);
    if (options.correction) {
      const CMatrix h = options.correction(n);
      if (h.rows() != a.rows() || h.cols() != a.cols() || !linalg::is_hermitian(h))
        throw Error(ErrorKind::configuration, "Hermitian correction at n = " + n.to_string() + " is invalid");
      x += hermitian_part(h);
    }
    const CMatrix y = a - x;
    const auto sy = linalg::singular_values(y);
    res.orders.push_back(a.rows());
    res.x_norm.push_back(a.rows() ? linalg::singular_values(x)(0) : 0.0);
    res.y_norm.push_back(sy.size() ? sy(0) : 0.0);
    res.y_trace_normalized.push_back(sy.sum() / static_cast<double>(nu(n)));
  }
  res.bounded = true;
  for (std::size_t k = 1; k < sizes.size(); ++k) {
    const double doublings = std::log2(static_cast<double>(nu(sizes[k])) / static_cast<double>(nu(sizes[k - 1])));
    const double allowed = std::pow(options.growth, std::max(doublings, 0.0));
    for (const auto* v : {&res.x_norm, &res.y_norm})
      if ((*v)[k] > allowed * (*v)[k - 1] + options.policy.floor) res.bounded = false;
  }
  res.trace_vanishing = trends_to_zero(res.y_trace_normalized, options.policy);
  res.pass = res.bounded && res.trace_vanishing;
  return res;
}

DistributionReport glt1_verify(const GltExpr& e, const std::vector<MultiIndex>& sizes,
                               const DistributionOptions& options, const MaterializeOptions& materialize_options) {
  const Symbol s = symbol_of(e);
  validate_sizes(sizes, e.d());
  std::map<MultiIndex, CMatrix> cache;
  auto seq = [&](const MultiIndex& n) -> CMatrix {
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, materialize(e, n, materialize_options).matrix.values).first;
    return it->second;
  };
  DistributionOptions opts = options;
  if (opts.mode == SpectralMode::eigen && !opts.quasi_hermitian_waiver) {
    bool all_hermitian = true;
    for (const auto& n : sizes) all_hermitian = all_hermitian && linalg::is_hermitian(seq(n));
    if (!all_hermitian) {
      const auto split = glt5_split_check(seq, sizes);
      if (!split.pass)
        throw Error(ErrorKind::mode, "eigenvalue mode needs Hermitian matrices or a passing quasi-Hermitian split");
      opts.quasi_hermitian_waiver = true;
    }
  }
  return distribution_check(seq, s, sizes, opts);
}

}  // namespace gltlab
