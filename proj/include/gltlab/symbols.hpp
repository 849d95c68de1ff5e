#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gltlab/exec.hpp"
#include "gltlab/multiindex.hpp"
#include "gltlab/scalar_expr.hpp"

namespace gltlab {

using CMatrix = Eigen::MatrixXcd;

/// Multilevel block trigonometric polynomial sum_k c_k exp(i (k, theta)) with
/// r x r coefficient blocks.
class TrigPolynomial {
 public:
  TrigPolynomial(int d, int r);

  int d() const noexcept { return d_; }
  int r() const noexcept { return r_; }

  /// Replaces the block at offset k; zero blocks are dropped.
  void set(const MultiIndex& k, const CMatrix& block);
  /// Zero block when k is absent.
  CMatrix coefficient(const MultiIndex& k) const;
  const std::map<MultiIndex, CMatrix>& coefficients() const noexcept { return coefficients_; }

  /// Per-dimension max |k_j| over stored offsets.
  MultiIndex degree() const;
  /// Keeps offsets with |k_j| <= max_degree[j] for every j.
  TrigPolynomial truncated(const MultiIndex& max_degree) const;

  CMatrix evaluate(std::span<const double> theta) const;

  /// True iff c_{-k} equals c_k^* for every k (up to a few ulps of the
  /// largest coefficient).
  bool hermitian() const;

  friend bool operator==(const TrigPolynomial& a, const TrigPolynomial& b);

 private:
  int d_;
  int r_;
  std::map<MultiIndex, CMatrix> coefficients_;
};

/// r x r matrix of closed-form scalar expressions. A non-bracketed entry is a
/// scalar that broadcasts to value * I_r.
struct ExprMatrix {
  int rows = 1;
  std::vector<ScalarExprPtr> entries;  // row-major, rows * rows
  bool bracketed = false;

  static ExprMatrix scalar(ScalarExprPtr e);
  CMatrix evaluate(std::span<const double> x, std::span<const double> t, int r) const;
  int max_variable(ScalarOp kind) const;
  friend bool structurally_equal(const ExprMatrix& a, const ExprMatrix& b);
};

/// Exact conjugate symmetry m == m^* at the nodes of a small probe grid over
/// the space variables (space = true) or the frequency variables; nodes
/// where evaluation fails are skipped.
bool hermitian_on_probe(const ExprMatrix& m, int d, int r, bool space);

/// Coefficient function a : [0,1]^d -> C^{r x r}.
class CoefficientFunction {
 public:
  using Evaluator = std::function<CMatrix(std::span<const double>)>;

  CoefficientFunction(int d, int r, Evaluator fn, bool hermitian);
  /// Hermitian-ness is established by exact conjugate symmetry on a probe grid.
  static CoefficientFunction from_expressions(ExprMatrix m, int d, int r);

  int d() const noexcept { return d_; }
  int r() const noexcept { return r_; }
  bool hermitian() const noexcept { return hermitian_; }
  const ExprMatrix* expressions() const noexcept { return expressions_.get(); }

  CMatrix operator()(std::span<const double> x) const { return fn_(x); }

 private:
  int d_;
  int r_;
  Evaluator fn_;
  bool hermitian_;
  std::shared_ptr<const ExprMatrix> expressions_;
};

/// Continuous functions admitted in matrix-function nodes. All of them are
/// real on the real line, so they map Hermitian matrices to Hermitian ones.
struct NamedFunction {
  enum class Kind { poly, exp, sin, cos, abs };
  Kind kind = Kind::exp;
  std::vector<double> coefficients;  // poly only, ascending powers

  cplx operator()(cplx z) const;
  /// "exp", "abs", "poly[1,0,2]"
  std::string name() const;
  static NamedFunction parse(const std::string& name);
  friend bool operator==(const NamedFunction&, const NamedFunction&) = default;
};

/// Matrix-valued measurable function kappa(x, theta) on [0,1]^d x [-pi,pi]^d.
/// Immutable; evaluation is pure and thread-safe.
class Symbol {
 public:
  struct Node;

  int d() const;
  int r() const;
  /// Declared by construction, never detected pointwise.
  bool hermitian() const;
  bool depends_on_space() const;
  bool depends_on_frequency() const;

  /// Throws domain for points outside the domain and singular_evaluation
  /// when a pointwise inverse meets a singular value.
  CMatrix evaluate(std::span<const double> x, std::span<const double> theta) const;
  CMatrix evaluate_unchecked(std::span<const double> x, std::span<const double> theta) const;

  std::string describe() const;

  static Symbol trigonometric(TrigPolynomial f);
  /// f(theta) given in closed form (may be non-band-limited).
  static Symbol frequency(ExprMatrix f, int d, int r, bool hermitian);
  static Symbol coefficient(CoefficientFunction a);
  static Symbol constant(const CMatrix& c, int d);
  static Symbol adjoint(const Symbol& s);
  static Symbol linear_combination(cplx alpha, const Symbol& a, cplx beta, const Symbol& b);
  static Symbol product(const Symbol& a, const Symbol& b);
  static Symbol inverse(const Symbol& s);
  /// Pointwise spectral calculus; requires a Hermitian-declared argument.
  static Symbol apply(const NamedFunction& f, const Symbol& s);

 private:
  explicit Symbol(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

enum class SpectralMode { singular, eigen };
const char* to_string(SpectralMode m);

/// Tensor grid over [0,1]^d x [-pi,pi]^d. Nodes are enumerated
/// lexicographically over (x_1..x_d, theta_1..theta_d), last fastest.
struct TensorGrid {
  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> theta;

  std::size_t size() const;
  void node(std::size_t index, std::span<double> x_out, std::span<double> theta_out) const;

  /// Midpoint rule with the given points per axis; axes the symbol does not
  /// depend on collapse to a single node.
  static TensorGrid midpoint(const Symbol& s, int points_per_dim);
  /// Nodes a + j (b - a) / n_j, j = 1..n_j on every axis the symbol uses.
  static TensorGrid equispaced(const Symbol& s, const MultiIndex& n);
};

/// Per-node spectral values: r entries per node, singular values descending
/// or eigenvalues in canonical order (real part, then imaginary part).
struct SurfaceSamples {
  int r = 1;
  SpectralMode mode = SpectralMode::singular;
  std::vector<cplx> values;

  std::size_t nodes() const { return r ? values.size() / static_cast<std::size_t>(r) : 0; }
  std::vector<double> real_values() const;
};

/// Singular values (descending) or eigenvalues (canonical order) of a small
/// matrix; hermitian selects the self-adjoint solver.
std::vector<cplx> point_spectrum(const CMatrix& value, SpectralMode mode, bool hermitian);

/// Throws numerical, naming the first node with a non-finite value.
SurfaceSamples spectral_surfaces(const Symbol& s, const TensorGrid& grid, SpectralMode mode,
                                 Exec exec = Exec::parallel);

/// Discrete Fourier rule on the uniform grid theta_j = -pi + 2 pi j / N.
/// Exact to roundoff for trigonometric polynomials of degree < N/2.
/// Requires samples_per_dim > 2 max(degree) and a frequency-only symbol.
TrigPolynomial fourier_coefficients(const Symbol& f, const MultiIndex& degree, int samples_per_dim,
                                    Exec exec = Exec::parallel);

}  // namespace gltlab
