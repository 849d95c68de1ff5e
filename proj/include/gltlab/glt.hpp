#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gltlab/acs.hpp"
#include "gltlab/matgen.hpp"
#include "gltlab/spectra.hpp"
#include "gltlab/symbols.hpp"

namespace gltlab {

/// Toeplitz generator. For closed-form sources that are not trigonometric
/// polynomials the coefficients are the discrete Fourier coefficients up to
/// the declared degree, and the leaf stands for T_n of that truncation.
struct ToeplitzLeaf {
  TrigPolynomial coefficients;
  bool bracketed = false;          ///< written as an r x r matrix
  bool band_limited = true;
  std::optional<ExprMatrix> source;  ///< kept for non-band-limited leaves
  MultiIndex degree;                 ///< truncation degree when not band-limited
};

enum class GltKind { toeplitz, diag, zero, adjoint, lincomb, product, pseudo_inverse, apply };

enum class ZeroKind {
  null,    ///< the zero matrix
  spikes,  ///< ceil(sqrt(d_n)) leading unit diagonal entries: zero-distributed, norm 1
};

/// Immutable expression over Toeplitz, diagonal-sampling and zero-distributed
/// generators. Hermitian-ness is a declaration propagated through the tree.
class GltExpr {
 public:
  struct Node;

  static GltExpr toeplitz(TrigPolynomial f, bool bracketed = true);
  static GltExpr toeplitz(ToeplitzLeaf leaf);
  static GltExpr diag(CoefficientFunction a);
  static GltExpr zero(int d, int r, ZeroKind kind = ZeroKind::null);
  static GltExpr adjoint(const GltExpr& e);
  static GltExpr lincomb(cplx alpha, const GltExpr& a, cplx beta, const GltExpr& b);
  /// alpha * a, stored as LinComb(alpha, a, 0, Z).
  static GltExpr scaled(cplx alpha, const GltExpr& a);
  static GltExpr product(const GltExpr& a, const GltExpr& b);
  /// The flag records the invertible-almost-everywhere declaration on the
  /// symbol; without it the symbol is undefined.
  static GltExpr pseudo_inverse(const GltExpr& e, bool invertible_declared = true);
  static GltExpr apply(const NamedFunction& f, const GltExpr& e);

  GltKind kind() const;
  int d() const;
  int r() const;
  bool hermitian() const;

  const ToeplitzLeaf& toeplitz_leaf() const;
  const CoefficientFunction& coefficient() const;
  ZeroKind zero_kind() const;
  cplx alpha() const;
  cplx beta() const;
  const GltExpr& child() const;  ///< unary nodes; left operand of binary ones
  const GltExpr& left() const;
  const GltExpr& right() const;
  bool invertible_declared() const;
  const NamedFunction& function() const;

  /// LinComb(alpha, a, 0, Z) with a null zero leaf.
  bool is_scaled_single() const;

 private:
  explicit GltExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Same tree shape, weights, functions and flags; Toeplitz leaves compare
/// coefficients (and sources when not band-limited), diagonal leaves their
/// expressions.
bool structurally_equal(const GltExpr& a, const GltExpr& b);

/// Symbol assigned by the algebra: f(theta), a(x), O, adjoint, linear
/// combination, product, pointwise inverse and pointwise spectral calculus.
Symbol symbol_of(const GltExpr& e);

struct MaterializeOptions {
  GenerationLimits limits;
  double pinv_threshold = 1e-10;  ///< relative to sigma_1
  Exec exec = Exec::parallel;
};

struct Materialized {
  DenseMatrix matrix;
  std::vector<std::string> warnings;
};

Materialized materialize(const GltExpr& e, const MultiIndex& n, const MaterializeOptions& options = {});

struct Glt5Options {
  double growth = 1.1;  ///< allowed norm growth per doubling of nu(n)
  TrendPolicy policy;
  /// Optional Hermitian correction H_n: X = (A + A^*)/2 + H, Y = A - X.
  std::function<CMatrix(const MultiIndex&)> correction;
};

struct QuasiHermitianSplit {
  std::vector<MultiIndex> sizes;
  std::vector<std::int64_t> orders;
  std::vector<double> x_norm;
  std::vector<double> y_norm;
  std::vector<double> y_trace_normalized;  ///< ||Y||_1 / nu(n)
  bool bounded = false;
  bool trace_vanishing = false;
  bool pass = false;

  /// Header "n,d_n,x_norm,y_norm,y_trace_normalized".
  std::string to_csv() const;
};

/// Splits each A_n into its Hermitian part X and the remainder Y.
QuasiHermitianSplit glt5_split_check(const MatrixSequence& seq, const std::vector<MultiIndex>& sizes,
                                     const Glt5Options& options = {});

/// Distribution check of the materialized sequence against symbol_of(e).
/// Eigenvalue mode on non-Hermitian materializations is admitted only after
/// a passing quasi-Hermitian split check.
DistributionReport glt1_verify(const GltExpr& e, const std::vector<MultiIndex>& sizes,
                               const DistributionOptions& options, const MaterializeOptions& materialize_options = {});

}  // namespace gltlab
