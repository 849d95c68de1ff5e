#pragma once

#include <cstdint>
#include <iosfwd>

#include "gltlab/exec.hpp"
#include "gltlab/symbols.hpp"

namespace gltlab {

/// Dense matrix with optional block metadata: order r * nu(n) for generated
/// matrices; n is empty for unstructured ones.
struct DenseMatrix {
  CMatrix values;
  int r = 1;
  MultiIndex n;

  Eigen::Index order() const { return values.rows(); }
};

struct GenerationLimits {
  std::int64_t max_rows = 8192;
};

/// T_n(f) = [f_{i-j}] over i, j in [1, n], filled block by block.
DenseMatrix toeplitz(const TrigPolynomial& f, const MultiIndex& n, const GenerationLimits& limits = {},
                     Exec exec = Exec::parallel);

/// The same matrix assembled as sum_k (J^{(k_1)} x ... x J^{(k_d)}) x f_k.
/// Reference construction; quadratic in the order per coefficient.
DenseMatrix toeplitz_kronecker(const TrigPolynomial& f, const MultiIndex& n, const GenerationLimits& limits = {});

/// D_n(a) = diag over i in [1, n] of a(i/n).
DenseMatrix diag_sampling(const CoefficientFunction& a, const MultiIndex& n, const GenerationLimits& limits = {},
                          Exec exec = Exec::parallel);

/// Throws size_cap when r * nu(n) exceeds the limit.
std::int64_t checked_order(int r, const MultiIndex& n, const GenerationLimits& limits);

/// "i,j,re,im" with 1-based indices; only nonzero entries are listed.
void write_csv(const DenseMatrix& a, std::ostream& out);

/// Binary dump, little-endian throughout:
///   8 bytes magic "GLTMAT01", u64 r, u64 d, d x u64 n_j,
///   u64 rows, u64 cols, then rows*cols (f64 re, f64 im) pairs in row-major order.
void write_binary(const DenseMatrix& a, std::ostream& out);
DenseMatrix read_binary(std::istream& in);

/// Coefficient table rows "k_1,...,k_d,row,col,re,im" (row, col 1-based)
/// under a header line naming the columns.
void write_coefficients_csv(const TrigPolynomial& f, std::ostream& out);
TrigPolynomial read_coefficients_csv(std::istream& in);

}  // namespace gltlab
