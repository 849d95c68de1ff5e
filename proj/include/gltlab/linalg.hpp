#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

namespace gltlab::linalg {

using CMatrix = Eigen::MatrixXcd;
using cplx = std::complex<double>;

/// ||A - A^*||_F <= rel_tol * ||A||_F.
bool is_hermitian(const CMatrix& a, double rel_tol = 1e-12);
/// Every imaginary part is exactly zero.
bool is_real(const CMatrix& a);
/// Largest |i - j| over nonzero entries.
Eigen::Index bandwidth(const CMatrix& a);

/// Eigenvalues of a Hermitian matrix, ascending. Uses the real symmetric
/// routines for real input and the banded routines when the bandwidth is
/// small relative to the order.
Eigen::VectorXd hermitian_eigenvalues(const CMatrix& a);

struct HermitianEigen {
  Eigen::VectorXd values;  // ascending
  CMatrix vectors;         // columns
};
HermitianEigen hermitian_eigen(const CMatrix& a);

/// Eigenvalues of a general square matrix, unsorted.
std::vector<cplx> eigenvalues(const CMatrix& a);

/// Singular values, descending.
Eigen::VectorXd singular_values(const CMatrix& a);

struct Svd {
  CMatrix u;
  Eigen::VectorXd s;  // descending
  CMatrix v;          // a = u * diag(s) * v^*
};
Svd svd(const CMatrix& a);

/// Short identification of a matrix for diagnostics: order, Frobenius norm,
/// and a hash of the entries.
std::string fingerprint(const CMatrix& a);

}  // namespace gltlab::linalg
