#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <cstring>
#include <functional>
#include <sstream>

#include "gltlab/error.hpp"
#include "gltlab/linalg.hpp"

namespace gltlab::linalg {

namespace {

void check_info(lapack_int info, const char* routine, const CMatrix& a) {
  if (info == 0) return;
  if (info < 0)
    throw Error(ErrorKind::numerical, std::string(routine) + ": illegal argument " + std::to_string(-info));
  throw Error(ErrorKind::numerical, std::string(routine) + " did not converge (info " +
                                        std::to_string(info) + ") for " + fingerprint(a));
}

void require_finite(const CMatrix& a, const char* what) {
  if (!a.allFinite()) throw Error(ErrorKind::numerical, std::string(what) + ": non-finite entries in " + fingerprint(a));
}

void require_square(const CMatrix& a, const char* what) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::invalid_size, std::string(what) + " needs a square matrix");
}

bool use_banded(Eigen::Index n, Eigen::Index kd) { return n >= 64 && kd * 8 < n; }

}  // namespace

bool is_hermitian(const CMatrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = a.norm();
  return (a - a.adjoint()).norm() <= rel_tol * scale;
}

bool is_real(const CMatrix& a) {
  for (Eigen::Index j = 0; j < a.size(); ++j)
    if (a.data()[j].imag() != 0.0) return false;
  return true;
}

Eigen::Index bandwidth(const CMatrix& a) {
  Eigen::Index kd = 0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (a(i, j) != 0.0) kd = std::max(kd, i > j ? i - j : j - i);
  return kd;
}

Eigen::VectorXd hermitian_eigenvalues(const CMatrix& a) {
  require_square(a, "hermitian_eigenvalues");
  require_finite(a, "hermitian_eigenvalues");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  Eigen::VectorXd w(n);
  if (n == 0) return w;
  const Eigen::Index kd = bandwidth(a);
  const bool real = is_real(a);
  if (use_banded(n, kd)) {
    // Upper band storage: ab(kd + i - j, j) = A(i, j) for j - kd <= i <= j.
    const lapack_int ldab = static_cast<lapack_int>(kd + 1);
    if (real) {
      Eigen::MatrixXd ab = Eigen::MatrixXd::Zero(ldab, n);
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = std::max<Eigen::Index>(0, j - kd); i <= j; ++i) ab(kd + i - j, j) = a(i, j).real();
      check_info(LAPACKE_dsbevd(LAPACK_COL_MAJOR, 'N', 'U', n, static_cast<lapack_int>(kd), ab.data(), ldab,
                                w.data(), nullptr, 1),
                 "dsbevd", a);
    } else {
      CMatrix ab = CMatrix::Zero(ldab, n);
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = std::max<Eigen::Index>(0, j - kd); i <= j; ++i) ab(kd + i - j, j) = a(i, j);
      check_info(LAPACKE_zhbevd(LAPACK_COL_MAJOR, 'N', 'U', n, static_cast<lapack_int>(kd), ab.data(), ldab,
                                w.data(), nullptr, 1),
                 "zhbevd", a);
    }
    return w;
  }
  if (real) {
    Eigen::MatrixXd work = a.real();
    check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', n, work.data(), n, w.data()), "dsyevd", a);
  } else {
    CMatrix work = a;
    check_info(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'U', n, work.data(), n, w.data()), "zheevd", a);
  }
  return w;
}

HermitianEigen hermitian_eigen(const CMatrix& a) {
  require_square(a, "hermitian_eigen");
  require_finite(a, "hermitian_eigen");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  HermitianEigen out;
  out.values.resize(n);
  if (n == 0) return out;
  if (is_real(a)) {
    Eigen::MatrixXd work = a.real();
    check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, work.data(), n, out.values.data()), "dsyevd", a);
    out.vectors = work.cast<cplx>();
  } else {
    out.vectors = a;
    check_info(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, out.vectors.data(), n, out.values.data()),
               "zheevd", a);
  }
  return out;
}

std::vector<cplx> eigenvalues(const CMatrix& a) {
  require_square(a, "eigenvalues");
  require_finite(a, "eigenvalues");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  std::vector<cplx> out(n);
  if (n == 0) return out;
  if (is_real(a)) {
    Eigen::MatrixXd work = a.real();
    std::vector<double> wr(n), wi(n);
    check_info(LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, wr.data(), wi.data(), nullptr, 1,
                             nullptr, 1),
               "dgeev", a);
    for (lapack_int j = 0; j < n; ++j) out[j] = {wr[j], wi[j]};
  } else {
    CMatrix work = a;
    check_info(LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, out.data(), nullptr, 1, nullptr, 1),
               "zgeev", a);
  }
  return out;
}

Eigen::VectorXd singular_values(const CMatrix& a) {
  require_finite(a, "singular_values");
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  Eigen::VectorXd s(std::min(m, n));
  if (s.size() == 0) return s;
  if (is_real(a)) {
    Eigen::MatrixXd work = a.real();
    check_info(LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', m, n, work.data(), m, s.data(), nullptr, 1, nullptr, 1),
               "dgesdd", a);
  } else {
    CMatrix work = a;
    check_info(LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, work.data(), m, s.data(), nullptr, 1, nullptr, 1),
               "zgesdd", a);
  }
  return s;
}

Svd svd(const CMatrix& a) {
  require_finite(a, "svd");
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(m, n);
  Svd out;
  out.s.resize(k);
  if (k == 0) return out;
  if (is_real(a)) {
    Eigen::MatrixXd work = a.real();
    Eigen::MatrixXd u(m, k), vt(k, n);
    check_info(LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', m, n, work.data(), m, out.s.data(), u.data(), m, vt.data(), k),
               "dgesdd", a);
    out.u = u.cast<cplx>();
    out.v = vt.transpose().cast<cplx>();
  } else {
    CMatrix work = a;
    CMatrix u(m, k), vh(k, n);
    check_info(LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, n, work.data(), m, out.s.data(), u.data(), m, vh.data(), k),
               "zgesdd", a);
    out.u = std::move(u);
    out.v = vh.adjoint();
  }
  return out;
}

std::string fingerprint(const CMatrix& a) {
  std::uint64_t h = 1469598103934665603ULL;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    double parts[2] = {a.data()[j].real(), a.data()[j].imag()};
    std::uint64_t bits[2];
    std::memcpy(bits, parts, sizeof bits);
    for (auto b : bits) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  }
  std::ostringstream os;
  os << a.rows() << "x" << a.cols() << " matrix, ||A||_F = " << a.norm() << ", hash " << std::hex << h;
  return os.str();
}

}  // namespace gltlab::linalg
