#include <gtest/gtest.h>

#include <random>

#include "gltlab/linalg.hpp"
#include "gltlab/matgen.hpp"
#include "support.hpp"

using namespace gltlab;
using namespace gltlab::testing;

TEST(Linalg, BandedAndDensePathsAgree) {
  std::mt19937_64 rng(51);
  // Bandwidth 2 on order 300 takes the banded route; the Eigen solver is the oracle.
  for (bool real : {true, false}) {
    TrigPolynomial f = random_trig(1, 1, 2, rng, true);
    if (real) {
      TrigPolynomial g(1, 1);
      for (const auto& [k, c] : f.coefficients()) g.set(k, CMatrix::Constant(1, 1, c(0, 0).real()));
      f = g;
    }
    f.set(MultiIndex{2}, CMatrix::Constant(1, 1, 0.5));
    f.set(MultiIndex{-2}, CMatrix::Constant(1, 1, 0.5));
    const auto a = toeplitz(f, MultiIndex{300}).values;
    ASSERT_EQ(linalg::bandwidth(a), 2);
    ASSERT_EQ(linalg::is_real(a), real);
    const Eigen::SelfAdjointEigenSolver<CMatrix> oracle(a, Eigen::EigenvaluesOnly);
    const auto got = linalg::hermitian_eigenvalues(a);
    EXPECT_LE((got - oracle.eigenvalues()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Linalg, SvdReconstructs) {
  std::mt19937_64 rng(52);
  const CMatrix a = random_matrix(40, 40, rng);
  const auto s = linalg::svd(a);
  EXPECT_LE((s.u * s.s.cast<cplx>().asDiagonal() * s.v.adjoint() - a).norm(), 1e-12 * a.norm());
  for (Eigen::Index i = 1; i < s.s.size(); ++i) EXPECT_GE(s.s[i - 1], s.s[i]);
  EXPECT_LE((linalg::singular_values(a) - s.s).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Linalg, HermitianEigenpairs) {
  std::mt19937_64 rng(53);
  const CMatrix b = random_matrix(30, 30, rng);
  const CMatrix a = b + b.adjoint();
  const auto e = linalg::hermitian_eigen(a);
  EXPECT_LE((a * e.vectors - e.vectors * e.values.cast<cplx>().asDiagonal()).norm(), 1e-11 * a.norm());
  EXPECT_TRUE(linalg::is_hermitian(a));
  EXPECT_FALSE(linalg::is_hermitian(b));
}

TEST(Linalg, GeneralEigenvaluesOfTriangular) {
  CMatrix a = CMatrix::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = cplx(0, 2);
  a(2, 2) = -3.0;
  a(0, 2) = 5.0;
  auto ev = linalg::eigenvalues(a);
  std::sort(ev.begin(), ev.end(), [](cplx x, cplx y) { return x.real() < y.real(); });
  EXPECT_NEAR(std::abs(ev[0] - cplx(-3.0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(ev[1] - cplx(0, 2)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(ev[2] - cplx(1.0)), 0.0, 1e-14);
  EXPECT_FALSE(linalg::fingerprint(a).empty());
}
