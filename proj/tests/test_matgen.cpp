#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "gltlab/error.hpp"
#include "gltlab/linalg.hpp"
#include "gltlab/matgen.hpp"
#include "support.hpp"

using namespace gltlab;
using namespace gltlab::testing;

namespace {

// Entry (i, j) of T_n(f) straight from the definition, 0-based flat indices.
cplx reference_entry(const TrigPolynomial& f, const MultiIndex& n, Eigen::Index row, Eigen::Index col) {
  const int r = f.r();
  const auto box = MultiIndexInterval::ones_to(n);
  const MultiIndex i = lex_unrank(row / r, box);
  const MultiIndex j = lex_unrank(col / r, box);
  return f.coefficient(i - j)(row % r, col % r);
}

CoefficientFunction scalar_coefficient(std::function<double(double)> g, int d) {
  return CoefficientFunction(d, 1, [g](std::span<const double> x) {
    return CMatrix::Constant(1, 1, g(x[0]));
  }, true);
}

}  // namespace

TEST(Toeplitz, LaplacianIsTridiagonal) {
  const auto t = toeplitz(laplacian(), MultiIndex{4});
  ASSERT_EQ(t.order(), 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double expected = i == j ? 2.0 : std::abs(i - j) == 1 ? -1.0 : 0.0;
      EXPECT_EQ(t.values(i, j), cplx(expected));
    }
}

TEST(Toeplitz, MatchesDefinitionEntrywise) {
  std::mt19937_64 rng(31);
  const auto f = random_trig(2, 2, 2, rng, false);
  const MultiIndex n{3, 4};
  const auto t = toeplitz(f, n);
  ASSERT_EQ(t.order(), 2 * 12);
  for (Eigen::Index i = 0; i < t.order(); ++i)
    for (Eigen::Index j = 0; j < t.order(); ++j) EXPECT_EQ(t.values(i, j), reference_entry(f, n, i, j));
}

TEST(Toeplitz, SizeCapAndDimensionChecks) {
  EXPECT_THROW(toeplitz(laplacian(), MultiIndex{9000}), Error);
  EXPECT_NO_THROW(toeplitz(laplacian(), MultiIndex{9000}, GenerationLimits{10000}));
  EXPECT_THROW(toeplitz(laplacian(), MultiIndex{4, 4}), Error);
  EXPECT_THROW(checked_order(2, MultiIndex{64, 65}, {}), Error);
  EXPECT_EQ(checked_order(2, MultiIndex{64, 64}, {}), 8192);
}

TEST(DiagSampling, SamplesAtGridPoints) {
  const auto a = scalar_coefficient([](double x) { return x * x; }, 1);
  const auto dn = diag_sampling(a, MultiIndex{4});
  for (int i = 0; i < 4; ++i) EXPECT_EQ(dn.values(i, i), cplx(((i + 1) / 4.0) * ((i + 1) / 4.0)));
  EXPECT_EQ((dn.values - CMatrix(dn.values.diagonal().asDiagonal())).norm(), 0.0);
}

TEST(MatrixIo, BinaryRoundTrip) {
  std::mt19937_64 rng(32);
  const auto t = toeplitz(random_trig(2, 2, 1, rng, false), MultiIndex{2, 3});
  std::stringstream buf;
  write_binary(t, buf);
  const std::string bytes = buf.str();
  ASSERT_EQ(bytes.substr(0, 8), "GLTMAT01");
  ASSERT_EQ(bytes.size(), 8u + 8 * (2 + 2 + 2) + 16u * 12 * 12);
  const auto back = read_binary(buf);
  EXPECT_EQ(back.r, 2);
  EXPECT_EQ(back.n, (MultiIndex{2, 3}));
  EXPECT_EQ(back.values, t.values);
  std::stringstream bad("GLTMAT99");
  EXPECT_THROW(read_binary(bad), Error);
}

TEST(MatrixIo, CsvListsNonzeroEntries) {
  std::ostringstream out;
  write_csv(toeplitz(laplacian(), MultiIndex{2}), out);
  EXPECT_EQ(out.str(), "i,j,re,im\n1,1,2,0\n1,2,-1,0\n2,1,-1,0\n2,2,2,0\n");
}

TEST(MatrixIo, CoefficientTableRoundTrip) {
  std::mt19937_64 rng(33);
  const auto f = random_trig(2, 2, 1, rng, false);
  std::stringstream buf;
  write_coefficients_csv(f, buf);
  EXPECT_EQ(buf.str().substr(0, buf.str().find('\n')), "k_1,k_2,row,col,re,im");
  EXPECT_TRUE(read_coefficients_csv(buf) == f);
}

TEST(MatgenProperty, DirectFillMatchesKroneckerSum) {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 24; ++trial) {
    const int d = 1 + trial % 2;
    const int r = 1 + (trial / 2) % 2;
    std::uniform_int_distribution<std::int64_t> size(1, 8);
    MultiIndex n = MultiIndex::filled(d, 1);
    for (int j = 0; j < d; ++j) n[j] = size(rng);
    const auto f = random_trig(d, r, 3, rng, false);
    const auto direct = toeplitz(f, n);
    const auto kron = toeplitz_kronecker(f, n);
    ASSERT_EQ(direct.order(), kron.order());
    EXPECT_LE((direct.values - kron.values).cwiseAbs().maxCoeff(), 1e-14) << "n=" << n.to_string();
  }
}

TEST(MatgenProperty, HermitianExactlyWhenCoefficientsSymmetric) {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + trial % 2;
    const int r = 1 + (trial / 2) % 2;
    const bool symmetric = trial % 3 != 0;
    const auto f = random_trig(d, r, 2, rng, symmetric);
    const MultiIndex n = MultiIndex::filled(d, d == 1 ? 7 : 4);
    const auto t = toeplitz(f, n);
    EXPECT_EQ(f.hermitian(), symmetric);
    EXPECT_EQ(linalg::is_hermitian(t.values), symmetric);
  }
}

TEST(MatgenProperty, TraceIsOrderTimesTraceOfZerothCoefficient) {
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + trial % 2;
    const int r = 1 + (trial / 2) % 2;
    // Dyadic entries keep every partial sum exact.
    TrigPolynomial f = random_trig(d, r, 1, rng, false);
    CMatrix c0(r, r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) c0(i, j) = cplx(std::ldexp(1.0 + i + 3 * j, -2), std::ldexp(-1.0 - j, -3));
    f.set(MultiIndex::filled(d, 0), c0);
    const MultiIndex n = MultiIndex::filled(d, 5 + trial % 4);
    const auto t = toeplitz(f, n);
    EXPECT_EQ(t.values.trace(), static_cast<double>(nu(n)) * c0.trace());
  }
}

TEST(MatgenProperty, DiagonalSamplingsCommute) {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double p = u(rng), q = u(rng);
    const auto a = scalar_coefficient([p](double x) { return std::sin(p * x); }, 2);
    const auto b = scalar_coefficient([q](double x) { return q + x * x; }, 2);
    const MultiIndex n{3, 5};
    const CMatrix da = diag_sampling(a, n).values;
    const CMatrix db = diag_sampling(b, n).values;
    EXPECT_EQ(da * db, db * da);
  }
}
