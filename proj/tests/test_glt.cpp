#include <gtest/gtest.h>

#include <random>

#include "gltlab/error.hpp"
#include "gltlab/glt.hpp"
#include "gltlab/linalg.hpp"
#include "support.hpp"

using namespace gltlab;
using namespace gltlab::testing;

namespace {

CoefficientFunction random_coefficient(int d, int r, std::mt19937_64& rng) {
  const CMatrix a = random_block(r, rng);
  const CMatrix b = random_block(r, rng);
  return CoefficientFunction(d, r, [a, b, d](std::span<const double> x) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += x[j];
    return CMatrix(a + std::cos(s) * b);
  }, false);
}

CoefficientFunction real_coefficient(int d, std::function<double(double)> g) {
  return CoefficientFunction(d, 1, [g](std::span<const double> x) { return CMatrix::Constant(1, 1, g(x[0])); }, true);
}

GltExpr random_tree(int d, int r, int depth, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 5 : 1);
  switch (pick(rng)) {
    case 0: return GltExpr::toeplitz(random_trig(d, r, 1, rng, false));
    case 1: return GltExpr::diag(random_coefficient(d, r, rng));
    case 2: return GltExpr::adjoint(random_tree(d, r, depth - 1, rng));
    case 3: {
      std::uniform_real_distribution<double> w(-2.0, 2.0);
      return GltExpr::lincomb(cplx(w(rng), w(rng)), random_tree(d, r, depth - 1, rng), w(rng),
                              random_tree(d, r, depth - 1, rng));
    }
    default: return GltExpr::product(random_tree(d, r, depth - 1, rng), random_tree(d, r, depth - 1, rng));
  }
}

void random_node(int d, std::mt19937_64& rng, std::vector<double>& x, std::vector<double>& th) {
  std::uniform_real_distribution<double> ux(0.0, 1.0), ut(-kPi, kPi);
  x.resize(d);
  th.resize(d);
  for (int j = 0; j < d; ++j) {
    x[j] = ux(rng);
    th[j] = ut(rng);
  }
}

double max_abs(const CMatrix& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST(GltExpr, SymbolOfLeaves) {
  const auto t = GltExpr::toeplitz(laplacian());
  const auto a = GltExpr::diag(real_coefficient(1, [](double x) { return x; }));
  const auto s = symbol_of(GltExpr::product(a, t));
  const double x[] = {0.3};
  const double th[] = {1.1};
  EXPECT_NEAR(s.evaluate(x, th)(0, 0).real(), 0.3 * (2 - 2 * std::cos(1.1)), 1e-15);
  EXPECT_EQ(symbol_of(GltExpr::zero(1, 1)).evaluate(x, th)(0, 0), cplx(0.0));
}

TEST(GltExpr, DeclarationsPropagate) {
  const auto t = GltExpr::toeplitz(laplacian());
  const auto a = GltExpr::diag(real_coefficient(1, [](double x) { return x; }));
  EXPECT_TRUE(t.hermitian());
  EXPECT_TRUE(GltExpr::lincomb(2.0, t, -1.0, a).hermitian());
  EXPECT_FALSE(GltExpr::lincomb(cplx(0, 1), t, 1.0, a).hermitian());
  EXPECT_FALSE(GltExpr::product(a, t).hermitian());
  EXPECT_TRUE(GltExpr::apply(NamedFunction::parse("exp"), t).hermitian());
  EXPECT_THROW(symbol_of(GltExpr::apply(NamedFunction::parse("exp"), GltExpr::product(a, t))), Error);
  EXPECT_THROW(symbol_of(GltExpr::pseudo_inverse(t, false)), Error);
  EXPECT_THROW(GltExpr::lincomb(1.0, t, 1.0, GltExpr::toeplitz(laplacian_2d())), Error);
}

TEST(GltExpr, SpikesAreUnitDiagonalEntries) {
  const auto m = materialize(GltExpr::zero(1, 1, ZeroKind::spikes), MultiIndex{50}).matrix.values;
  EXPECT_EQ(m.trace(), cplx(8.0));
  EXPECT_EQ(m.cwiseAbs().sum(), 8.0);
  EXPECT_EQ(materialize(GltExpr::zero(2, 2), MultiIndex{3, 3}).matrix.values.norm(), 0.0);
}

TEST(GltExpr, PseudoInverseOfInvertibleToeplitz) {
  const auto t = GltExpr::toeplitz(laplacian());
  const auto n = MultiIndex{40};
  const CMatrix a = materialize(t, n).matrix.values;
  const auto inv = materialize(GltExpr::pseudo_inverse(t), n);
  EXPECT_TRUE(inv.warnings.empty());
  EXPECT_LE(max_abs(inv.matrix.values * a - CMatrix::Identity(40, 40)), 1e-10);
}

TEST(GltExpr, PseudoInverseTruncatesAndWarns) {
  // x - 1/2 vanishes at the grid point i = n/2.
  const auto a = GltExpr::diag(real_coefficient(1, [](double x) { return x - 0.5; }));
  const auto p = materialize(GltExpr::pseudo_inverse(a), MultiIndex{8});
  EXPECT_FALSE(p.warnings.empty());
  EXPECT_EQ(p.matrix.values(3, 3), cplx(0.0));
  EXPECT_NEAR(p.matrix.values(0, 0).real(), 1.0 / (0.125 - 0.5), 1e-14);
}

TEST(GltExpr, MatrixExponentialMatchesEigenOracle) {
  std::mt19937_64 rng(81);
  const auto f = random_trig(1, 2, 2, rng, true);
  const auto n = MultiIndex{30};
  const CMatrix a = materialize(GltExpr::toeplitz(f), n).matrix.values;
  const Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
  const CMatrix oracle = es.eigenvectors() * es.eigenvalues().array().exp().matrix().cast<cplx>().asDiagonal() *
                         es.eigenvectors().adjoint();
  const CMatrix got = materialize(GltExpr::apply(NamedFunction::parse("exp"), GltExpr::toeplitz(f)), n).matrix.values;
  EXPECT_LE(max_abs(got - oracle), 1e-10 * std::max(1.0, max_abs(oracle)));
}

TEST(GltProperty, SymbolIsHomomorphism) {
  std::mt19937_64 rng(82);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + trial % 2;
    const int r = 1 + (trial / 2) % 2;
    const auto e1 = random_tree(d, r, 2, rng);
    const auto e2 = random_tree(d, r, 2, rng);
    const cplx alpha(0.7, -0.2), beta(-1.3, 0.0);
    const auto s1 = symbol_of(e1), s2 = symbol_of(e2);
    const auto sp = symbol_of(GltExpr::product(e1, e2));
    const auto sl = symbol_of(GltExpr::lincomb(alpha, e1, beta, e2));
    const auto sa = symbol_of(GltExpr::adjoint(e1));
    std::vector<double> x, th;
    for (int node = 0; node < 100; ++node) {
      random_node(d, rng, x, th);
      const CMatrix v1 = s1.evaluate(x, th), v2 = s2.evaluate(x, th);
      const double scale = std::max(1.0, max_abs(v1) * max_abs(v2));
      EXPECT_LE(max_abs(sp.evaluate(x, th) - v1 * v2), 1e-12 * scale);
      EXPECT_LE(max_abs(sl.evaluate(x, th) - (alpha * v1 + beta * v2)), 1e-12 * scale);
      EXPECT_EQ(sa.evaluate(x, th), CMatrix(v1.adjoint()));
    }
  }
}

TEST(GltProperty, MaterializeRespectsAlgebra) {
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + trial % 2;
    const int r = 1 + (trial / 2) % 2;
    const MultiIndex n = MultiIndex::filled(d, d == 1 ? 24 : 5);
    const auto e1 = random_tree(d, r, 2, rng);
    const auto e2 = random_tree(d, r, 2, rng);
    const CMatrix m1 = materialize(e1, n).matrix.values;
    const CMatrix m2 = materialize(e2, n).matrix.values;
    EXPECT_EQ(materialize(GltExpr::adjoint(e1), n).matrix.values, CMatrix(m1.adjoint()));
    const cplx alpha(1.5, 0.5), beta(-0.25, 2.0);
    const CMatrix lc = materialize(GltExpr::lincomb(alpha, e1, beta, e2), n).matrix.values;
    EXPECT_LE(max_abs(lc - (alpha * m1 + beta * m2)), 1e-13 * std::max(1.0, max_abs(lc)));
  }
}

TEST(GltProperty, PolynomialCalculusConsistent) {
  std::mt19937_64 rng(84);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 1 + trial % 2;
    const int r = 1 + (trial / 2) % 2;
    const auto e = GltExpr::toeplitz(random_trig(d, r, 1, rng, true));
    const MultiIndex n = MultiIndex::filled(d, d == 1 ? 30 : 6);
    const CMatrix a = materialize(e, n).matrix.values;
    NamedFunction p;
    p.kind = NamedFunction::Kind::poly;
    p.coefficients = {0.5, -1.0, 0.25, 0.125};
    const auto I = CMatrix::Identity(a.rows(), a.cols());
    const CMatrix oracle = 0.5 * I - a + 0.25 * a * a + 0.125 * a * a * a;
    const CMatrix got = materialize(GltExpr::apply(p, e), n).matrix.values;
    EXPECT_LE(max_abs(got - oracle), 1e-10 * std::max(1.0, max_abs(oracle)));
  }
}

TEST(Glt1, ProductOfDiagonalAndToeplitzDistributes) {
  const auto a = GltExpr::diag(real_coefficient(1, [](double x) { return x; }));
  const auto e = GltExpr::product(a, GltExpr::toeplitz(laplacian()));
  DistributionOptions opts;
  const auto report = glt1_verify(e, {MultiIndex{32}, MultiIndex{64}, MultiIndex{128}}, opts);
  EXPECT_TRUE(report.pass);
  EXPECT_LT(report.errors_for("x").back(), 0.02);
}

TEST(Glt1, EigenModeGatedOnSplit) {
  // i * (T(e^{it}) - T(e^{-it})) is Hermitian; T(e^{it}) alone is not quasi-Hermitian.
  TrigPolynomial shift(1, 1);
  shift.set(MultiIndex{1}, CMatrix::Constant(1, 1, 1.0));
  DistributionOptions opts;
  opts.mode = SpectralMode::eigen;
  EXPECT_THROW(glt1_verify(GltExpr::toeplitz(shift), {MultiIndex{16}, MultiIndex{32}}, opts), Error);
  const auto t = GltExpr::toeplitz(laplacian());
  const auto corner = GltExpr::lincomb(1.0, t, 1.0, GltExpr::product(GltExpr::zero(1, 1, ZeroKind::spikes),
                                                                     GltExpr::toeplitz(shift)));
  EXPECT_NO_THROW(glt1_verify(corner, {MultiIndex{64}, MultiIndex{128}, MultiIndex{256}}, opts));
}

TEST(Glt5, SplitChecks) {
  const auto sizes = std::vector<MultiIndex>{MultiIndex{64}, MultiIndex{128}, MultiIndex{256}};
  const auto t = GltExpr::toeplitz(laplacian());
  MatrixSequence corner = [&](const MultiIndex& n) {
    CMatrix a = materialize(t, n).matrix.values;
    a(0, n[0] - 1) += 1.0;
    return a;
  };
  const auto ok = glt5_split_check(corner, sizes);
  EXPECT_TRUE(ok.pass);
  for (std::size_t i = 0; i < sizes.size(); ++i) EXPECT_NEAR(ok.y_norm[i], 0.5, 1e-12);
  EXPECT_EQ(ok.to_csv().substr(0, ok.to_csv().find('\n')), "n,d_n,x_norm,y_norm,y_trace_normalized");
  TrigPolynomial shift(1, 1);
  shift.set(MultiIndex{1}, CMatrix::Constant(1, 1, 1.0));
  MatrixSequence s = [&](const MultiIndex& n) { return materialize(GltExpr::toeplitz(shift), n).matrix.values; };
  EXPECT_FALSE(glt5_split_check(s, sizes).pass);
}

TEST(Glt5, SplitIsExact) {
  std::mt19937_64 rng(85);
  const auto f = random_trig(1, 2, 2, rng, false);
  MatrixSequence seq = [&](const MultiIndex& n) { return materialize(GltExpr::toeplitz(f), n).matrix.values; };
  const auto res = glt5_split_check(seq, {MultiIndex{16}});
  const CMatrix a = seq(MultiIndex{16});
  const CMatrix x = (a + a.adjoint()) / 2.0;
  EXPECT_NEAR(res.x_norm[0], linalg::singular_values(x)(0), 1e-12);
  EXPECT_NEAR(res.y_norm[0], linalg::singular_values(CMatrix(a - x))(0), 1e-12);
}
