#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "gltlab/error.hpp"
#include "gltlab/linalg.hpp"
#include "gltlab/matgen.hpp"
#include "gltlab/spectra.hpp"
#include "support.hpp"

using namespace gltlab;
using namespace gltlab::testing;

namespace {

MatrixSequence toeplitz_sequence(const TrigPolynomial& f) {
  return [f](const MultiIndex& n) { return toeplitz(f, n).values; };
}

std::vector<MultiIndex> sizes_1d(std::initializer_list<std::int64_t> ns) {
  std::vector<MultiIndex> out;
  for (auto n : ns) out.push_back(MultiIndex{n});
  return out;
}

std::vector<double> real_parts(const std::vector<cplx>& v) {
  std::vector<double> out;
  for (auto z : v) out.push_back(z.real());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Spectrum, LaplacianEigenvaluesClosedForm) {
  const int n = 100;
  const auto values = spectrum(toeplitz(laplacian(), MultiIndex{n}).values, SpectralMode::eigen);
  ASSERT_EQ(values.size(), 100u);
  for (int j = 1; j <= n; ++j) {
    EXPECT_NEAR(values[j - 1].real(), 2.0 - 2.0 * std::cos(j * kPi / (n + 1)), 1e-12);
    EXPECT_EQ(values[j - 1].imag(), 0.0);
  }
}

TEST(Spectrum, SingularValuesDescend) {
  std::mt19937_64 rng(61);
  const auto sv = spectrum(random_matrix(20, 20, rng), SpectralMode::singular);
  for (std::size_t i = 1; i < sv.size(); ++i) EXPECT_GE(sv[i - 1].real(), sv[i].real());
}

TEST(Spectrum, NonHermitianEigenvaluesInCanonicalOrder) {
  CMatrix a = CMatrix::Zero(3, 3);
  a(0, 0) = cplx(1, 1);
  a(1, 1) = cplx(1, -1);
  a(2, 2) = cplx(-2, 0);
  a(0, 1) = 3.0;
  const auto ev = spectrum(a, SpectralMode::eigen);
  EXPECT_NEAR(std::abs(ev[0] - cplx(-2, 0)), 0, 1e-14);
  EXPECT_NEAR(std::abs(ev[1] - cplx(1, -1)), 0, 1e-14);
  EXPECT_NEAR(std::abs(ev[2] - cplx(1, 1)), 0, 1e-14);
}

TEST(Schatten, KnownNorms) {
  const double sv[] = {3.0, 4.0};
  EXPECT_NEAR(schatten_norm_of(sv, 1.0), 7.0, 1e-15);
  EXPECT_NEAR(schatten_norm_of(sv, 2.0), 5.0, 1e-15);
  EXPECT_EQ(schatten_norm_of(sv, kInfinity), 4.0);
  EXPECT_THROW(schatten_norm_of(sv, 0.5), Error);
}

TEST(Functional, EmpiricalMeanAndEmptyInput) {
  const std::vector<cplx> v = {1.0, 2.0, 3.0};
  EXPECT_NEAR(empirical_functional(v, TestFunction::monomial(2, 0.0, 3.0)), 14.0 / 3.0, 1e-15);
  EXPECT_THROW(empirical_functional(std::span<const cplx>(), TestFunction::monomial(1, 0, 1)), Error);
}

TEST(Functional, BumpsVanishOutsideWindow) {
  const auto bump = TestFunction::cosine_bump("b", 1.0, 0.5);
  EXPECT_EQ(bump(0.4), 0.0);
  EXPECT_EQ(bump(1.6), 0.0);
  EXPECT_NEAR(bump(1.0), 1.0, 1e-15);
  for (const auto& f : default_basket(0.0, 3.0)) {
    if (f.support() != TestFunction::Support::bump) continue;
    EXPECT_EQ(f(-1.0), 0.0);
    EXPECT_EQ(f(4.0), 0.0);
  }
  EXPECT_EQ(default_basket_ids(), (std::vector<std::string>{"x", "x2", "x3", "bump1", "bump2"}));
  EXPECT_THROW(make_basket({"x", "nope"}, 0, 1), Error);
}

TEST(Functional, SymbolIntegralOfAbsTheta) {
  // (1/2pi) int |t| dt = pi/2 and (1/2pi) int t^2 dt = pi^2/3 over [-pi, pi].
  const auto s = Symbol::frequency(ExprMatrix::scalar(sx::call(ScalarFunc::abs, sx::t(0))), 1, 1, true);
  QuadratureOptions q;
  q.tolerance = 1e-9;
  q.max_refinements = 14;
  EXPECT_NEAR(symbol_functional(s, TestFunction::monomial(1, 0.0, 4.0), SpectralMode::eigen, q).value, kPi / 2, 1e-8);
  EXPECT_NEAR(symbol_functional(s, TestFunction::monomial(2, 0.0, 4.0), SpectralMode::eigen, q).value,
              kPi * kPi / 3, 1e-8);
}

TEST(Functional, QuadratureFailsWhenRefinementsRunOut) {
  // The kink at t = 1 never falls on a cell boundary.
  const auto kinked = sx::call(ScalarFunc::abs, sx::sub(sx::t(0), sx::number(1.0)));
  const auto s = Symbol::frequency(ExprMatrix::scalar(kinked), 1, 1, true);
  QuadratureOptions q;
  q.tolerance = 1e-15;
  q.max_refinements = 2;
  try {
    symbol_functional(s, TestFunction::monomial(1, 0.0, 4.0), SpectralMode::eigen, q);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::quadrature);
  }
}

TEST(DistributionCheck, SquareErrorIsTwoOverN) {
  DistributionOptions opts;
  opts.mode = SpectralMode::eigen;
  opts.basket = {"x2"};
  const auto sizes = sizes_1d({16, 32, 64});
  const auto report = distribution_check(toeplitz_sequence(laplacian()), Symbol::trigonometric(laplacian()), sizes, opts);
  const auto errors = report.errors_for("x2");
  ASSERT_EQ(errors.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(errors[i], 2.0 / sizes[i][0], 1e-12);
  EXPECT_TRUE(report.pass);
  EXPECT_EQ(report.to_csv().substr(0, report.to_csv().find('\n')), "n,d_n,mode,F_id,empirical,symbol,abs_error");
  EXPECT_NE(report.to_svg().find("<svg"), std::string::npos);
}

TEST(DistributionCheck, RowsAreSizeMajorAndNonNegative) {
  DistributionOptions opts;
  const auto report = distribution_check(toeplitz_sequence(laplacian()), Symbol::trigonometric(laplacian()),
                                         sizes_1d({8, 16}), opts);
  ASSERT_EQ(report.rows.size(), 2 * default_basket_ids().size());
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    EXPECT_EQ(report.rows[i].n, (MultiIndex{i < 5 ? 8 : 16}));
    EXPECT_EQ(report.rows[i].function_id, default_basket_ids()[i % 5]);
    EXPECT_GE(report.rows[i].abs_error, 0.0);
  }
}

TEST(DistributionCheck, WrongSymbolFails) {
  DistributionOptions opts;
  opts.mode = SpectralMode::eigen;
  TrigPolynomial shifted = laplacian();
  shifted.set(MultiIndex{0}, CMatrix::Constant(1, 1, 3.0));
  const auto report = distribution_check(toeplitz_sequence(laplacian()), Symbol::trigonometric(shifted),
                                         sizes_1d({32, 64, 128}), opts);
  EXPECT_FALSE(report.pass);
}

TEST(DistributionCheck, ToleranceScalesWithFunctionRange) {
  // Rank-ceil(sqrt(n)) spikes of height 1 shift the x3 moment by O(1/sqrt(n))
  // times the cube of the window, far beyond an absolute 0.05 at n = 256.
  const MatrixSequence perturbed = [](const MultiIndex& n) {
    CMatrix a = toeplitz(laplacian(), n).values;
    const auto k = static_cast<Eigen::Index>(std::ceil(std::sqrt(static_cast<double>(n[0]))));
    for (Eigen::Index i = 0; i < k; ++i) a(n[0] / 2 + i, n[0] / 2 + i) += 0.5;
    return a;
  };
  DistributionOptions opts;
  opts.mode = SpectralMode::eigen;
  const auto sizes = sizes_1d({64, 128, 256});
  const auto scaled = distribution_check(perturbed, Symbol::trigonometric(laplacian()), sizes, opts);
  EXPECT_TRUE(scaled.pass);
  EXPECT_EQ(scaled.function_scales.at("bump1"), 1.0);
  EXPECT_NEAR(scaled.function_scales.at("x3"), std::pow(scaled.window_hi, 3), 1e-9);
  opts.scale_tolerance = false;
  const auto absolute = distribution_check(perturbed, Symbol::trigonometric(laplacian()), sizes, opts);
  EXPECT_FALSE(absolute.function_verdicts.at("x3"));
  EXPECT_EQ(absolute.rows.size(), scaled.rows.size());
  for (std::size_t i = 0; i < absolute.rows.size(); ++i) EXPECT_EQ(absolute.rows[i].abs_error, scaled.rows[i].abs_error);
}

TEST(DistributionCheck, EigenModeNeedsHermitianOrWaiver) {
  TrigPolynomial g(1, 1);
  g.set(MultiIndex{1}, CMatrix::Constant(1, 1, 1.0));
  DistributionOptions opts;
  opts.mode = SpectralMode::eigen;
  try {
    distribution_check(toeplitz_sequence(g), Symbol::trigonometric(g), sizes_1d({8, 16}), opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::mode);
  }
  opts.quasi_hermitian_waiver = true;
  EXPECT_NO_THROW(distribution_check(toeplitz_sequence(g), Symbol::trigonometric(g), sizes_1d({8, 16}), opts));
}

TEST(DistributionCheck, SizesValidated) {
  EXPECT_THROW(validate_sizes(sizes_1d({16, 8}), 1), Error);
  EXPECT_THROW(validate_sizes(sizes_1d({8, 8}), 1), Error);
  EXPECT_THROW(validate_sizes({MultiIndex{8, 8}}, 1), Error);
  EXPECT_THROW(validate_sizes({}, 1), Error);
  EXPECT_NO_THROW(validate_sizes({MultiIndex{4, 8}, MultiIndex{8, 8}}, 2));
  try {
    validate_sizes(sizes_1d({16, 8}), 1);
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()).rfind("sizes", 0), 0u);
  }
}

TEST(Quantiles, LaplacianMatchesOnSineGrid) {
  const int n = 200;
  const auto values = real_parts(spectrum(toeplitz(laplacian(), MultiIndex{n}).values, SpectralMode::eigen));
  const auto s = Symbol::trigonometric(laplacian());
  const auto q = quantile_compare(values, s, MultiIndex{n}, SpectralMode::eigen, 0, QuantileGrid::sine);
  EXPECT_LE(q.max_deviation, 1e-12);
  EXPECT_EQ(q.compared, n);
  const auto eq = quantile_compare(values, s, MultiIndex{n}, SpectralMode::eigen, default_outlier_count(n));
  EXPECT_LE(eq.max_deviation, 0.1);
  EXPECT_EQ(eq.discarded, 15);
  EXPECT_THROW(quantile_compare_fraction(values, s, MultiIndex{n}, SpectralMode::eigen, 0.5), Error);
}

TEST(Quantiles, OutliersAreDiscarded) {
  const int n = 100;
  CMatrix a = toeplitz(laplacian(), MultiIndex{n}).values;
  a(0, 0) += 50.0;
  const auto values = real_parts(spectrum(a, SpectralMode::eigen));
  const auto s = Symbol::trigonometric(laplacian());
  EXPECT_GT(quantile_compare(values, s, MultiIndex{n}, SpectralMode::eigen, 0).max_deviation, 40.0);
  EXPECT_LT(quantile_compare(values, s, MultiIndex{n}, SpectralMode::eigen, 1).max_deviation, 0.2);
}

TEST(RangeCheck, IntervalHull) {
  const auto s = Symbol::trigonometric(laplacian());
  const auto values = spectrum(toeplitz(laplacian(), MultiIndex{300}).values, SpectralMode::eigen);
  EXPECT_TRUE(range_check(values, s, SpectralMode::eigen, 1e-3).pass);
  std::vector<cplx> half(values.begin(), values.begin() + 150);
  const auto v = range_check(half, s, SpectralMode::eigen, 1e-3);
  EXPECT_FALSE(v.pass);
  EXPECT_GT(v.violations, 0);
  EXPECT_FALSE(v.examples.empty());
}

TEST(SpectraProperty, TraceIdentityForHermitianToeplitz) {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 8; ++trial) {
    const int d = 1 + trial % 2;
    const int r = 1 + (trial / 2) % 2;
    const auto f = random_trig(d, r, 2, rng, true);
    const MultiIndex n = MultiIndex::filled(d, d == 1 ? 40 + 9 * trial : 7 + trial);
    const auto values = spectrum(toeplitz(f, n).values, SpectralMode::eigen);
    double lo = values.front().real(), hi = values.back().real();
    const double mean = empirical_functional(values, TestFunction::monomial(1, lo, hi));
    const double expected = f.coefficient(MultiIndex::filled(d, 0)).trace().real() / r;
    EXPECT_NEAR(mean, expected, 1e-12);
  }
}

TEST(SpectraProperty, FrobeniusIdentity) {
  std::mt19937_64 rng(63);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix a = random_matrix(5 + trial, 5 + trial, rng);
    const double s2 = schatten_norm(a, 2.0);
    EXPECT_NEAR(s2 * s2, a.cwiseAbs2().sum(), 1e-10 * a.cwiseAbs2().sum());
  }
}

TEST(SpectraProperty, SingularValuesUnitarilyInvariant) {
  std::mt19937_64 rng(64);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 4 + trial;
    const CMatrix a = random_matrix(n, n, rng);
    const CMatrix u = random_reflection(n, rng);
    const CMatrix v = random_reflection(n, rng);
    const auto base = spectrum(a, SpectralMode::singular);
    const auto left = spectrum(u * a, SpectralMode::singular);
    const auto both = spectrum(u * a * v, SpectralMode::singular);
    for (std::size_t i = 0; i < base.size(); ++i) {
      EXPECT_NEAR(base[i].real(), left[i].real(), 1e-10);
      EXPECT_NEAR(base[i].real(), both[i].real(), 1e-10);
    }
  }
}
