#pragma once

#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gltlab/exec.hpp"
#include "gltlab/symbols.hpp"

namespace gltlab {

/// Size-indexed matrix generator {A_n}.
using MatrixSequence = std::function<CMatrix(const MultiIndex&)>;

/// Continuous test function. Real arguments are the common case; for
/// complex arguments the polynomial family uses Re(w^k) with the real part
/// of w clamped to the window, and bumps use the distance to the centre.
class TestFunction {
 public:
  enum class Support { window, bump, everywhere };

  TestFunction(std::string id, Support support, double lo, double hi, std::function<double(cplx)> fn);

  /// p(x) = x^power on clamp(x, lo, hi). Ids "x", "x2", "x3", ...
  static TestFunction monomial(int power, double lo, double hi);
  /// (1 + cos(pi (x - c) / w)) / 2 on |x - c| < w, zero elsewhere.
  static TestFunction cosine_bump(std::string id, double center, double half_width);
  static TestFunction zero();

  const std::string& id() const noexcept { return id_; }
  Support support() const noexcept { return support_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double operator()(cplx z) const { return fn_(z); }
  double operator()(double x) const { return fn_(cplx(x)); }

 private:
  std::string id_;
  Support support_;
  double lo_, hi_;
  std::function<double(cplx)> fn_;
};

/// x, x2, x3 on [lo, hi] plus cosine bumps "bump1", "bump2" centred at the
/// third-points with half-width (hi - lo) / 3.
std::vector<TestFunction> default_basket(double lo, double hi);
/// Ids: x, x2, x3, ..., bump1, bump2, zero. Empty list means the default basket.
std::vector<TestFunction> make_basket(const std::vector<std::string>& ids, double lo, double hi);
std::vector<std::string> default_basket_ids();

/// Singular values descending (sigma) or eigenvalues in canonical order
/// (lambda). Hermitian input (||A - A^*|| <= 1e-12 ||A||) takes the
/// self-adjoint path and yields real eigenvalues.
std::vector<cplx> spectrum(const CMatrix& a, SpectralMode mode);

constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// (sum sigma_i^p)^(1/p); p = infinity gives sigma_1. Throws for p < 1.
double schatten_norm(const CMatrix& a, double p);
double schatten_norm_of(std::span<const double> singular_values, double p);

/// (1/n) sum F(v_i). Throws for an empty list.
double empirical_functional(std::span<const cplx> values, const TestFunction& F);

struct QuadratureOptions {
  int initial_points = 64;      ///< per active axis
  double tolerance = 1e-6;      ///< on |I(2g) - I(g)| / max(1, |I(2g)|)
  int max_refinements = 8;
  std::int64_t max_nodes = std::int64_t{1} << 24;
};

struct QuadratureResult {
  double value = 0.0;
  int points_per_dim = 0;
  double last_change = 0.0;
};

/// (1/|D|) int_D (1/r) sum_i F(sigma_i or lambda_i of kappa) by the tensor
/// midpoint rule, doubling the grid until successive values agree.
QuadratureResult symbol_functional(const Symbol& s, const TestFunction& F, SpectralMode mode,
                                   const QuadratureOptions& options = {}, Exec exec = Exec::parallel);

struct DistributionOptions {
  SpectralMode mode = SpectralMode::singular;
  std::vector<std::string> basket;  ///< ids; empty selects the default basket
  double tolerance = 0.05;          ///< on the error at the largest size
  /// Divide each error by max(1, sup |F|) over the window before comparing
  /// it with the tolerance, so that steep basket functions are not held to
  /// a tighter standard than bounded ones.
  bool scale_tolerance = true;
  double slack = 1.5;               ///< allowed growth per step of the trend test
  double noise_floor = 1e-10;       ///< errors below this count as zero
  /// lambda-mode on non-Hermitian matrices, e.g. after a quasi-Hermitian
  /// split check has passed.
  bool quasi_hermitian_waiver = false;
  QuadratureOptions quadrature;
};

struct DistributionRow {
  MultiIndex n;
  std::int64_t order = 0;
  std::string function_id;
  double empirical = 0.0;
  double symbol = 0.0;
  double abs_error = 0.0;
};

struct DistributionReport {
  SpectralMode mode = SpectralMode::singular;
  std::vector<MultiIndex> sizes;
  std::vector<std::int64_t> orders;
  std::vector<DistributionRow> rows;      ///< size-major, basket order within a size
  std::vector<std::int64_t> outliers;     ///< per size: values outside the symbol range
  double window_lo = 0.0, window_hi = 0.0;
  double symbol_lo = 0.0, symbol_hi = 0.0;
  std::map<std::string, bool> function_verdicts;
  std::map<std::string, double> function_scales;  ///< divisor applied before the tolerance test
  bool pass = false;
  DistributionOptions options;

  std::vector<double> errors_for(const std::string& function_id) const;
  /// Header "n,d_n,mode,F_id,empirical,symbol,abs_error".
  std::string to_csv() const;
  /// Log-log error versus matrix order, one polyline per test function.
  std::string to_svg() const;
};

/// Compares empirical functionals of each A_n with the symbol integral for
/// every basket function. A function passes when its (scaled) error at the
/// largest size is below tolerance and the error does not grow (beyond
/// slack) over the last two size steps.
DistributionReport distribution_check(const MatrixSequence& seq, const Symbol& s,
                                      const std::vector<MultiIndex>& sizes, const DistributionOptions& options);

/// Sizes must be strictly increasing in their smallest entry.
void validate_sizes(const std::vector<MultiIndex>& sizes, int d);

enum class QuantileGrid {
  equispaced,  ///< a + j (b - a) / n_j, j = 1..n_j
  sine,        ///< theta_j = j pi / (n_j + 1) on [0, pi]; for even symbols
};

struct QuantileResult {
  double max_deviation = 0.0;
  std::int64_t discarded = 0;
  std::int64_t compared = 0;
  std::size_t symbol_samples = 0;
};

/// Sorted real spectral values against the sorted symbol samples on the
/// grid of size n, after discarding the worst `discard` deviations. When the
/// sample count differs from the number of values, symbol quantiles are
/// linearly interpolated at levels (k + 1/2) / count.
QuantileResult quantile_compare(std::span<const double> sorted_values, const Symbol& s, const MultiIndex& n,
                                SpectralMode mode, std::int64_t discard, QuantileGrid grid = QuantileGrid::equispaced);
/// Budget given as a fraction of the number of values; must be < 1/2.
QuantileResult quantile_compare_fraction(std::span<const double> sorted_values, const Symbol& s, const MultiIndex& n,
                                         SpectralMode mode, double outlier_budget,
                                         QuantileGrid grid = QuantileGrid::equispaced);
/// Default outlier allowance: ceil(sqrt(d_n)).
std::int64_t default_outlier_count(std::int64_t d_n);

struct RangeVerdict {
  bool pass = false;
  std::int64_t violations = 0;
  double worst_distance = 0.0;
  std::vector<cplx> examples;  ///< a few violating symbol samples
};

/// Every symbol surface sample must lie within tol of the hull of the
/// observed values: an interval when everything is real, otherwise the
/// convex hull in the complex plane.
RangeVerdict range_check(std::span<const cplx> values, const Symbol& s, SpectralMode mode, double tol,
                         int points_per_dim = 256);

}  // namespace gltlab
