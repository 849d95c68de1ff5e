#include "gltlab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gltlab/error.hpp"
#include "gltlab/kernels.hpp"
#include "gltlab/linalg.hpp"
#include "gltlab/report.hpp"

namespace gltlab {

namespace {

constexpr double kPi = std::numbers::pi;

double clamp_real(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

int active_axes(const Symbol& s) {
  return s.d() * ((s.depends_on_space() ? 1 : 0) + (s.depends_on_frequency() ? 1 : 0));
}

/// Largest per-axis count keeping the node total under the cap.
int points_under_cap(const Symbol& s, int wanted, std::int64_t cap) {
  const int axes = active_axes(s);
  if (axes == 0) return 1;
  int g = std::max(1, wanted);
  while (g > 1 && std::pow(static_cast<double>(g), axes) > static_cast<double>(cap)) --g;
  return g;
}

std::pair<double, double> symbol_real_range(const Symbol& s, SpectralMode mode) {
  const int g = points_under_cap(s, 512, std::int64_t{1} << 16);
  const auto grid = TensorGrid::midpoint(s, g);
  const auto surf = spectral_surfaces(s, grid, mode);
  double lo = INFINITY, hi = -INFINITY;
  for (cplx v : surf.values) lo = std::min(lo, v.real()), hi = std::max(hi, v.real());
  return {lo, hi};
}

}  // namespace

// ---------------------------------------------------------------------------
// Test functions

TestFunction::TestFunction(std::string id, Support support, double lo, double hi, std::function<double(cplx)> fn)
    : id_(std::move(id)), support_(support), lo_(lo), hi_(hi), fn_(std::move(fn)) {}

TestFunction TestFunction::monomial(int power, double lo, double hi) {
  if (power < 1) throw Error(ErrorKind::configuration, "monomial power must be >= 1");
  if (!(lo <= hi)) throw Error(ErrorKind::configuration, "empty test function window");
  std::string id = power == 1 ? "x" : "x" + std::to_string(power);
  return TestFunction(id, Support::window, lo, hi, [power, lo, hi](cplx z) {
    const cplx w(clamp_real(z.real(), lo, hi), z.imag());
    if (w.imag() == 0.0) return std::pow(w.real(), power);
    return std::pow(w, power).real();
  });
}

TestFunction TestFunction::cosine_bump(std::string id, double center, double half_width) {
  if (!(half_width > 0)) throw Error(ErrorKind::configuration, "bump half-width must be positive");
  return TestFunction(std::move(id), Support::bump, center - half_width, center + half_width,
                      [center, half_width](cplx z) {
                        const double dist = z.imag() == 0.0 ? std::abs(z.real() - center) : std::abs(z - center);
                        if (dist >= half_width) return 0.0;
                        return 0.5 * (1.0 + std::cos(kPi * dist / half_width));
                      });
}

TestFunction TestFunction::zero() {
  return TestFunction("zero", Support::everywhere, -INFINITY, INFINITY, [](cplx) { return 0.0; });
}

std::vector<std::string> default_basket_ids() { return {"x", "x2", "x3", "bump1", "bump2"}; }

std::vector<TestFunction> default_basket(double lo, double hi) {
  return make_basket(default_basket_ids(), lo, hi);
}

std::vector<TestFunction> make_basket(const std::vector<std::string>& ids, double lo, double hi) {
  if (ids.empty()) return default_basket(lo, hi);
  if (!(lo <= hi)) throw Error(ErrorKind::configuration, "empty test function window");
  const double width = std::max(hi - lo, 1e-12);
  std::vector<TestFunction> out;
  for (const auto& id : ids) {
    if (id == "x") {
      out.push_back(TestFunction::monomial(1, lo, hi));
    } else if (id.size() > 1 && id[0] == 'x' &&
               std::all_of(id.begin() + 1, id.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      out.push_back(TestFunction::monomial(std::stoi(id.substr(1)), lo, hi));
    } else if (id == "bump1") {
      out.push_back(TestFunction::cosine_bump(id, lo + width / 3.0, width / 3.0));
    } else if (id == "bump2") {
      out.push_back(TestFunction::cosine_bump(id, lo + 2.0 * width / 3.0, width / 3.0));
    } else if (id == "zero") {
      out.push_back(TestFunction::zero());
    } else {
      throw Error(ErrorKind::configuration, "unknown test function '" + id + "'");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spectra and norms

std::vector<cplx> spectrum(const CMatrix& a, SpectralMode mode) {
  std::vector<cplx> out;
  if (mode == SpectralMode::singular) {
    const auto s = linalg::singular_values(a);
    out.assign(s.begin(), s.end());
    return out;
  }
  if (a.rows() != a.cols()) throw Error(ErrorKind::mode, "eigenvalues need a square matrix");
  if (linalg::is_hermitian(a)) {
    const auto ev = linalg::hermitian_eigenvalues(a);
    out.assign(ev.begin(), ev.end());
    return out;
  }
  out = linalg::eigenvalues(a);
  std::sort(out.begin(), out.end(), [](cplx x, cplx y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return out;
}

double schatten_norm_of(std::span<const double> s, double p) {
  if (!(p >= 1.0)) throw Error(ErrorKind::domain, "Schatten exponent must be >= 1");
  if (s.empty()) return 0.0;
  const double top = *std::max_element(s.begin(), s.end());
  if (std::isinf(p) || top == 0.0) return top;
  double acc = 0.0;
  for (double v : s) acc += std::pow(v / top, p);
  return top * std::pow(acc, 1.0 / p);
}

double schatten_norm(const CMatrix& a, double p) {
  if (!(p >= 1.0)) throw Error(ErrorKind::domain, "Schatten exponent must be >= 1");
  const auto s = linalg::singular_values(a);
  return schatten_norm_of(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())), p);
}

double empirical_functional(std::span<const cplx> values, const TestFunction& F) {
  if (values.empty()) throw Error(ErrorKind::invalid_size, "empirical functional of an empty spectrum");
  double acc = 0.0;
  for (cplx v : values) acc += F(v);
  return acc / static_cast<double>(values.size());
}

QuadratureResult symbol_functional(const Symbol& s, const TestFunction& F, SpectralMode mode,
                                   const QuadratureOptions& options, Exec exec) {
  if (options.initial_points < 1) throw Error(ErrorKind::configuration, "quadrature needs at least one point");
  if (options.max_refinements < 1)
    throw Error(ErrorKind::configuration, "quadrature needs at least one refinement to estimate its error");
  const int axes = active_axes(s);
  auto integrate = [&](int g) {
    const auto grid = TensorGrid::midpoint(s, g);
    if (static_cast<std::int64_t>(grid.size()) > options.max_nodes)
      throw Error(ErrorKind::quadrature, "quadrature grid of " + std::to_string(grid.size()) +
                                             " nodes exceeds the cap of " + std::to_string(options.max_nodes));
    const auto surf = spectral_surfaces(s, grid, mode, exec);
    return kernels::surface_mean(surf, [&F](cplx z) { return F(z); }, exec);
  };
  QuadratureResult res;
  int g = options.initial_points;
  double prev = integrate(g);
  if (axes == 0) return {prev, 1, 0.0};
  for (int k = 0; k < options.max_refinements; ++k) {
    if (std::pow(2.0 * g, axes) > static_cast<double>(options.max_nodes)) break;
    g *= 2;
    const double cur = integrate(g);
    const double change = std::abs(cur - prev);
    res = {cur, g, change};
    if (change <= options.tolerance * std::max(1.0, std::abs(cur))) return res;
    prev = cur;
  }
  std::ostringstream msg;
  if (res.points_per_dim == 0) {
    msg << "symbol integral for '" << F.id() << "': no refinement fits under the node cap of " << options.max_nodes;
    throw Error(ErrorKind::quadrature, msg.str());
  }
  msg << "symbol integral for '" << F.id() << "' did not converge: last change " << res.last_change << " at "
      << res.points_per_dim << " points per axis (tolerance " << options.tolerance << ")";
  throw Error(ErrorKind::quadrature, msg.str());
}

// ---------------------------------------------------------------------------
// Distribution check

void validate_sizes(const std::vector<MultiIndex>& sizes, int d) {
  if (sizes.empty()) throw Error(ErrorKind::configuration, "sizes: at least one size is required");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (static_cast<int>(sizes[i].dim()) != d)
      throw Error(ErrorKind::configuration, "sizes: " + sizes[i].to_string() + " has dimension " +
                                                std::to_string(sizes[i].dim()) + ", expected " + std::to_string(d));
    nu(sizes[i]);
    if (i > 0 && sizes[i].min_entry() <= sizes[i - 1].min_entry())
      throw Error(ErrorKind::configuration, "sizes: smallest entries must increase strictly (" +
                                                sizes[i - 1].to_string() + " then " + sizes[i].to_string() + ")");
  }
}

std::vector<double> DistributionReport::errors_for(const std::string& function_id) const {
  std::vector<double> out;
  for (const auto& row : rows)
    if (row.function_id == function_id) out.push_back(row.abs_error);
  return out;
}

std::string DistributionReport::to_csv() const {
  std::ostringstream out;
  out << "n,d_n,mode,F_id,empirical,symbol,abs_error\n";
  for (const auto& row : rows)
    out << report::csv_field(row.n.to_string()) << ',' << row.order << ',' << to_string(mode) << ','
        << report::csv_field(row.function_id) << ',' << report::number(row.empirical) << ','
        << report::number(row.symbol) << ',' << report::number(row.abs_error) << '\n';
  return out.str();
}

std::string DistributionReport::to_svg() const {
  std::vector<report::Series> series;
  for (const auto& [id, verdict] : function_verdicts) {
    report::Series s;
    s.label = id + (verdict ? " (pass)" : " (fail)");
    for (const auto& row : rows)
      if (row.function_id == id) {
        s.x.push_back(static_cast<double>(row.order));
        s.y.push_back(row.abs_error);
      }
    series.push_back(std::move(s));
  }
  return report::loglog_chart(std::string("distribution error, ") + to_string(mode) + " mode", "matrix order d_n",
                              "|empirical - symbol|", series);
}

DistributionReport distribution_check(const MatrixSequence& seq, const Symbol& s,
                                      const std::vector<MultiIndex>& sizes, const DistributionOptions& options) {
  validate_sizes(sizes, s.d());
  DistributionReport rep;
  rep.mode = options.mode;
  rep.sizes = sizes;
  rep.options = options;

  std::vector<std::vector<cplx>> spectra;
  for (const auto& n : sizes) {
    const CMatrix a = seq(n);
    const std::int64_t order = static_cast<std::int64_t>(s.r()) * nu(n);
    if (a.rows() != order || a.cols() != order)
      throw Error(ErrorKind::invalid_size, "matrix for n = " + n.to_string() + " has order " +
                                               std::to_string(a.rows()) + ", expected " + std::to_string(order));
    if (options.mode == SpectralMode::eigen && !options.quasi_hermitian_waiver && !linalg::is_hermitian(a))
      throw Error(ErrorKind::mode, "eigenvalue distribution requested for a non-Hermitian matrix at n = " +
                                       n.to_string());
    spectra.push_back(spectrum(a, options.mode));
    rep.orders.push_back(order);
  }

  const auto [slo, shi] = symbol_real_range(s, options.mode);
  rep.symbol_lo = slo;
  rep.symbol_hi = shi;
  double lo = slo, hi = shi;
  for (const auto& sp : spectra)
    for (cplx v : sp) lo = std::min(lo, v.real()), hi = std::max(hi, v.real());
  rep.window_lo = lo;
  rep.window_hi = hi;

  const double slack_band = 1e-3 * std::max(1.0, shi - slo);
  for (const auto& sp : spectra) {
    std::int64_t count = 0;
    for (cplx v : sp)
      if (v.real() < slo - slack_band || v.real() > shi + slack_band) ++count;
    rep.outliers.push_back(count);
  }

  const auto basket = make_basket(options.basket, lo, hi);
  std::vector<double> symbol_values;
  for (const auto& F : basket) symbol_values.push_back(symbol_functional(s, F, options.mode, options.quadrature).value);

  for (std::size_t i = 0; i < sizes.size(); ++i)
    for (std::size_t f = 0; f < basket.size(); ++f) {
      DistributionRow row;
      row.n = sizes[i];
      row.order = rep.orders[i];
      row.function_id = basket[f].id();
      row.empirical = empirical_functional(spectra[i], basket[f]);
      row.symbol = symbol_values[f];
      row.abs_error = std::abs(row.empirical - row.symbol);
      rep.rows.push_back(std::move(row));
    }

  rep.pass = true;
  for (const auto& F : basket) {
    double scale = 1.0;
    if (options.scale_tolerance)
      for (int k = 0; k <= 256; ++k) scale = std::max(scale, std::abs(F(lo + (hi - lo) * k / 256.0)));
    rep.function_scales[F.id()] = scale;
    auto errs = rep.errors_for(F.id());
    for (auto& e : errs)
      if (e <= options.noise_floor) e = 0.0;
    bool ok = errs.back() <= options.tolerance * scale;
    const std::size_t first = errs.size() >= 3 ? errs.size() - 2 : 1;
    for (std::size_t k = first; k < errs.size(); ++k)
      if (errs[k] > options.slack * errs[k - 1] && errs[k] > 0.0) ok = false;
    rep.function_verdicts[F.id()] = ok;
    rep.pass = rep.pass && ok;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Quantile comparison

std::int64_t default_outlier_count(std::int64_t d_n) {
  return static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(d_n))));
}

namespace {

TensorGrid quantile_grid(const Symbol& s, const MultiIndex& n, QuantileGrid kind) {
  if (kind == QuantileGrid::equispaced) return TensorGrid::equispaced(s, n);
  if (static_cast<int>(n.dim()) != s.d())
    throw Error(ErrorKind::invalid_size, "grid size " + n.to_string() + " does not match d");
  nu(n);
  TensorGrid g;
  for (int j = 0; j < s.d(); ++j) {
    std::vector<double> xs, ts;
    const auto nj = n[j];
    if (s.depends_on_space())
      for (std::int64_t k = 1; k <= nj; ++k) xs.push_back(static_cast<double>(k) / static_cast<double>(nj));
    else
      xs.push_back(0.5);
    if (s.depends_on_frequency())
      for (std::int64_t k = 1; k <= nj; ++k) ts.push_back(static_cast<double>(k) * kPi / static_cast<double>(nj + 1));
    else
      ts.push_back(0.0);
    g.x.push_back(std::move(xs));
    g.theta.push_back(std::move(ts));
  }
  return g;
}

}  // namespace

QuantileResult quantile_compare(std::span<const double> values, const Symbol& s, const MultiIndex& n,
                                SpectralMode mode, std::int64_t discard, QuantileGrid grid) {
  const auto count = static_cast<std::int64_t>(values.size());
  if (count == 0) throw Error(ErrorKind::invalid_size, "quantile comparison of an empty spectrum");
  if (discard < 0 || 2 * discard >= count)
    throw Error(ErrorKind::configuration, "outlier allowance " + std::to_string(discard) +
                                              " must be below half of " + std::to_string(count) + " values");
  if (!std::is_sorted(values.begin(), values.end()))
    throw Error(ErrorKind::configuration, "quantile comparison needs ascending values");

  auto samples = spectral_surfaces(s, quantile_grid(s, n, grid), mode).real_values();
  std::sort(samples.begin(), samples.end());
  const auto m = static_cast<std::int64_t>(samples.size());

  std::vector<double> dev(static_cast<std::size_t>(count));
  for (std::int64_t k = 0; k < count; ++k) {
    double ref;
    if (m == count) {
      ref = samples[static_cast<std::size_t>(k)];
    } else {
      const double pos = (static_cast<double>(k) + 0.5) / static_cast<double>(count) * static_cast<double>(m) - 0.5;
      const double cl = std::clamp(pos, 0.0, static_cast<double>(m - 1));
      const auto i0 = static_cast<std::size_t>(std::floor(cl));
      const auto i1 = std::min(i0 + 1, static_cast<std::size_t>(m - 1));
      const double w = cl - static_cast<double>(i0);
      ref = (1.0 - w) * samples[i0] + w * samples[i1];
    }
    dev[static_cast<std::size_t>(k)] = std::abs(values[static_cast<std::size_t>(k)] - ref);
  }
  std::sort(dev.begin(), dev.end());
  QuantileResult res;
  res.discarded = discard;
  res.compared = count - discard;
  res.symbol_samples = samples.size();
  res.max_deviation = dev[static_cast<std::size_t>(count - discard - 1)];
  return res;
}

QuantileResult quantile_compare_fraction(std::span<const double> values, const Symbol& s, const MultiIndex& n,
                                         SpectralMode mode, double outlier_budget, QuantileGrid grid) {
  if (!(outlier_budget >= 0.0) || outlier_budget >= 0.5)
    throw Error(ErrorKind::configuration, "outlier budget must lie in [0, 0.5)");
  const auto count = static_cast<double>(values.size());
  auto discard = static_cast<std::int64_t>(std::ceil(outlier_budget * count));
  if (2 * discard >= static_cast<std::int64_t>(values.size()) && discard > 0) --discard;
  return quantile_compare(values, s, n, mode, discard, grid);
}

// ---------------------------------------------------------------------------
// Range check

namespace {

double cross(cplx o, cplx a, cplx b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
}

std::vector<cplx> convex_hull(std::vector<cplx> pts) {
  std::sort(pts.begin(), pts.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<cplx> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double segment_distance(cplx p, cplx a, cplx b) {
  const cplx ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  const double t = std::clamp(((p - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

double hull_distance(cplx p, const std::vector<cplx>& hull) {
  if (hull.size() == 1) return std::abs(p - hull[0]);
  if (hull.size() == 2) return segment_distance(p, hull[0], hull[1]);
  bool inside = true;
  for (std::size_t i = 0; i < hull.size(); ++i)
    if (cross(hull[i], hull[(i + 1) % hull.size()], p) < 0) inside = false;
  if (inside) return 0.0;
  double best = INFINITY;
  for (std::size_t i = 0; i < hull.size(); ++i)
    best = std::min(best, segment_distance(p, hull[i], hull[(i + 1) % hull.size()]));
  return best;
}

TensorGrid closed_grid(const Symbol& s, int g) {
  TensorGrid grid;
  for (int j = 0; j < s.d(); ++j) {
    std::vector<double> xs, ts;
    if (s.depends_on_space())
      for (int k = 0; k <= g; ++k) xs.push_back(static_cast<double>(k) / g);
    else
      xs.push_back(0.5);
    if (s.depends_on_frequency())
      for (int k = 0; k <= g; ++k) ts.push_back(std::min(kPi, -kPi + 2.0 * kPi * k / g));
    else
      ts.push_back(0.0);
    grid.x.push_back(std::move(xs));
    grid.theta.push_back(std::move(ts));
  }
  return grid;
}

}  // namespace

RangeVerdict range_check(std::span<const cplx> values, const Symbol& s, SpectralMode mode, double tol,
                         int points_per_dim) {
  if (values.empty()) throw Error(ErrorKind::invalid_size, "range check without spectral values");
  if (!(tol >= 0)) throw Error(ErrorKind::configuration, "range tolerance must be non-negative");
  const int g = std::max(1, points_under_cap(s, points_per_dim, std::int64_t{1} << 20) - 1);
  const auto samples = spectral_surfaces(s, closed_grid(s, g), mode);

  bool real = std::all_of(values.begin(), values.end(), [](cplx v) { return v.imag() == 0.0; }) &&
              std::all_of(samples.values.begin(), samples.values.end(), [](cplx v) { return v.imag() == 0.0; });
  std::vector<cplx> hull;
  double lo = INFINITY, hi = -INFINITY;
  if (real) {
    for (cplx v : values) lo = std::min(lo, v.real()), hi = std::max(hi, v.real());
  } else {
    hull = convex_hull(std::vector<cplx>(values.begin(), values.end()));
  }

  RangeVerdict res;
  for (cplx z : samples.values) {
    const double dist = real ? std::max({0.0, lo - z.real(), z.real() - hi}) : hull_distance(z, hull);
    res.worst_distance = std::max(res.worst_distance, dist);
    if (dist > tol) {
      ++res.violations;
      if (res.examples.size() < 5) res.examples.push_back(z);
    }
  }
  res.pass = res.violations == 0;
  return res;
}

}  // namespace gltlab
