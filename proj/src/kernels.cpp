#include "gltlab/kernels.hpp"

#include <cmath>
#include <numbers>

#include "gltlab/error.hpp"
#include "gltlab/parallel.hpp"

namespace gltlab::kernels {

namespace {

constexpr double kPi = std::numbers::pi;

struct Coefficient {
  std::vector<std::int64_t> offset;
  const CMatrix* block;
};

std::vector<Coefficient> flatten(const TrigPolynomial& f) {
  std::vector<Coefficient> out;
  for (const auto& [k, c] : f.coefficients()) out.push_back({k.entries(), &c});
  return out;
}

}  // namespace

void toeplitz_fill(const TrigPolynomial& f, const MultiIndex& n, CMatrix& out, Exec exec) {
  const int d = f.d();
  const Eigen::Index r = f.r();
  const std::int64_t count = nu(n);
  const auto coeffs = flatten(f);
  const MultiIndexInterval grid = MultiIndexInterval::ones_to(n);

  // Column block of row block i for offset k, or -1 when i - k leaves [1, n].
  auto column_of = [&](const MultiIndex& i, const std::vector<std::int64_t>& k) -> std::int64_t {
    std::int64_t rank = 0;
    for (int l = 0; l < d; ++l) {
      const std::int64_t j = i[l] - k[l];
      if (j < 1 || j > n[l]) return -1;
      rank = rank * n[l] + (j - 1);
    }
    return rank;
  };

  if (exec == Exec::serial) {
    for (const auto& c : coeffs)
      for (std::int64_t row = 0; row < count; ++row) {
        const auto col = column_of(lex_unrank(row, grid), c.offset);
        if (col >= 0) out.block(row * r, col * r, r, r) = *c.block;
      }
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t row = 0; row < count; ++row) {
    const MultiIndex i = lex_unrank(row, grid);
    for (const auto& c : coeffs) {
      const auto col = column_of(i, c.offset);
      if (col >= 0) out.block(row * r, col * r, r, r) = *c.block;
    }
  }
}

void diag_fill(const CoefficientFunction& a, const MultiIndex& n, CMatrix& out, Exec exec) {
  const int d = a.d();
  const Eigen::Index r = a.r();
  const MultiIndexInterval grid = MultiIndexInterval::ones_to(n);
  for_each_index(nu(n), exec, [&](std::int64_t row) {
    const MultiIndex i = lex_unrank(row, grid);
    std::vector<double> x(d);
    for (int l = 0; l < d; ++l) x[l] = static_cast<double>(i[l]) / static_cast<double>(n[l]);
    CMatrix block;
    try {
      block = a(x);
    } catch (const Error& e) {
      throw Error(e.kind(), "coefficient evaluation failed at grid node " + i.to_string() + ": " + e.what());
    }
    if (block.rows() != r || block.cols() != r)
      throw Error(ErrorKind::invalid_size, "coefficient value at node " + i.to_string() + " is not r x r");
    if (!block.allFinite())
      throw Error(ErrorKind::numerical, "non-finite coefficient value at grid node " + i.to_string());
    out.block(row * r, row * r, r, r) = block;
  });
}

SurfaceSamples surface_samples(const Symbol& s, const TensorGrid& grid, SpectralMode mode, Exec exec) {
  SurfaceSamples out;
  out.r = s.r();
  out.mode = mode;
  const auto nodes = static_cast<std::int64_t>(grid.size());
  out.values.resize(static_cast<std::size_t>(nodes) * s.r());
  const int d = s.d();
  for_each_index(nodes, exec, [&](std::int64_t idx) {
    std::vector<double> x(d), t(d);
    grid.node(static_cast<std::size_t>(idx), x, t);
    const CMatrix v = s.evaluate(x, t);
    const auto spec = point_spectrum(v, mode, s.hermitian());
    for (int j = 0; j < s.r(); ++j) {
      if (!std::isfinite(spec[j].real()) || !std::isfinite(spec[j].imag())) {
        std::string where;
        for (int l = 0; l < d; ++l) where += (l ? ", x" : "x") + std::to_string(l + 1) + "=" + format_number(x[l]);
        for (int l = 0; l < d; ++l) where += ", t" + std::to_string(l + 1) + "=" + format_number(t[l]);
        throw Error(ErrorKind::numerical, "non-finite symbol spectrum at node " + std::to_string(idx) +
                                              " (" + where + ")");
      }
      out.values[static_cast<std::size_t>(idx) * s.r() + j] = spec[j];
    }
  });
  return out;
}

double surface_mean(const SurfaceSamples& samples, const std::function<double(cplx)>& F, Exec exec) {
  const auto nodes = static_cast<std::int64_t>(samples.nodes());
  if (nodes == 0) throw Error(ErrorKind::quadrature, "empty surface sample set");
  const int r = samples.r;
  std::vector<double> terms(static_cast<std::size_t>(nodes));
  for_each_index(nodes, exec, [&](std::int64_t idx) {
    double acc = 0.0;
    for (int j = 0; j < r; ++j) acc += F(samples.values[static_cast<std::size_t>(idx) * r + j]);
    terms[static_cast<std::size_t>(idx)] = acc / r;
  });
  double sum = 0.0;
  for (double v : terms) sum += v;
  return sum / static_cast<double>(nodes);
}

std::vector<CMatrix> dft_coefficients(std::span<const CMatrix> samples, int samples_per_dim,
                                      const MultiIndex& degree, Exec exec) {
  const int d = static_cast<int>(degree.dim());
  const std::int64_t N = samples_per_dim;
  const MultiIndexInterval range(-degree, degree);
  const std::int64_t count = range.cardinality();
  const Eigen::Index r = samples.empty() ? 0 : samples.front().rows();

  // twiddle[l][(k + deg_l) * N + m] = exp(-i k theta_m), theta_m = -pi + 2 pi m / N,
  // with the phase reduced exactly modulo N before the trigonometric call.
  std::vector<std::vector<cplx>> twiddle(d);
  for (int l = 0; l < d; ++l) {
    const std::int64_t deg = degree[l];
    twiddle[l].resize(static_cast<std::size_t>((2 * deg + 1) * N));
    for (std::int64_t k = -deg; k <= deg; ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      for (std::int64_t m = 0; m < N; ++m) {
        const std::int64_t km = ((k * m) % N + N) % N;
        twiddle[l][static_cast<std::size_t>((k + deg) * N + m)] =
            sign * std::polar(1.0, -2.0 * kPi * static_cast<double>(km) / static_cast<double>(N));
      }
    }
  }

  std::vector<CMatrix> out(static_cast<std::size_t>(count));
  const auto total = static_cast<std::int64_t>(samples.size());
  for_each_index(count, exec, [&](std::int64_t kr) {
    const MultiIndex k = lex_unrank(kr, range);
    CMatrix acc = CMatrix::Zero(r, r);
    std::vector<std::int64_t> m(d);
    for (std::int64_t idx = 0; idx < total; ++idx) {
      std::int64_t rem = idx;
      for (int l = d; l-- > 0;) {
        m[l] = rem % N;
        rem /= N;
      }
      cplx w = 1.0;
      for (int l = 0; l < d; ++l)
        w *= twiddle[l][static_cast<std::size_t>((k[l] + degree[l]) * N + m[l])];
      acc += w * samples[static_cast<std::size_t>(idx)];
    }
    out[static_cast<std::size_t>(kr)] = acc / static_cast<double>(total);
  });
  return out;
}

}  // namespace gltlab::kernels
