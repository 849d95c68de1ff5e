// Serial reference loops against their OpenMP counterparts. Arguments:
// the first is the size parameter, the second selects serial (0) or
// parallel (1).

#include <benchmark/benchmark.h>

#include "gltlab/acs.hpp"
#include "gltlab/kernels.hpp"
#include "gltlab/matgen.hpp"
#include "gltlab/spectra.hpp"

using namespace gltlab;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(1) ? Exec::parallel : Exec::serial; }

TrigPolynomial wide_band(int d, int r, int degree) {
  TrigPolynomial f(d, r);
  const MultiIndexInterval range(MultiIndex::filled(d, -degree), MultiIndex::filled(d, degree));
  for (std::int64_t i = 0; i < range.cardinality(); ++i) {
    const MultiIndex k = lex_unrank(i, range);
    CMatrix c = CMatrix::Identity(r, r);
    double w = 1.0;
    for (auto kj : k) w /= 1.0 + static_cast<double>(kj * kj);
    f.set(k, c * w);
  }
  return f;
}

void BM_ToeplitzFill(benchmark::State& state) {
  const auto f = wide_band(2, 2, 3);
  const MultiIndex n{state.range(0), state.range(0)};
  const auto order = 2 * nu(n);
  for (auto _ : state) {
    CMatrix out = CMatrix::Zero(order, order);
    kernels::toeplitz_fill(f, n, out, exec_of(state));
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_ToeplitzFill)->ArgsProduct({{16, 32}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_DiagFill(benchmark::State& state) {
  const CoefficientFunction a(2, 2, [](std::span<const double> x) {
    CMatrix m(2, 2);
    m << std::exp(x[0]), std::sin(x[1]), std::sin(x[1]), std::cos(x[0] * x[1]);
    return m;
  }, true);
  const MultiIndex n{state.range(0), state.range(0)};
  const auto order = 2 * nu(n);
  for (auto _ : state) {
    CMatrix out = CMatrix::Zero(order, order);
    kernels::diag_fill(a, n, out, exec_of(state));
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_DiagFill)->ArgsProduct({{16, 32}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_SurfaceSamples(benchmark::State& state) {
  const auto s = Symbol::trigonometric(wide_band(2, 2, 2));
  const auto grid = TensorGrid::midpoint(s, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto samples = kernels::surface_samples(s, grid, SpectralMode::eigen, exec_of(state));
    benchmark::DoNotOptimize(samples.values.data());
  }
}
BENCHMARK(BM_SurfaceSamples)->ArgsProduct({{64, 128}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_SymbolFunctional(benchmark::State& state) {
  const auto s = Symbol::trigonometric(wide_band(2, 1, 2));
  QuadratureOptions q;
  q.initial_points = static_cast<int>(state.range(0));
  q.max_refinements = 1;
  q.tolerance = 1.0;
  const auto F = TestFunction::monomial(2, 0.0, 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(symbol_functional(s, F, SpectralMode::eigen, q, exec_of(state)).value);
}
BENCHMARK(BM_SymbolFunctional)->ArgsProduct({{256, 512}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_DftCoefficients(benchmark::State& state) {
  const auto f = wide_band(2, 2, 4);
  const int N = static_cast<int>(state.range(0));
  std::vector<CMatrix> samples;
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      const double th[] = {-3.141592653589793 + 6.283185307179586 * a / N, -3.141592653589793 + 6.283185307179586 * b / N};
      samples.push_back(f.evaluate(th));
    }
  for (auto _ : state) {
    auto c = kernels::dft_coefficients(samples, N, MultiIndex{8, 8}, exec_of(state));
    benchmark::DoNotOptimize(c.data());
  }
}
BENCHMARK(BM_DftCoefficients)->ArgsProduct({{32, 64}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_SacsTrials(benchmark::State& state) {
  const auto model = truncation_model(wide_band(1, 1, 16), {}, 7);
  const std::vector<MultiIndex> sizes{MultiIndex{state.range(0)}, MultiIndex{2 * state.range(0)}};
  for (auto _ : state) {
    auto cert = sacs_check(model, {1, 2, 4}, sizes, 100, {}, exec_of(state));
    benchmark::DoNotOptimize(cert.s.data());
  }
}
BENCHMARK(BM_SacsTrials)->ArgsProduct({{8, 16}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
