#pragma once

#include <functional>
#include <span>
#include <vector>

#include "gltlab/exec.hpp"
#include "gltlab/symbols.hpp"

/// Data-parallel inner loops. Every kernel has a serial reference loop and an
/// OpenMP loop selected by Exec; the two agree bit for bit because each
/// output element is computed independently and any reduction is carried out
/// serially in a fixed order.
namespace gltlab::kernels {

/// Direct block fill of the multilevel block Toeplitz matrix. out must be a
/// zero matrix of order r * nu(n).
void toeplitz_fill(const TrigPolynomial& f, const MultiIndex& n, CMatrix& out, Exec exec);

/// Block diagonal with the i-th block a(i/n), i lexicographic over [1, n].
void diag_fill(const CoefficientFunction& a, const MultiIndex& n, CMatrix& out, Exec exec);

SurfaceSamples surface_samples(const Symbol& s, const TensorGrid& grid, SpectralMode mode, Exec exec);

/// Mean over grid nodes of (1/r) sum_i F(value_i).
double surface_mean(const SurfaceSamples& samples, const std::function<double(cplx)>& F, Exec exec);

/// Discrete Fourier coefficients (1/N^d) sum_j samples_j exp(-i (k, theta_j))
/// on theta_j = -pi + 2 pi j / N, for every k with |k_l| <= degree_l, k
/// enumerated lexicographically from -degree to degree.
std::vector<CMatrix> dft_coefficients(std::span<const CMatrix> samples, int samples_per_dim,
                                      const MultiIndex& degree, Exec exec);

}  // namespace gltlab::kernels
