#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "gltlab/symbols.hpp"

namespace gltlab::testing {

constexpr double kPi = std::numbers::pi;

inline TrigPolynomial laplacian() {
  TrigPolynomial f(1, 1);
  f.set(MultiIndex{0}, CMatrix::Constant(1, 1, 2.0));
  f.set(MultiIndex{1}, CMatrix::Constant(1, 1, -1.0));
  f.set(MultiIndex{-1}, CMatrix::Constant(1, 1, -1.0));
  return f;
}

inline TrigPolynomial laplacian_2d() {
  TrigPolynomial f(2, 1);
  f.set(MultiIndex{0, 0}, CMatrix::Constant(1, 1, 4.0));
  for (auto k : {MultiIndex{1, 0}, MultiIndex{-1, 0}, MultiIndex{0, 1}, MultiIndex{0, -1}})
    f.set(k, CMatrix::Constant(1, 1, -1.0));
  return f;
}

inline CMatrix random_block(int r, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CMatrix b(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) b(i, j) = cplx(u(rng), u(rng));
  return b;
}

/// Random polynomial with offsets in [-deg, deg]^d, about half of them present.
inline TrigPolynomial random_trig(int d, int r, int deg, std::mt19937_64& rng, bool hermitian) {
  TrigPolynomial f(d, r);
  std::bernoulli_distribution keep(0.5);
  const MultiIndexInterval range(MultiIndex::filled(d, -deg), MultiIndex::filled(d, deg));
  for (std::int64_t i = 0; i < range.cardinality(); ++i) {
    const MultiIndex k = lex_unrank(i, range);
    if (hermitian && k < -k) continue;
    if (!keep(rng) && !(k == -k)) continue;
    CMatrix c = random_block(r, rng);
    if (hermitian) {
      if (k == -k) {
        c = (c + c.adjoint()).eval() / 2.0;
        f.set(k, c);
      } else {
        f.set(k, c);
        f.set(-k, c.adjoint());
      }
    } else {
      f.set(k, c);
    }
  }
  return f;
}

inline CMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

/// Householder reflection I - 2 v v^* / (v^* v): unitary and Hermitian.
inline CMatrix random_reflection(Eigen::Index n, std::mt19937_64& rng) {
  const CMatrix v = random_matrix(n, 1, rng);
  return CMatrix::Identity(n, n) - 2.0 * v * v.adjoint() / v.squaredNorm();
}

}  // namespace gltlab::testing
