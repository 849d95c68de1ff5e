#pragma once

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gltlab/multiindex.hpp"

namespace gltlab {

using cplx = std::complex<double>;

/// Closed-form scalar expression over space variables x1..xd and frequency
/// variables t1..td. Nodes are immutable and shared.
struct ScalarExpr;
using ScalarExprPtr = std::shared_ptr<const ScalarExpr>;

enum class ScalarOp { number, space_var, freq_var, neg, add, sub, mul, div, pow, call };
enum class ScalarFunc { cos, sin, exp, abs };

struct ScalarExpr {
  ScalarOp op = ScalarOp::number;
  cplx value{};            // number
  int var = 0;             // 0-based variable index
  ScalarFunc func = ScalarFunc::cos;
  ScalarExprPtr lhs;       // unary operand / call argument / left operand
  ScalarExprPtr rhs;
};

namespace sx {
ScalarExprPtr number(cplx v);
ScalarExprPtr imag_unit();
ScalarExprPtr x(int j);  ///< 0-based
ScalarExprPtr t(int j);  ///< 0-based
ScalarExprPtr neg(ScalarExprPtr a);
ScalarExprPtr add(ScalarExprPtr a, ScalarExprPtr b);
ScalarExprPtr sub(ScalarExprPtr a, ScalarExprPtr b);
ScalarExprPtr mul(ScalarExprPtr a, ScalarExprPtr b);
ScalarExprPtr div(ScalarExprPtr a, ScalarExprPtr b);
ScalarExprPtr pow(ScalarExprPtr a, ScalarExprPtr b);
ScalarExprPtr call(ScalarFunc f, ScalarExprPtr a);
}  // namespace sx

const char* function_name(ScalarFunc f);

/// Evaluate at (x, t). Variables beyond the supplied spans raise a domain error.
cplx evaluate(const ScalarExpr& e, std::span<const double> x, std::span<const double> t);

bool structurally_equal(const ScalarExpr& a, const ScalarExpr& b);

/// Largest 1-based index of the given variable kind, 0 if unused.
int max_variable(const ScalarExpr& e, ScalarOp var_kind);

/// Canonical text with minimal parentheses; numbers in shortest round-trip form.
std::string format(const ScalarExpr& e);

/// Shortest decimal that reads back to the same double.
std::string format_number(double v);
/// Complex constant; real values print as numbers, i as "i", others as "(a + b*i)".
std::string format_complex(cplx v);

/// Finite Fourier series: offset k -> coefficient of exp(i (k, t)).
using FourierTerms = std::map<MultiIndex, cplx>;

/// Exact expansion into exponential form when the expression is a
/// trigonometric polynomial in t1..td (sums, products, integer powers,
/// division by constants, cos/sin/exp of integer-affine arguments).
/// Returns nullopt for anything else, including any use of x variables.
std::optional<FourierTerms> expand_trigonometric(const ScalarExpr& e, int d);

/// Canonical exponential-form text of a Fourier series, e.g.
/// "2 - exp(i*t1) - exp(-i*t1)". Order: constant, then by total degree,
/// then lexicographically descending offset.
std::string format_fourier(const FourierTerms& terms);

}  // namespace gltlab
