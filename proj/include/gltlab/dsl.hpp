#pragma once

#include <string>
#include <string_view>

#include "gltlab/glt.hpp"

namespace gltlab::dsl {

struct ParseOptions {
  int d = 0;                ///< 0 infers d from the highest variable index
  int r = 0;                ///< 0 infers r from bracketed matrices, else 1
  int default_degree = 16;  ///< truncation degree for non-band-limited T arguments
};

/// Grammar:
///   expr    := term { ("+" | "-") term }        (a leading "-" is allowed)
///   term    := [ number "*" ] factor { "*" factor }
///   factor  := atom { "'" | "^-1" }
///   atom    := "T" "(" matfun [";" int {"," int}] ")" | "D" "(" matfun ")"
///            | "Z" [ "[" "spikes" "]" ] | "fun" "(" name "," expr ")"
///            | number | "(" expr ")"
///   matfun  := scalar | "[" row { ";" row } "]",  row := scalar { "," scalar }
///   scalar  := arithmetic over x1..xd, t1..td, numbers, i, pi,
///              cos, sin, exp, abs, + - * / ^
/// A bare number stands for the constant Toeplitz leaf. Errors are
/// ParseError with 1-based line and column.
GltExpr parse(std::string_view text, const ParseOptions& options = {});

/// Canonical text: Toeplitz arguments in exponential form, minimal
/// parentheses, shortest round-trip numbers. Throws configuration for
/// complex weights and diagonal leaves without an expression form.
std::string format(const GltExpr& e);

/// A single scalar expression, e.g. for coefficient functions in configs.
ScalarExprPtr parse_scalar(std::string_view text);

}  // namespace gltlab::dsl
