#pragma once

#include <stdexcept>
#include <string>

namespace gltlab {

enum class ErrorKind {
  invalid_size,
  out_of_range,
  domain,
  singular_evaluation,
  configuration,
  size_cap,
  numerical,
  quadrature,
  mode,
  calculus,
  syntax,
  semantic,
  io,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so that callers (the
/// CLI in particular) can map it onto an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse and scope errors from the expression language; position is 1-based.
class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, int line, int column, const std::string& message);

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& message() const noexcept { return message_; }

 private:
  int line_;
  int column_;
  std::string message_;
};

}  // namespace gltlab
