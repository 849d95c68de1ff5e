#include "gltlab/scalar_expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "gltlab/error.hpp"

namespace gltlab {

namespace sx {
namespace {
ScalarExprPtr make(ScalarExpr e) { return std::make_shared<const ScalarExpr>(std::move(e)); }
ScalarExprPtr binary(ScalarOp op, ScalarExprPtr a, ScalarExprPtr b) {
  ScalarExpr e;
  e.op = op;
  e.lhs = std::move(a);
  e.rhs = std::move(b);
  return make(std::move(e));
}
}  // namespace

ScalarExprPtr number(cplx v) {
  ScalarExpr e;
  e.value = v;
  return make(e);
}
ScalarExprPtr imag_unit() { return number({0.0, 1.0}); }
ScalarExprPtr x(int j) {
  ScalarExpr e;
  e.op = ScalarOp::space_var;
  e.var = j;
  return make(e);
}
ScalarExprPtr t(int j) {
  ScalarExpr e;
  e.op = ScalarOp::freq_var;
  e.var = j;
  return make(e);
}
ScalarExprPtr neg(ScalarExprPtr a) {
  ScalarExpr e;
  e.op = ScalarOp::neg;
  e.lhs = std::move(a);
  return make(std::move(e));
}
ScalarExprPtr add(ScalarExprPtr a, ScalarExprPtr b) { return binary(ScalarOp::add, std::move(a), std::move(b)); }
ScalarExprPtr sub(ScalarExprPtr a, ScalarExprPtr b) { return binary(ScalarOp::sub, std::move(a), std::move(b)); }
ScalarExprPtr mul(ScalarExprPtr a, ScalarExprPtr b) { return binary(ScalarOp::mul, std::move(a), std::move(b)); }
ScalarExprPtr div(ScalarExprPtr a, ScalarExprPtr b) { return binary(ScalarOp::div, std::move(a), std::move(b)); }
ScalarExprPtr pow(ScalarExprPtr a, ScalarExprPtr b) { return binary(ScalarOp::pow, std::move(a), std::move(b)); }
ScalarExprPtr call(ScalarFunc f, ScalarExprPtr a) {
  ScalarExpr e;
  e.op = ScalarOp::call;
  e.func = f;
  e.lhs = std::move(a);
  return make(std::move(e));
}
}  // namespace sx

const char* function_name(ScalarFunc f) {
  switch (f) {
    case ScalarFunc::cos: return "cos";
    case ScalarFunc::sin: return "sin";
    case ScalarFunc::exp: return "exp";
    case ScalarFunc::abs: return "abs";
  }
  return "?";
}

namespace {

bool is_small_integer(cplx v, int limit) {
  return v.imag() == 0.0 && std::abs(v.real()) <= limit && std::floor(v.real()) == v.real();
}

cplx integer_power(cplx base, long n) {
  if (n < 0) return 1.0 / integer_power(base, -n);
  cplx result = 1.0;
  while (n) {
    if (n & 1) result *= base;
    base *= base;
    n >>= 1;
  }
  return result;
}

}  // namespace

cplx evaluate(const ScalarExpr& e, std::span<const double> x, std::span<const double> t) {
  switch (e.op) {
    case ScalarOp::number: return e.value;
    case ScalarOp::space_var:
      if (e.var >= static_cast<int>(x.size()))
        throw Error(ErrorKind::domain, "x" + std::to_string(e.var + 1) + " not bound");
      return x[e.var];
    case ScalarOp::freq_var:
      if (e.var >= static_cast<int>(t.size()))
        throw Error(ErrorKind::domain, "t" + std::to_string(e.var + 1) + " not bound");
      return t[e.var];
    case ScalarOp::neg: return -evaluate(*e.lhs, x, t);
    case ScalarOp::add: return evaluate(*e.lhs, x, t) + evaluate(*e.rhs, x, t);
    case ScalarOp::sub: return evaluate(*e.lhs, x, t) - evaluate(*e.rhs, x, t);
    case ScalarOp::mul: return evaluate(*e.lhs, x, t) * evaluate(*e.rhs, x, t);
    case ScalarOp::div: {
      const cplx den = evaluate(*e.rhs, x, t);
      if (den == 0.0) throw Error(ErrorKind::singular_evaluation, "division by zero");
      return evaluate(*e.lhs, x, t) / den;
    }
    case ScalarOp::pow: {
      const cplx base = evaluate(*e.lhs, x, t);
      const cplx ex = evaluate(*e.rhs, x, t);
      if (is_small_integer(ex, 1 << 20)) {
        if (base == 0.0 && ex.real() < 0)
          throw Error(ErrorKind::singular_evaluation, "zero raised to a negative power");
        return integer_power(base, static_cast<long>(ex.real()));
      }
      if (base.imag() == 0.0 && ex.imag() == 0.0 && base.real() >= 0.0)
        return std::pow(base.real(), ex.real());
      return std::pow(base, ex);
    }
    case ScalarOp::call: {
      const cplx a = evaluate(*e.lhs, x, t);
      switch (e.func) {
        case ScalarFunc::cos: return a.imag() == 0.0 ? cplx(std::cos(a.real())) : std::cos(a);
        case ScalarFunc::sin: return a.imag() == 0.0 ? cplx(std::sin(a.real())) : std::sin(a);
        case ScalarFunc::exp: return a.imag() == 0.0 ? cplx(std::exp(a.real())) : std::exp(a);
        case ScalarFunc::abs: return std::abs(a);
      }
    }
  }
  return {};
}

bool structurally_equal(const ScalarExpr& a, const ScalarExpr& b) {
  if (a.op != b.op) return false;
  switch (a.op) {
    case ScalarOp::number: return a.value == b.value;
    case ScalarOp::space_var:
    case ScalarOp::freq_var: return a.var == b.var;
    case ScalarOp::neg: return structurally_equal(*a.lhs, *b.lhs);
    case ScalarOp::call: return a.func == b.func && structurally_equal(*a.lhs, *b.lhs);
    default: return structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
  }
}

int max_variable(const ScalarExpr& e, ScalarOp var_kind) {
  int m = e.op == var_kind ? e.var + 1 : 0;
  if (e.lhs) m = std::max(m, max_variable(*e.lhs, var_kind));
  if (e.rhs) m = std::max(m, max_variable(*e.rhs, var_kind));
  return m;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_complex(cplx v) {
  if (v.imag() == 0.0) return format_number(v.real());
  if (v == cplx(0.0, 1.0)) return "i";
  const double im = v.imag();
  std::string im_text = std::abs(im) == 1.0 ? "i" : format_number(std::abs(im)) + "*i";
  if (v.real() == 0.0) return im < 0 ? "-" + im_text : im_text;
  return "(" + format_number(v.real()) + (im < 0 ? " - " : " + ") + im_text + ")";
}

namespace {

// Precedence levels used by the formatter; higher binds tighter.
int precedence(const ScalarExpr& e) {
  switch (e.op) {
    case ScalarOp::add:
    case ScalarOp::sub: return 1;
    case ScalarOp::mul:
    case ScalarOp::div: return 2;
    case ScalarOp::neg: return 3;
    case ScalarOp::pow: return 4;
    case ScalarOp::number:
      // Negative or composite constants print with a sign or parentheses.
      if (e.value.imag() == 0.0 && e.value.real() >= 0.0 && !std::signbit(e.value.real())) return 5;
      if (e.value == cplx(0.0, 1.0)) return 5;
      return e.value.real() == 0.0 && e.value.imag() != 0.0 ? 2 : 5;
    default: return 5;
  }
}

std::string wrap(const ScalarExpr& e, bool parens) {
  return parens ? "(" + format(e) + ")" : format(e);
}

}  // namespace

std::string format(const ScalarExpr& e) {
  switch (e.op) {
    case ScalarOp::number:
      if (e.value.imag() == 0.0 && (e.value.real() < 0 || std::signbit(e.value.real())))
        return "(" + format_number(e.value.real()) + ")";
      return format_complex(e.value);
    case ScalarOp::space_var: return "x" + std::to_string(e.var + 1);
    case ScalarOp::freq_var: return "t" + std::to_string(e.var + 1);
    case ScalarOp::neg: return "-" + wrap(*e.lhs, precedence(*e.lhs) < 3);
    case ScalarOp::call: return std::string(function_name(e.func)) + "(" + format(*e.lhs) + ")";
    case ScalarOp::pow:
      return wrap(*e.lhs, precedence(*e.lhs) <= 4) + "^" + wrap(*e.rhs, precedence(*e.rhs) < 3);
    default: {
      const int p = precedence(e);
      const char* sym = e.op == ScalarOp::add   ? " + "
                        : e.op == ScalarOp::sub ? " - "
                        : e.op == ScalarOp::mul ? "*"
                                                : "/";
      return wrap(*e.lhs, precedence(*e.lhs) < p) + sym + wrap(*e.rhs, precedence(*e.rhs) <= p);
    }
  }
}

namespace {

struct Affine {
  cplx constant;
  std::vector<cplx> slope;
  bool is_constant() const {
    return std::all_of(slope.begin(), slope.end(), [](cplx c) { return c == 0.0; });
  }
};

std::optional<Affine> affine(const ScalarExpr& e, int d) {
  switch (e.op) {
    case ScalarOp::number: return Affine{e.value, std::vector<cplx>(d)};
    case ScalarOp::freq_var: {
      if (e.var >= d) return std::nullopt;
      Affine a{0.0, std::vector<cplx>(d)};
      a.slope[e.var] = 1.0;
      return a;
    }
    case ScalarOp::neg: {
      auto a = affine(*e.lhs, d);
      if (!a) return a;
      a->constant = -a->constant;
      for (auto& s : a->slope) s = -s;
      return a;
    }
    case ScalarOp::add:
    case ScalarOp::sub: {
      auto a = affine(*e.lhs, d);
      auto b = affine(*e.rhs, d);
      if (!a || !b) return std::nullopt;
      const double sign = e.op == ScalarOp::add ? 1.0 : -1.0;
      a->constant += sign * b->constant;
      for (int j = 0; j < d; ++j) a->slope[j] += sign * b->slope[j];
      return a;
    }
    case ScalarOp::mul: {
      auto a = affine(*e.lhs, d);
      auto b = affine(*e.rhs, d);
      if (!a || !b) return std::nullopt;
      if (!a->is_constant() && !b->is_constant()) return std::nullopt;
      if (!a->is_constant()) std::swap(a, b);
      const cplx c = a->constant;
      b->constant *= c;
      for (auto& s : b->slope) s *= c;
      return b;
    }
    case ScalarOp::div: {
      auto a = affine(*e.lhs, d);
      auto b = affine(*e.rhs, d);
      if (!a || !b || !b->is_constant() || b->constant == 0.0) return std::nullopt;
      a->constant /= b->constant;
      for (auto& s : a->slope) s /= b->constant;
      return a;
    }
    default: return std::nullopt;
  }
}

std::optional<MultiIndex> integer_offset(const std::vector<cplx>& slope, bool imaginary) {
  std::vector<std::int64_t> k(slope.size());
  for (std::size_t j = 0; j < slope.size(); ++j) {
    const double part = imaginary ? slope[j].imag() : slope[j].real();
    const double other = imaginary ? slope[j].real() : slope[j].imag();
    if (other != 0.0 || std::floor(part) != part || std::abs(part) > 1e6) return std::nullopt;
    k[j] = static_cast<std::int64_t>(part);
  }
  return MultiIndex(std::move(k));
}

void accumulate(FourierTerms& into, const MultiIndex& k, cplx c) {
  auto [it, inserted] = into.emplace(k, c);
  if (!inserted) it->second += c;
}

void prune(FourierTerms& terms) {
  std::erase_if(terms, [](const auto& kv) { return kv.second == 0.0; });
}

FourierTerms multiply(const FourierTerms& a, const FourierTerms& b) {
  FourierTerms out;
  for (const auto& [ka, ca] : a)
    for (const auto& [kb, cb] : b) accumulate(out, ka + kb, ca * cb);
  prune(out);
  return out;
}

constexpr std::size_t kMaxTerms = 1 << 16;

std::optional<FourierTerms> expand(const ScalarExpr& e, int d) {
  const MultiIndex zero = MultiIndex::filled(d, 0);
  switch (e.op) {
    case ScalarOp::number: {
      FourierTerms t;
      if (e.value != 0.0) t[zero] = e.value;
      return t;
    }
    case ScalarOp::space_var:
    case ScalarOp::freq_var: return std::nullopt;
    case ScalarOp::neg: {
      auto a = expand(*e.lhs, d);
      if (a)
        for (auto& [k, c] : *a) c = -c;
      return a;
    }
    case ScalarOp::add:
    case ScalarOp::sub: {
      auto a = expand(*e.lhs, d);
      auto b = expand(*e.rhs, d);
      if (!a || !b) return std::nullopt;
      for (const auto& [k, c] : *b) accumulate(*a, k, e.op == ScalarOp::add ? c : -c);
      prune(*a);
      return a;
    }
    case ScalarOp::mul: {
      auto a = expand(*e.lhs, d);
      auto b = expand(*e.rhs, d);
      if (!a || !b || a->size() * b->size() > kMaxTerms) return std::nullopt;
      return multiply(*a, *b);
    }
    case ScalarOp::div: {
      auto a = expand(*e.lhs, d);
      auto b = expand(*e.rhs, d);
      if (!a || !b || b->size() != 1 || b->begin()->first != zero) return std::nullopt;
      const cplx den = b->begin()->second;
      for (auto& [k, c] : *a) c /= den;
      return a;
    }
    case ScalarOp::pow: {
      auto ex = expand(*e.rhs, d);
      if (!ex) return std::nullopt;
      cplx exponent = 0.0;
      if (!ex->empty()) {
        if (ex->size() != 1 || ex->begin()->first != zero) return std::nullopt;
        exponent = ex->begin()->second;
      }
      if (!is_small_integer(exponent, 64) || exponent.real() < 0) return std::nullopt;
      auto base = expand(*e.lhs, d);
      if (!base) return std::nullopt;
      FourierTerms result{{zero, 1.0}};
      for (int p = 0; p < static_cast<int>(exponent.real()); ++p) {
        if (result.size() * base->size() > kMaxTerms) return std::nullopt;
        result = multiply(result, *base);
      }
      return result;
    }
    case ScalarOp::call: {
      if (e.func == ScalarFunc::abs) {
        auto a = expand(*e.lhs, d);
        if (a && (a->empty() || (a->size() == 1 && a->begin()->first == zero))) {
          FourierTerms t;
          if (!a->empty()) t[zero] = std::abs(a->begin()->second);
          return t;
        }
        return std::nullopt;
      }
      auto arg = affine(*e.lhs, d);
      if (!arg) return std::nullopt;
      FourierTerms t;
      if (e.func == ScalarFunc::exp) {
        auto k = integer_offset(arg->slope, true);
        if (!k) return std::nullopt;
        t[*k] = std::exp(arg->constant);
      } else {
        auto k = integer_offset(arg->slope, false);
        if (!k) return std::nullopt;
        const cplx i(0.0, 1.0);
        const cplx plus = std::exp(i * arg->constant);
        const cplx minus = std::exp(-i * arg->constant);
        // cos(a) = (e^{ia} + e^{-ia})/2, sin(a) = (e^{ia} - e^{-ia})/(2i)
        const cplx scale = e.func == ScalarFunc::cos ? cplx(0.5) : cplx(0.0, -0.5);
        const cplx sign = e.func == ScalarFunc::cos ? 1.0 : -1.0;
        accumulate(t, *k, scale * plus);
        accumulate(t, -*k, scale * sign * minus);
      }
      prune(t);
      return t;
    }
  }
  return std::nullopt;
}

std::string linear_form(const MultiIndex& k) {
  std::string out;
  int nonzero = 0;
  for (std::size_t j = 0; j < k.dim(); ++j) {
    if (k[j] == 0) continue;
    const auto mag = k[j] < 0 ? -k[j] : k[j];
    const std::string var = "t" + std::to_string(j + 1);
    const std::string term = mag == 1 ? var : std::to_string(mag) + "*" + var;
    if (nonzero == 0)
      out += (k[j] < 0 ? "-" : "") + term;
    else
      out += (k[j] < 0 ? " - " : " + ") + term;
    ++nonzero;
  }
  return out;
}

std::string exponential(const MultiIndex& k) {
  int nonzero = 0;
  std::size_t only = 0;
  for (std::size_t j = 0; j < k.dim(); ++j)
    if (k[j] != 0) {
      ++nonzero;
      only = j;
    }
  if (nonzero == 1) {
    const auto v = k[only];
    const auto mag = v < 0 ? -v : v;
    const std::string coef = mag == 1 ? "i" : std::to_string(mag) + "*i";
    return std::string("exp(") + (v < 0 ? "-" : "") + coef + "*t" + std::to_string(only + 1) + ")";
  }
  return "exp(i*(" + linear_form(k) + "))";
}

}  // namespace

std::optional<FourierTerms> expand_trigonometric(const ScalarExpr& e, int d) {
  if (d < 1) return std::nullopt;
  return expand(e, d);
}

std::string format_fourier(const FourierTerms& terms) {
  std::vector<std::pair<MultiIndex, cplx>> ordered(terms.begin(), terms.end());
  std::erase_if(ordered, [](const auto& kv) { return kv.second == 0.0; });
  if (ordered.empty()) return "0";
  auto degree = [](const MultiIndex& k) {
    std::int64_t s = 0;
    for (auto v : k) s += v < 0 ? -v : v;
    return s;
  };
  std::sort(ordered.begin(), ordered.end(), [&](const auto& a, const auto& b) {
    const auto da = degree(a.first), db = degree(b.first);
    if (da != db) return da < db;
    return a.first > b.first;
  });
  std::string out;
  bool first = true;
  for (const auto& [k, c] : ordered) {
    const bool constant_term = degree(k) == 0;
    const bool negative_real = c.imag() == 0.0 && c.real() < 0.0;
    const cplx shown = negative_real && !first ? -c : c;
    std::string coef;
    if (constant_term) {
      coef = negative_real && first ? "-" + format_number(-c.real()) : format_complex(shown);
    } else if (shown == 1.0) {
      coef = "";
    } else if (shown == -1.0) {
      coef = "-";
    } else {
      std::string v = shown.imag() == 0.0 && shown.real() < 0
                          ? "-" + format_number(-shown.real())
                          : format_complex(shown);
      coef = v + "*";
    }
    std::string term = constant_term ? coef : coef + exponential(k);
    if (first)
      out = term;
    else
      out += (negative_real ? " - " : " + ") + term;
    first = false;
  }
  return out;
}

}  // namespace gltlab
