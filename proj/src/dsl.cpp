#include "gltlab/dsl.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <set>

#include "gltlab/error.hpp"

namespace gltlab::dsl {

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, lbracket, rbracket, comma, semicolon, quote, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  double value = 0.0;
  int line = 1;
  int col = 1;
};

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < s.size()) {
    const char c = s[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (is_digit(c) || (c == '.' && i + 1 < s.size() && is_digit(s[i + 1]))) {
      std::size_t j = i;
      while (j < s.size() && is_digit(s[j])) ++j;
      if (j < s.size() && s[j] == '.') {
        ++j;
        while (j < s.size() && is_digit(s[j])) ++j;
      }
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k >= s.size() || !is_digit(s[k])) throw ParseError(ErrorKind::syntax, line, col + static_cast<int>(k - i), "malformed exponent in number");
        while (k < s.size() && is_digit(s[k])) ++k;
        j = k;
      }
      t.kind = Tok::number;
      t.text = std::string(s.substr(i, j - i));
      auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
      if (res.ec != std::errc() || !std::isfinite(t.value))
        throw ParseError(ErrorKind::syntax, line, col, "number '" + t.text + "' is out of range");
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (is_alpha(c)) {
      std::size_t j = i;
      while (j < s.size() && (is_alpha(s[j]) || is_digit(s[j]))) ++j;
      t.kind = Tok::ident;
      t.text = std::string(s.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    switch (c) {
      case '+': t.kind = Tok::plus; break;
      case '-': t.kind = Tok::minus; break;
      case '*': t.kind = Tok::star; break;
      case '/': t.kind = Tok::slash; break;
      case '^': t.kind = Tok::caret; break;
      case '(': t.kind = Tok::lparen; break;
      case ')': t.kind = Tok::rparen; break;
      case '[': t.kind = Tok::lbracket; break;
      case ']': t.kind = Tok::rbracket; break;
      case ',': t.kind = Tok::comma; break;
      case ';': t.kind = Tok::semicolon; break;
      case '\'': t.kind = Tok::quote; break;
      default: {
        std::string shown;
        const auto u = static_cast<unsigned char>(c);
        if (u >= 0x20 && u < 0x7f) {
          shown = std::string("'") + c + "'";
        } else {
          static const char* hex = "0123456789abcdef";
          shown = std::string("byte 0x") + hex[u >> 4] + hex[u & 15];
        }
        throw ParseError(ErrorKind::syntax, line, col, "unexpected character " + shown);
      }
    }
    t.text = std::string(1, c);
    advance(1);
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

// ---------------------------------------------------------------------------
// Syntax tree

enum class Scope { frequency, space, any };

struct PNode {
  enum class Kind { toeplitz, diag, zero, number, adjoint, pinv, lincomb, product, apply } kind;
  int line = 1, col = 1;
  ExprMatrix matrix;
  std::vector<std::int64_t> degree;
  bool spikes = false;
  double number = 0.0;
  double alpha = 1.0, beta = 0.0;
  std::unique_ptr<PNode> a, b;
  NamedFunction fn;
};

using PNodePtr = std::unique_ptr<PNode>;

constexpr int kMaxDepth = 200;

class Parser {
 public:
  Parser(std::vector<Token> tokens, const ParseOptions& options) : toks_(std::move(tokens)), opt_(options) {}

  PNodePtr parse_all() {
    auto e = parse_expr();
    expect(Tok::end, "end of input");
    return e;
  }

  ScalarExprPtr parse_scalar_all() {
    auto e = scalar_sum(Scope::any);
    expect(Tok::end, "end of input");
    return e;
  }

  int max_x = 0, max_t = 0;
  int bracket_r = 0;

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  ParseOptions opt_;
  int depth_ = 0;

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > kMaxDepth) throw ParseError(ErrorKind::syntax, p.peek().line, p.peek().col, "expression nested too deeply");
    }
    ~DepthGuard() { --p.depth_; }
  };

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(Tok t) const { return peek().kind == t; }
  const Token& take() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  [[noreturn]] void fail(const Token& t, const std::string& wanted) const {
    std::string got = t.kind == Tok::end ? "end of input" : "'" + t.text + "'";
    throw ParseError(ErrorKind::syntax, t.line, t.col, "expected " + wanted + ", found " + got);
  }
  const Token& expect(Tok kind, const std::string& wanted) {
    if (!at(kind)) fail(peek(), wanted);
    return take();
  }

  // --- expression level ---------------------------------------------------

  struct Term {
    double coef = 1.0;
    bool explicit_coef = false;
    PNodePtr node;
    int line = 1, col = 1;
  };

  PNodePtr parse_expr() {
    DepthGuard guard(*this);
    std::vector<Term> terms;
    bool negative = false;
    const Token start = peek();
    if (at(Tok::minus)) {
      take();
      negative = true;
    }
    terms.push_back(parse_term());
    if (negative) {
      terms.back().coef = -terms.back().coef;
      terms.back().explicit_coef = true;
    }
    while (at(Tok::plus) || at(Tok::minus)) {
      const bool minus = take().kind == Tok::minus;
      terms.push_back(parse_term());
      if (minus) terms.back().coef = -terms.back().coef;
    }
    if (terms.size() == 1) {
      if (!terms[0].explicit_coef) return std::move(terms[0].node);
      auto n = std::make_unique<PNode>();
      n->kind = PNode::Kind::lincomb;
      n->line = start.line;
      n->col = start.col;
      n->alpha = terms[0].coef;
      n->beta = 0.0;
      n->a = std::move(terms[0].node);
      return n;
    }
    auto acc = std::make_unique<PNode>();
    acc->kind = PNode::Kind::lincomb;
    acc->line = start.line;
    acc->col = start.col;
    acc->alpha = terms[0].coef;
    acc->a = std::move(terms[0].node);
    acc->beta = terms[1].coef;
    acc->b = std::move(terms[1].node);
    for (std::size_t k = 2; k < terms.size(); ++k) {
      auto next = std::make_unique<PNode>();
      next->kind = PNode::Kind::lincomb;
      next->line = start.line;
      next->col = start.col;
      next->alpha = 1.0;
      next->a = std::move(acc);
      next->beta = terms[k].coef;
      next->b = std::move(terms[k].node);
      acc = std::move(next);
    }
    return acc;
  }

  Term parse_term() {
    Term t;
    t.line = peek().line;
    t.col = peek().col;
    if (at(Tok::number) && peek(1).kind == Tok::star) {
      t.coef = take().value;
      t.explicit_coef = true;
      take();
    }
    PNodePtr acc = parse_factor();
    while (at(Tok::star)) {
      const Token& op = take();
      auto n = std::make_unique<PNode>();
      n->kind = PNode::Kind::product;
      n->line = op.line;
      n->col = op.col;
      n->a = std::move(acc);
      n->b = parse_factor();
      acc = std::move(n);
    }
    t.node = std::move(acc);
    return t;
  }

  PNodePtr parse_factor() {
    PNodePtr acc = parse_atom();
    for (;;) {
      if (at(Tok::quote)) {
        const Token& q = take();
        auto n = std::make_unique<PNode>();
        n->kind = PNode::Kind::adjoint;
        n->line = q.line;
        n->col = q.col;
        n->a = std::move(acc);
        acc = std::move(n);
      } else if (at(Tok::caret)) {
        const Token& c = take();
        if (!at(Tok::minus)) fail(peek(), "'-1' after '^'");
        take();
        if (!at(Tok::number) || peek().text != "1") fail(peek(), "'1' after '^-'");
        take();
        auto n = std::make_unique<PNode>();
        n->kind = PNode::Kind::pinv;
        n->line = c.line;
        n->col = c.col;
        n->a = std::move(acc);
        acc = std::move(n);
      } else {
        return acc;
      }
    }
  }

  PNodePtr parse_atom() {
    DepthGuard guard(*this);
    const Token t = peek();
    auto n = std::make_unique<PNode>();
    n->line = t.line;
    n->col = t.col;
    if (t.kind == Tok::number) {
      take();
      n->kind = PNode::Kind::number;
      n->number = t.value;
      return n;
    }
    if (t.kind == Tok::lparen) {
      take();
      auto e = parse_expr();
      expect(Tok::rparen, "')'");
      return e;
    }
    if (t.kind != Tok::ident) fail(t, "an expression");
    if (t.text == "T" || t.text == "D") {
      take();
      const bool toeplitz = t.text == "T";
      n->kind = toeplitz ? PNode::Kind::toeplitz : PNode::Kind::diag;
      expect(Tok::lparen, "'(' after " + t.text);
      n->matrix = parse_matfun(toeplitz ? Scope::frequency : Scope::space);
      if (toeplitz && at(Tok::semicolon)) {
        take();
        for (;;) {
          const Token& num = expect(Tok::number, "a truncation degree");
          if (num.value != std::floor(num.value) || num.value < 0 || num.value > 4096)
            throw ParseError(ErrorKind::semantic, num.line, num.col, "truncation degree must be an integer in [0, 4096]");
          n->degree.push_back(static_cast<std::int64_t>(num.value));
          if (!at(Tok::comma)) break;
          take();
        }
      }
      expect(Tok::rparen, "')'");
      return n;
    }
    if (t.text == "Z") {
      take();
      n->kind = PNode::Kind::zero;
      if (at(Tok::lbracket)) {
        take();
        const Token& w = expect(Tok::ident, "'spikes'");
        if (w.text != "spikes") throw ParseError(ErrorKind::semantic, w.line, w.col, "unknown zero-sequence model '" + w.text + "'");
        expect(Tok::rbracket, "']'");
        n->spikes = true;
      }
      return n;
    }
    if (t.text == "fun") {
      take();
      n->kind = PNode::Kind::apply;
      expect(Tok::lparen, "'(' after fun");
      const Token name = expect(Tok::ident, "a function name");
      if (name.text == "poly") {
        expect(Tok::lbracket, "'[' after poly");
        n->fn.kind = NamedFunction::Kind::poly;
        for (;;) {
          double sign = 1.0;
          if (at(Tok::minus)) {
            take();
            sign = -1.0;
          }
          n->fn.coefficients.push_back(sign * expect(Tok::number, "a polynomial coefficient").value);
          if (!at(Tok::comma)) break;
          take();
        }
        expect(Tok::rbracket, "']'");
      } else {
        try {
          n->fn = NamedFunction::parse(name.text);
        } catch (const Error& e) {
          throw ParseError(ErrorKind::semantic, name.line, name.col, e.what());
        }
      }
      expect(Tok::comma, "','");
      n->a = parse_expr();
      expect(Tok::rparen, "')'");
      return n;
    }
    throw ParseError(ErrorKind::syntax, t.line, t.col, "unknown name '" + t.text + "' (expected T, D, Z or fun)");
  }

  ExprMatrix parse_matfun(Scope scope) {
    if (!at(Tok::lbracket)) return ExprMatrix::scalar(scalar_sum(scope));
    const Token open = take();
    std::vector<std::vector<ScalarExprPtr>> rows(1);
    for (;;) {
      rows.back().push_back(scalar_sum(scope));
      if (at(Tok::comma)) {
        take();
      } else if (at(Tok::semicolon)) {
        take();
        rows.emplace_back();
      } else {
        break;
      }
    }
    expect(Tok::rbracket, "']'");
    const auto r = rows.size();
    for (const auto& row : rows)
      if (row.size() != r)
        throw ParseError(ErrorKind::semantic, open.line, open.col,
                         "matrix must be square: " + std::to_string(r) + " rows but a row has " + std::to_string(row.size()) + " entries");
    const int ri = static_cast<int>(r);
    if (opt_.r > 0 && ri != opt_.r)
      throw ParseError(ErrorKind::semantic, open.line, open.col, "matrix is " + std::to_string(r) + "x" + std::to_string(r) + " but r = " + std::to_string(opt_.r));
    if (bracket_r == 0) {
      bracket_r = ri;
    } else if (bracket_r != ri) {
      throw ParseError(ErrorKind::semantic, open.line, open.col, "matrix is " + std::to_string(r) + "x" + std::to_string(r) +
                                                                      " but an earlier one is " + std::to_string(bracket_r) + "x" + std::to_string(bracket_r));
    }
    ExprMatrix m;
    m.rows = ri;
    m.bracketed = true;
    for (auto& row : rows)
      for (auto& e : row) m.entries.push_back(std::move(e));
    return m;
  }

  // --- scalar level -------------------------------------------------------

  ScalarExprPtr scalar_sum(Scope scope) {
    DepthGuard guard(*this);
    auto acc = scalar_prod(scope);
    while (at(Tok::plus) || at(Tok::minus)) {
      const bool minus = take().kind == Tok::minus;
      auto rhs = scalar_prod(scope);
      acc = minus ? sx::sub(acc, rhs) : sx::add(acc, rhs);
    }
    return acc;
  }

  ScalarExprPtr scalar_prod(Scope scope) {
    auto acc = scalar_unary(scope);
    while (at(Tok::star) || at(Tok::slash)) {
      const bool div = take().kind == Tok::slash;
      auto rhs = scalar_unary(scope);
      acc = div ? sx::div(acc, rhs) : sx::mul(acc, rhs);
    }
    return acc;
  }

  ScalarExprPtr scalar_unary(Scope scope) {
    DepthGuard guard(*this);
    if (at(Tok::minus)) {
      take();
      auto operand = scalar_unary(scope);
      if (operand->op == ScalarOp::number && operand->value.imag() == 0.0 && !std::signbit(operand->value.real()) &&
          !(operand->value == cplx(0.0, 1.0)))
        return sx::number(-operand->value.real());
      return sx::neg(operand);
    }
    return scalar_power(scope);
  }

  ScalarExprPtr scalar_power(Scope scope) {
    auto base = scalar_primary(scope);
    if (at(Tok::caret)) {
      take();
      return sx::pow(base, scalar_unary(scope));
    }
    return base;
  }

  ScalarExprPtr scalar_primary(Scope scope) {
    const Token t = peek();
    if (t.kind == Tok::number) {
      take();
      return sx::number(t.value);
    }
    if (t.kind == Tok::lparen) {
      take();
      auto e = scalar_sum(scope);
      expect(Tok::rparen, "')'");
      return e;
    }
    if (t.kind != Tok::ident) fail(t, "a scalar expression");
    take();
    if (t.text == "i") return sx::imag_unit();
    if (t.text == "pi") return sx::number(std::numbers::pi);
    if (t.text == "cos" || t.text == "sin" || t.text == "exp" || t.text == "abs") {
      const ScalarFunc f = t.text == "cos" ? ScalarFunc::cos : t.text == "sin" ? ScalarFunc::sin : t.text == "exp" ? ScalarFunc::exp : ScalarFunc::abs;
      expect(Tok::lparen, "'(' after " + t.text);
      auto arg = scalar_sum(scope);
      expect(Tok::rparen, "')'");
      return sx::call(f, arg);
    }
    if ((t.text[0] == 'x' || t.text[0] == 't') && t.text.size() > 1 &&
        std::all_of(t.text.begin() + 1, t.text.end(), is_digit)) {
      const bool space = t.text[0] == 'x';
      const std::string digits = t.text.substr(1);
      if (digits.size() > 4 || digits[0] == '0')
        throw ParseError(ErrorKind::semantic, t.line, t.col, "variable index in '" + t.text + "' must be 1..9999 without leading zeros");
      const int idx = std::stoi(digits);
      if (opt_.d > 0 && idx > opt_.d)
        throw ParseError(ErrorKind::semantic, t.line, t.col, "variable '" + t.text + "' exceeds d = " + std::to_string(opt_.d));
      if (space && scope == Scope::frequency)
        throw ParseError(ErrorKind::semantic, t.line, t.col, "space variable '" + t.text + "' inside a Toeplitz argument");
      if (!space && scope == Scope::space)
        throw ParseError(ErrorKind::semantic, t.line, t.col, "frequency variable '" + t.text + "' inside a diagonal argument");
      if (space) {
        max_x = std::max(max_x, idx);
        return sx::x(idx - 1);
      }
      max_t = std::max(max_t, idx);
      return sx::t(idx - 1);
    }
    throw ParseError(ErrorKind::syntax, t.line, t.col, "unknown name '" + t.text + "' in scalar expression");
  }
};

// ---------------------------------------------------------------------------
// Elaboration

struct Context {
  int d = 1;
  int r = 1;
  int default_degree = 16;
};

TrigPolynomial constant_polynomial(double v, int d, int r) {
  TrigPolynomial f(d, r);
  f.set(MultiIndex::filled(d, 0), v * CMatrix::Identity(r, r));
  return f;
}

ToeplitzLeaf make_toeplitz(const PNode& n, const Context& ctx) {
  const ExprMatrix& m = n.matrix;
  std::vector<FourierTerms> terms;
  bool band_limited = true;
  for (const auto& e : m.entries) {
    auto ex = expand_trigonometric(*e, ctx.d);
    if (!ex) {
      band_limited = false;
      break;
    }
    terms.push_back(std::move(*ex));
  }
  ToeplitzLeaf leaf{TrigPolynomial(ctx.d, ctx.r), m.bracketed, band_limited, std::nullopt, MultiIndex()};
  if (band_limited) {
    std::set<MultiIndex> offsets;
    for (const auto& t : terms)
      for (const auto& [k, c] : t) offsets.insert(k);
    for (const auto& k : offsets) {
      CMatrix block = CMatrix::Zero(ctx.r, ctx.r);
      if (!m.bracketed) {
        auto it = terms[0].find(k);
        block = it->second * CMatrix::Identity(ctx.r, ctx.r);
      } else {
        for (int i = 0; i < ctx.r; ++i)
          for (int j = 0; j < ctx.r; ++j) {
            auto it = terms[static_cast<std::size_t>(i * ctx.r + j)].find(k);
            if (it != terms[static_cast<std::size_t>(i * ctx.r + j)].end()) block(i, j) = it->second;
          }
      }
      leaf.coefficients.set(k, block);
    }
    return leaf;
  }

  std::vector<std::int64_t> deg = n.degree;
  if (deg.empty()) deg.assign(static_cast<std::size_t>(ctx.d), ctx.default_degree);
  if (deg.size() == 1 && ctx.d > 1) deg.assign(static_cast<std::size_t>(ctx.d), deg[0]);
  if (static_cast<int>(deg.size()) != ctx.d)
    throw ParseError(ErrorKind::semantic, n.line, n.col,
                     "truncation degree has " + std::to_string(deg.size()) + " entries, expected d = " + std::to_string(ctx.d));
  leaf.degree = MultiIndex(deg);
  leaf.source = m;
  const bool herm = hermitian_on_probe(m, ctx.d, ctx.r, false);
  const std::int64_t max_deg = leaf.degree.max_abs_entry();
  const int base = ctx.d == 1 ? 256 : ctx.d == 2 ? 64 : 32;
  const int samples = static_cast<int>(std::max<std::int64_t>(base, 4 * max_deg + 2));
  try {
    const Symbol fs = Symbol::frequency(m, ctx.d, ctx.r, herm);
    TrigPolynomial f = fourier_coefficients(fs, leaf.degree, samples);
    if (herm) {
      TrigPolynomial sym(ctx.d, ctx.r);
      for (const auto& [k, c] : f.coefficients()) {
        if (sym.coefficients().count(k)) continue;
        const CMatrix avg = (c + f.coefficient(-k).adjoint()) / 2.0;
        if (k == -k) {
          sym.set(k, (avg + avg.adjoint()) / 2.0);
        } else {
          sym.set(k, avg);
          sym.set(-k, avg.adjoint());
        }
      }
      f = std::move(sym);
    }
    leaf.coefficients = std::move(f);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(ErrorKind::semantic, n.line, n.col, std::string("Toeplitz argument: ") + e.what());
  }
  return leaf;
}

GltExpr elaborate(const PNode& n, const Context& ctx) {
  switch (n.kind) {
    case PNode::Kind::toeplitz: return GltExpr::toeplitz(make_toeplitz(n, ctx));
    case PNode::Kind::diag:
      try {
        return GltExpr::diag(CoefficientFunction::from_expressions(n.matrix, ctx.d, ctx.r));
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        throw ParseError(ErrorKind::semantic, n.line, n.col, std::string("diagonal argument: ") + e.what());
      }
    case PNode::Kind::zero: return GltExpr::zero(ctx.d, ctx.r, n.spikes ? ZeroKind::spikes : ZeroKind::null);
    case PNode::Kind::number: {
      ToeplitzLeaf leaf{constant_polynomial(n.number, ctx.d, ctx.r), false, true, std::nullopt, MultiIndex()};
      return GltExpr::toeplitz(std::move(leaf));
    }
    case PNode::Kind::adjoint: return GltExpr::adjoint(elaborate(*n.a, ctx));
    case PNode::Kind::pinv: return GltExpr::pseudo_inverse(elaborate(*n.a, ctx), true);
    case PNode::Kind::lincomb: {
      auto a = elaborate(*n.a, ctx);
      auto b = n.b ? elaborate(*n.b, ctx) : GltExpr::zero(ctx.d, ctx.r);
      return GltExpr::lincomb(n.alpha, a, n.beta, b);
    }
    case PNode::Kind::product: return GltExpr::product(elaborate(*n.a, ctx), elaborate(*n.b, ctx));
    case PNode::Kind::apply: {
      auto child = elaborate(*n.a, ctx);
      if (!child.hermitian())
        throw ParseError(ErrorKind::semantic, n.line, n.col, "fun(" + n.fn.name() + ", ...) needs an argument declared Hermitian");
      return GltExpr::apply(n.fn, child);
    }
  }
  throw ParseError(ErrorKind::syntax, n.line, n.col, "unknown expression node");
}

// ---------------------------------------------------------------------------
// Formatter

std::string weight(double v) {
  if (!std::isfinite(v)) throw Error(ErrorKind::configuration, "non-finite weight cannot be formatted");
  return format_number(v);
}

double real_weight(cplx w) {
  if (w.imag() != 0.0) throw Error(ErrorKind::configuration, "complex weights have no expression-language form");
  return w.real();
}

std::string matrix_text(const ExprMatrix& m) {
  if (!m.bracketed) return format(*m.entries.front());
  std::string out = "[";
  for (int i = 0; i < m.rows; ++i) {
    if (i) out += "; ";
    for (int j = 0; j < m.rows; ++j) {
      if (j) out += ", ";
      out += format(*m.entries[static_cast<std::size_t>(i * m.rows + j)]);
    }
  }
  return out + "]";
}

FourierTerms entry_terms(const TrigPolynomial& f, int i, int j) {
  FourierTerms t;
  for (const auto& [k, c] : f.coefficients())
    if (c(i, j) != 0.0) t[k] = c(i, j);
  return t;
}

std::string toeplitz_text(const ToeplitzLeaf& leaf) {
  std::string body;
  if (!leaf.band_limited) {
    body = matrix_text(*leaf.source) + "; ";
    for (std::size_t j = 0; j < leaf.degree.dim(); ++j) body += (j ? "," : "") + std::to_string(leaf.degree[j]);
    return "T(" + body + ")";
  }
  const auto& f = leaf.coefficients;
  if (!leaf.bracketed) {
    body = format_fourier(entry_terms(f, 0, 0));
  } else {
    body = "[";
    for (int i = 0; i < f.r(); ++i) {
      if (i) body += "; ";
      for (int j = 0; j < f.r(); ++j) {
        if (j) body += ", ";
        body += format_fourier(entry_terms(f, i, j));
      }
    }
    body += "]";
  }
  return "T(" + body + ")";
}

std::string fmt(const GltExpr& e);

bool is_atomic(const GltExpr& e) {
  switch (e.kind()) {
    case GltKind::toeplitz:
    case GltKind::diag:
    case GltKind::zero:
    case GltKind::apply:
    case GltKind::adjoint:
    case GltKind::pseudo_inverse: return true;
    default: return false;
  }
}

std::string factor_text(const GltExpr& e) { return is_atomic(e) ? fmt(e) : "(" + fmt(e) + ")"; }

// Operand of a sum term: products stay bare, sums are parenthesized.
std::string term_text(const GltExpr& e) {
  if (e.kind() == GltKind::lincomb) return "(" + fmt(e) + ")";
  return fmt(e);
}

std::string lincomb_text(const GltExpr& e) {
  const double alpha = real_weight(e.alpha());
  const double beta = real_weight(e.beta());
  if (e.is_scaled_single()) {
    if (alpha == -1.0) return "-" + term_text(e.left());
    return weight(alpha) + "*" + term_text(e.left());
  }
  std::string out;
  const GltExpr& a = e.left();
  if (alpha == 1.0) {
    const bool bare = a.kind() == GltKind::lincomb && !a.is_scaled_single();
    out = bare ? fmt(a) : term_text(a);
  } else if (alpha == -1.0) {
    out = "-" + term_text(a);
  } else {
    out = weight(alpha) + "*" + term_text(a);
  }
  const bool negative = beta < 0.0 || std::signbit(beta);
  const double mag = std::abs(beta);
  out += negative ? " - " : " + ";
  if (mag != 1.0) out += weight(mag) + "*";
  out += term_text(e.right());
  return out;
}

std::string fmt(const GltExpr& e) {
  switch (e.kind()) {
    case GltKind::toeplitz: return toeplitz_text(e.toeplitz_leaf());
    case GltKind::diag: {
      const auto* m = e.coefficient().expressions();
      if (!m) throw Error(ErrorKind::configuration, "diagonal leaf has no expression form");
      return "D(" + matrix_text(*m) + ")";
    }
    case GltKind::zero: return e.zero_kind() == ZeroKind::spikes ? "Z[spikes]" : "Z";
    case GltKind::adjoint: return factor_text(e.child()) + "'";
    case GltKind::pseudo_inverse: return factor_text(e.child()) + "^-1";
    case GltKind::apply: return "fun(" + e.function().name() + ", " + fmt(e.child()) + ")";
    case GltKind::product: {
      const GltExpr& a = e.left();
      const GltExpr& b = e.right();
      const std::string lhs = a.kind() == GltKind::product ? fmt(a) : factor_text(a);
      return lhs + "*" + factor_text(b);
    }
    case GltKind::lincomb: return lincomb_text(e);
  }
  throw Error(ErrorKind::configuration, "unknown expression node");
}

}  // namespace

GltExpr parse(std::string_view text, const ParseOptions& options) {
  if (options.default_degree < 0) throw Error(ErrorKind::configuration, "default degree must be non-negative");
  auto tokens = lex(text);
  if (tokens.size() == 1) throw ParseError(ErrorKind::syntax, tokens[0].line, tokens[0].col, "empty expression");
  Parser p(std::move(tokens), options);
  auto tree = p.parse_all();
  Context ctx;
  ctx.d = options.d > 0 ? options.d : std::max({1, p.max_x, p.max_t});
  ctx.r = options.r > 0 ? options.r : std::max(1, p.bracket_r);
  ctx.default_degree = options.default_degree;
  return elaborate(*tree, ctx);
}

std::string format(const GltExpr& e) { return fmt(e); }

ScalarExprPtr parse_scalar(std::string_view text) {
  auto tokens = lex(text);
  if (tokens.size() == 1) throw ParseError(ErrorKind::syntax, tokens[0].line, tokens[0].col, "empty expression");
  Parser p(std::move(tokens), ParseOptions{});
  return p.parse_scalar_all();
}

}  // namespace gltlab::dsl
