#pragma once

#include <cctype>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pshdf/rpoly.hpp"
#include "pshdf/wpoly.hpp"

namespace pshdf {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int column)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Expression tree. Variables: z, z1.., zbar, z1bar.., w, wbar, i (complex
// mode) and x, x1.., y (real mode). Functions: Re, Im, conj, abs2.
struct Expr {
  enum class Kind { Number, Symbol, Neg, Add, Sub, Mul, Div, Pow, Call };

  Kind kind = Kind::Number;
  Rational value{0};
  std::string name;  // Symbol or Call
  int line = 1;
  int column = 1;
  std::vector<Expr> args;
};

namespace detail {

struct Token {
  enum class Kind { Number, Ident, Op, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 1;
  int column = 1;
};

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t k) {
    for (std::size_t s = 0; s < k; ++s, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      bool dot = false;
      while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || (src[j] == '.' && !dot))) {
        if (src[j] == '.') dot = true;
        ++j;
      }
      t.kind = Token::Kind::Number;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Token::Kind::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::string_view("+-*/^(),").find(c) != std::string_view::npos) {
      t.kind = Token::Kind::Op;
      t.text = std::string(1, c);
      advance(1);
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

inline Rational parse_decimal(const std::string& text) {
  const auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(mpz_class(text));
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  if (digits.empty()) digits = "0";
  mpz_class den = 1;
  for (std::size_t k = dot + 1; k < text.size(); ++k) den *= 10;
  Rational q{mpz_class(digits), den};
  q.canonicalize();
  return q;
}

inline bool is_function_name(const std::string& s) { return s == "Re" || s == "Im" || s == "conj" || s == "abs2"; }

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

  Expr parse() {
    Expr e = parse_sum();
    if (peek().kind != Token::Kind::End) fail("unexpected token '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  Token take() { return toks_[pos_++]; }
  bool at_op(const char* op) const { return peek().kind == Token::Kind::Op && peek().text == op; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().line, peek().column); }

  static Expr node(Expr::Kind k, const Token& at, std::vector<Expr> args) {
    Expr e;
    e.kind = k;
    e.line = at.line;
    e.column = at.column;
    e.args = std::move(args);
    return e;
  }

  Expr parse_sum() {
    Expr lhs = parse_product();
    while (at_op("+") || at_op("-")) {
      Token op = take();
      Expr rhs = parse_product();
      lhs = node(op.text == "+" ? Expr::Kind::Add : Expr::Kind::Sub, op, {std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  bool starts_operand() const {
    const auto& t = peek();
    return t.kind == Token::Kind::Number || t.kind == Token::Kind::Ident || (t.kind == Token::Kind::Op && t.text == "(");
  }

  Expr parse_product() {
    Expr lhs = parse_unary();
    for (;;) {
      if (at_op("*") || at_op("/")) {
        Token op = take();
        Expr rhs = parse_unary();
        lhs = node(op.text == "*" ? Expr::Kind::Mul : Expr::Kind::Div, op, {std::move(lhs), std::move(rhs)});
      } else if (starts_operand()) {
        // juxtaposition, as in "z^2 zbar" or "(1/2)i"
        Token at = peek();
        Expr rhs = parse_power();
        lhs = node(Expr::Kind::Mul, at, {std::move(lhs), std::move(rhs)});
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (at_op("-")) {
      Token op = take();
      return node(Expr::Kind::Neg, op, {parse_unary()});
    }
    if (at_op("+")) {
      take();
      return parse_unary();
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (at_op("^")) {
      Token op = take();
      Expr exponent = parse_unary();
      return node(Expr::Kind::Pow, op, {std::move(base), std::move(exponent)});
    }
    return base;
  }

  Expr parse_primary() {
    const Token t = peek();
    if (t.kind == Token::Kind::Number) {
      take();
      Expr e = node(Expr::Kind::Number, t, {});
      e.value = parse_decimal(t.text);
      return e;
    }
    if (t.kind == Token::Kind::Ident) {
      take();
      if (is_function_name(t.text)) {
        if (!at_op("(")) fail("expected '(' after " + t.text);
        take();
        Expr arg = parse_sum();
        if (!at_op(")")) fail("expected ')'");
        take();
        Expr e = node(Expr::Kind::Call, t, {std::move(arg)});
        e.name = t.text;
        return e;
      }
      Expr e = node(Expr::Kind::Symbol, t, {});
      e.name = t.text;
      return e;
    }
    if (at_op("(")) {
      take();
      Expr e = parse_sum();
      if (!at_op(")")) fail("expected ')'");
      take();
      return e;
    }
    if (t.kind == Token::Kind::End) fail("unexpected end of input");
    fail("unexpected token '" + t.text + "'");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

struct SymbolInfo {
  enum class Kind { Z, ZBar, W, WBar, ImagUnit, X, Y, Unknown };
  Kind kind = Kind::Unknown;
  int index = 0;  // 0-based z / x index
};

inline SymbolInfo classify_symbol(const std::string& s) {
  using K = SymbolInfo::Kind;
  if (s == "w") return {K::W, 0};
  if (s == "wbar") return {K::WBar, 0};
  if (s == "i") return {K::ImagUnit, 0};
  if (s == "y") return {K::Y, 0};
  auto indexed = [&](char head, std::string_view suffix, K kind) -> std::optional<SymbolInfo> {
    if (s.empty() || s[0] != head) return std::nullopt;
    std::string_view rest(s);
    rest.remove_prefix(1);
    if (!suffix.empty()) {
      if (rest.size() < suffix.size() || rest.substr(rest.size() - suffix.size()) != suffix) return std::nullopt;
      rest.remove_suffix(suffix.size());
    }
    if (rest.empty()) return SymbolInfo{kind, 0};
    for (char c : rest)
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    if (rest[0] == '0') return std::nullopt;
    return SymbolInfo{kind, std::stoi(std::string(rest)) - 1};
  };
  if (auto v = indexed('z', "bar", K::ZBar)) return *v;
  if (auto v = indexed('z', "", K::Z)) return *v;
  if (auto v = indexed('x', "", K::X)) return *v;
  return {K::Unknown, 0};
}

inline void scan_indices(const Expr& e, int& max_z, int& max_x) {
  if (e.kind == Expr::Kind::Symbol) {
    auto info = classify_symbol(e.name);
    if (info.kind == SymbolInfo::Kind::Z || info.kind == SymbolInfo::Kind::ZBar) max_z = std::max(max_z, info.index);
    if (info.kind == SymbolInfo::Kind::X) max_x = std::max(max_x, info.index);
  }
  for (const auto& a : e.args) scan_indices(a, max_z, max_x);
}

}  // namespace detail

inline Expr parse(std::string_view source) { return detail::Parser(source).parse(); }

// Smallest dimension n >= 2 that holds every z_j (or x_j) named in e.
inline int infer_dimension(const Expr& e) {
  int max_z = 0, max_x = 0;
  detail::scan_indices(e, max_z, max_x);
  return std::max(max_z, max_x) + 2;
}

namespace detail {

template <class P, class Ops>
P lower_generic(const Expr& e, const Ops& ops);

// Exponent operands must reduce to a non-negative integer constant.
template <class P, class Ops>
unsigned lower_exponent(const Expr& e, const Ops& ops) {
  P p = lower_generic<P>(e, ops);
  if (!ops.is_constant(p)) throw ParseError("exponent must be a constant", e.line, e.column);
  auto value = ops.constant_value(p);
  if (!value) throw ParseError("non-integer exponent", e.line, e.column);
  if (value->get_den() != 1) throw ParseError("non-integer exponent", e.line, e.column);
  if (sgn(*value) < 0) throw ParseError("negative exponent", e.line, e.column);
  if (*value > 64) throw ParseError("exponent too large", e.line, e.column);
  return static_cast<unsigned>(value->get_num().get_ui());
}

template <class P, class Ops>
P lower_generic(const Expr& e, const Ops& ops) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::Number:
      return ops.constant(e.value);
    case K::Symbol:
      return ops.symbol(e);
    case K::Neg:
      return ops.negate(lower_generic<P>(e.args[0], ops));
    case K::Add:
      return lower_generic<P>(e.args[0], ops) + lower_generic<P>(e.args[1], ops);
    case K::Sub:
      return lower_generic<P>(e.args[0], ops) - lower_generic<P>(e.args[1], ops);
    case K::Mul:
      return lower_generic<P>(e.args[0], ops) * lower_generic<P>(e.args[1], ops);
    case K::Div: {
      P num = lower_generic<P>(e.args[0], ops);
      P den = lower_generic<P>(e.args[1], ops);
      if (!ops.is_constant(den)) throw ParseError("division only by constants", e.line, e.column);
      return ops.divide(num, den, e);
    }
    case K::Pow: {
      P base = lower_generic<P>(e.args[0], ops);
      return base.pow(lower_exponent<P>(e.args[1], ops));
    }
    case K::Call:
      return ops.call(e.name, lower_generic<P>(e.args[0], ops));
  }
  throw ParseError("malformed expression", e.line, e.column);
}

struct ComplexOps {
  int n;

  WPoly constant(const GaussianRational& c) const { return WPoly::constant(n, c); }
  WPoly negate(const WPoly& p) const { return -p; }
  bool is_constant(const WPoly& p) const { return p.degree() == 0; }
  std::optional<Rational> constant_value(const WPoly& p) const {
    auto c = p.constant_term();
    if (!c.is_real()) return std::nullopt;
    return c.re();
  }
  WPoly divide(const WPoly& num, const WPoly& den, const Expr& at) const {
    auto c = den.constant_term();
    if (c.is_zero()) throw ParseError("division by zero", at.line, at.column);
    return num.scaled(GaussianRational(1) / c);
  }
  WPoly symbol(const Expr& e) const {
    using K = SymbolInfo::Kind;
    auto info = classify_symbol(e.name);
    switch (info.kind) {
      case K::Z:
      case K::ZBar:
        if (info.index >= n - 1) throw ParseError("variable " + e.name + " exceeds dimension", e.line, e.column);
        return info.kind == K::Z ? WPoly::z(n, info.index) : WPoly::zbar(n, info.index);
      case K::W:
        return WPoly::w(n);
      case K::WBar:
        return WPoly::wbar(n);
      case K::ImagUnit:
        return WPoly::constant(n, GaussianRational::imag_unit());
      default:
        throw ParseError("unknown identifier '" + e.name + "'", e.line, e.column);
    }
  }
  WPoly call(const std::string& f, const WPoly& a) const {
    if (f == "Re") return a.real_part();
    if (f == "Im") return a.imag_part();
    if (f == "conj") return a.conjugate();
    return a * a.conjugate();  // abs2
  }
};

struct RealOps {
  std::size_t nvars;

  RPoly constant(const Rational& c) const { return RPoly::constant(nvars, c); }
  RPoly negate(const RPoly& p) const { return -p; }
  bool is_constant(const RPoly& p) const { return p.degree() == 0; }
  std::optional<Rational> constant_value(const RPoly& p) const { return p.constant_term(); }
  RPoly divide(const RPoly& num, const RPoly& den, const Expr& at) const {
    Rational c = den.constant_term();
    if (sgn(c) == 0) throw ParseError("division by zero", at.line, at.column);
    return num.scaled(Rational(1 / c));
  }
  RPoly symbol(const Expr& e) const {
    using K = SymbolInfo::Kind;
    auto info = classify_symbol(e.name);
    if (info.kind == K::Y) return RPoly::variable(nvars, nvars - 1);
    if (info.kind == K::X) {
      if (info.index + 1 >= static_cast<int>(nvars))
        throw ParseError("variable " + e.name + " exceeds dimension", e.line, e.column);
      return RPoly::variable(nvars, static_cast<std::size_t>(info.index));
    }
    if (info.kind == K::Unknown) throw ParseError("unknown identifier '" + e.name + "'", e.line, e.column);
    throw ParseError("complex variable '" + e.name + "' in real mode", e.line, e.column);
  }
  RPoly call(const std::string& f, const RPoly& a) const {
    if (f == "Im") return RPoly(nvars);
    if (f == "abs2") return a * a;
    return a;  // Re, conj
  }
};

}  // namespace detail

// Lower to a WPoly over C^n; n = 0 infers the dimension from the variables.
inline WPoly lower_complex(const Expr& e, int n = 0) {
  if (n == 0) n = infer_dimension(e);
  return detail::lower_generic<WPoly>(e, detail::ComplexOps{n});
}

// Lower to a real polynomial in x_1..x_{n-1}, y.
inline RPoly lower_real(const Expr& e, int n = 0) {
  if (n == 0) n = infer_dimension(e);
  return detail::lower_generic<RPoly>(e, detail::RealOps{static_cast<std::size_t>(n)});
}

inline WPoly parse_wpoly(std::string_view source, int n = 0) { return lower_complex(parse(source), n); }
inline RPoly parse_rpoly(std::string_view source, int n = 0) { return lower_real(parse(source), n); }

}  // namespace pshdf
