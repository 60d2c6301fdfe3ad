#pragma once

/// A small arithmetic expression language so coefficient functions can be
/// declared in configuration files instead of code.
///
/// Grammar (EBNF, also documented in the README):
///
///   expr    = term { ("+" | "-") term } ;
///   term    = unary { ("*" | "/") unary } ;
///   unary   = "-" unary | power ;
///   power   = primary [ "^" unary ] ;            (right-associative)
///   primary = NUMBER | NAME | NAME "(" expr ")" | "(" expr ")" ;
///
/// Precedence: ^  binds tighter than unary minus, which binds tighter than
/// * and /, which bind tighter than + and -.  Variables are exactly
/// {t, y, x, q}; q names the precomputed fractional-integral argument the
/// solvers feed into a forcing function.  Functions are one-argument
/// {exp, ln, sin, cos, sqrt, abs, gamma}; named constants are {pi, e}.
///
/// Parse errors carry the byte offset; evaluation errors (division by zero,
/// ln of a non-positive value, sqrt of a negative value, unbound variable,
/// non-finite intermediate) carry the offset of the responsible node.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "psihilfer/errors.hpp"
#include "psihilfer/special_functions.hpp"

namespace psihilfer {

/// Variable bindings for evaluation; unbound variables referenced by the
/// expression raise EvalError.
struct Bindings {
  std::optional<double> t;
  std::optional<double> y;
  std::optional<double> x;
  std::optional<double> q;
};

namespace expr_detail {

enum class Kind { literal, variable, constant, unary_minus, binary, call };
enum class Var { t, y, x, q };
enum class BinOp { add, sub, mul, div, pow };
enum class Fn { exp, ln, sin, cos, sqrt, abs, gamma };

struct Node;
using NodePtr = std::unique_ptr<const Node>;

struct Node {
  Kind kind;
  std::size_t offset = 0;  // byte offset in the source text
  double number = 0.0;     // literal value or constant value
  std::string name;        // constant name
  Var var = Var::t;
  BinOp bin = BinOp::add;
  Fn fn = Fn::exp;
  NodePtr lhs;  // binary left / unary operand / call argument
  NodePtr rhs;  // binary right
};

inline const char* var_name(Var v) {
  switch (v) {
    case Var::t: return "t";
    case Var::y: return "y";
    case Var::x: return "x";
    case Var::q: return "q";
  }
  return "?";
}

inline const char* fn_name(Fn f) {
  switch (f) {
    case Fn::exp: return "exp";
    case Fn::ln: return "ln";
    case Fn::sin: return "sin";
    case Fn::cos: return "cos";
    case Fn::sqrt: return "sqrt";
    case Fn::abs: return "abs";
    case Fn::gamma: return "gamma";
  }
  return "?";
}

[[noreturn]] inline void eval_fail(const Node& node, const std::string& what) {
  throw EvalError(what + " (at offset " + std::to_string(node.offset) + ")");
}

inline double eval_node(const Node& node, const Bindings& b) {
  switch (node.kind) {
    case Kind::literal:
    case Kind::constant:
      return node.number;
    case Kind::variable: {
      const std::optional<double>* slot = nullptr;
      switch (node.var) {
        case Var::t: slot = &b.t; break;
        case Var::y: slot = &b.y; break;
        case Var::x: slot = &b.x; break;
        case Var::q: slot = &b.q; break;
      }
      if (!slot->has_value()) {
        eval_fail(node, std::string("unbound variable '") +
                            var_name(node.var) + "'");
      }
      return **slot;
    }
    case Kind::unary_minus:
      return -eval_node(*node.lhs, b);
    case Kind::binary: {
      const double a = eval_node(*node.lhs, b);
      const double c = eval_node(*node.rhs, b);
      double r = 0.0;
      switch (node.bin) {
        case BinOp::add: r = a + c; break;
        case BinOp::sub: r = a - c; break;
        case BinOp::mul: r = a * c; break;
        case BinOp::div:
          if (c == 0.0) eval_fail(node, "division by zero");
          r = a / c;
          break;
        case BinOp::pow:
          if (a < 0.0 && c != std::floor(c)) {
            eval_fail(node, "fractional power of a negative base");
          }
          if (a == 0.0 && c < 0.0) {
            eval_fail(node, "zero raised to a negative power");
          }
          r = std::pow(a, c);
          break;
      }
      if (!std::isfinite(r)) eval_fail(node, "non-finite arithmetic result");
      return r;
    }
    case Kind::call: {
      const double a = eval_node(*node.lhs, b);
      double r = 0.0;
      switch (node.fn) {
        case Fn::exp: r = std::exp(a); break;
        case Fn::ln:
          if (a <= 0.0) eval_fail(node, "ln of a non-positive value");
          r = std::log(a);
          break;
        case Fn::sin: r = std::sin(a); break;
        case Fn::cos: r = std::cos(a); break;
        case Fn::sqrt:
          if (a < 0.0) eval_fail(node, "sqrt of a negative value");
          r = std::sqrt(a);
          break;
        case Fn::abs: r = std::fabs(a); break;
        case Fn::gamma:
          if (a <= 0.0) eval_fail(node, "gamma of a non-positive value");
          r = gamma_fn(a);
          break;
      }
      if (!std::isfinite(r)) eval_fail(node, "non-finite function result");
      return r;
    }
  }
  eval_fail(node, "corrupt expression tree");
}

/// Recursive-descent parser over the grammar in the header comment.
class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    NodePtr e = parse_expr();
    skip_spaces();
    if (pos_ != src_.size()) {
      fail("unexpected trailing input");
    }
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " (at offset " + std::to_string(pos_) + ")", pos_);
  }

  void skip_spaces() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
  }

  bool peek_is(char c) {
    skip_spaces();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  bool consume(char c) {
    if (peek_is(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      skip_spaces();
      const std::size_t at = pos_;
      if (consume('+')) {
        lhs = make_binary(BinOp::add, at, std::move(lhs), parse_term());
      } else if (consume('-')) {
        lhs = make_binary(BinOp::sub, at, std::move(lhs), parse_term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      skip_spaces();
      const std::size_t at = pos_;
      if (consume('*')) {
        lhs = make_binary(BinOp::mul, at, std::move(lhs), parse_unary());
      } else if (consume('/')) {
        lhs = make_binary(BinOp::div, at, std::move(lhs), parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    skip_spaces();
    const std::size_t at = pos_;
    if (consume('-')) {
      auto node = std::make_unique<Node>();
      node->kind = Kind::unary_minus;
      node->offset = at;
      node->lhs = parse_unary();
      return node;
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    skip_spaces();
    const std::size_t at = pos_;
    if (consume('^')) {
      // Right-associative; the exponent may itself start with a unary minus.
      return make_binary(BinOp::pow, at, std::move(base), parse_unary());
    }
    return base;
  }

  NodePtr parse_primary() {
    skip_spaces();
    if (pos_ >= src_.size()) {
      fail("expected a number, a name, '(', or '-'");
    }
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      return parse_name();
    }
    fail("expected a number, a name, '(', or '-'");
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    auto is_digit = [&](std::size_t i) {
      return i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]));
    };
    while (is_digit(end)) ++end;
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      while (is_digit(end)) ++end;
    }
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t exp_end = end + 1;
      if (exp_end < src_.size() && (src_[exp_end] == '+' || src_[exp_end] == '-')) {
        ++exp_end;
      }
      if (is_digit(exp_end)) {
        end = exp_end;
        while (is_digit(end)) ++end;
      }
    }
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(src_.data() + start, src_.data() + end, value);
    if (ec != std::errc() || ptr != src_.data() + end) {
      fail("malformed number");
    }
    pos_ = end;
    auto node = std::make_unique<Node>();
    node->kind = Kind::literal;
    node->offset = start;
    node->number = value;
    return node;
  }

  NodePtr parse_name() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    while (end < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[end])) ||
            src_[end] == '_')) {
      ++end;
    }
    const std::string_view name = src_.substr(start, end - start);
    pos_ = end;

    static constexpr std::pair<std::string_view, Var> kVars[] = {
        {"t", Var::t}, {"y", Var::y}, {"x", Var::x}, {"q", Var::q}};
    for (const auto& [n, v] : kVars) {
      if (name == n) {
        auto node = std::make_unique<Node>();
        node->kind = Kind::variable;
        node->offset = start;
        node->var = v;
        return node;
      }
    }

    static constexpr std::pair<std::string_view, double> kConsts[] = {
        {"pi", 3.14159265358979323846}, {"e", 2.71828182845904523536}};
    for (const auto& [n, v] : kConsts) {
      if (name == n) {
        auto node = std::make_unique<Node>();
        node->kind = Kind::constant;
        node->offset = start;
        node->name = std::string(name);
        node->number = v;
        return node;
      }
    }

    static constexpr std::pair<std::string_view, Fn> kFns[] = {
        {"exp", Fn::exp},   {"ln", Fn::ln},   {"sin", Fn::sin},
        {"cos", Fn::cos},   {"sqrt", Fn::sqrt}, {"abs", Fn::abs},
        {"gamma", Fn::gamma}};
    for (const auto& [n, f] : kFns) {
      if (name == n) {
        if (!consume('(')) {
          fail("expected '(' after function name '" + std::string(name) + "'");
        }
        auto node = std::make_unique<Node>();
        node->kind = Kind::call;
        node->offset = start;
        node->fn = f;
        node->lhs = parse_expr();
        if (peek_is(',')) {
          fail("functions take exactly one argument");
        }
        if (!consume(')')) fail("expected ')'");
        return node;
      }
    }

    pos_ = start;  // report the error at the identifier itself
    fail("unknown identifier '" + std::string(name) + "'");
  }

  static NodePtr make_binary(BinOp op, std::size_t at, NodePtr lhs,
                             NodePtr rhs) {
    auto node = std::make_unique<Node>();
    node->kind = Kind::binary;
    node->offset = at;
    node->bin = op;
    node->lhs = std::move(lhs);
    node->rhs = std::move(rhs);
    return node;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

/// Precedence levels for minimal-parenthesis printing.
inline int precedence(const Node& node) {
  switch (node.kind) {
    case Kind::binary:
      switch (node.bin) {
        case BinOp::add:
        case BinOp::sub: return 1;
        case BinOp::mul:
        case BinOp::div: return 2;
        case BinOp::pow: return 4;
      }
      return 1;
    case Kind::unary_minus: return 3;
    default: return 5;
  }
}

inline void print_node(const Node& node, int min_prec, std::string& out) {
  const int prec = precedence(node);
  const bool parens = prec < min_prec;
  if (parens) out += '(';
  switch (node.kind) {
    case Kind::literal: {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", node.number);
      out += buf;
      break;
    }
    case Kind::constant:
      out += node.name;
      break;
    case Kind::variable:
      out += var_name(node.var);
      break;
    case Kind::unary_minus:
      out += '-';
      print_node(*node.lhs, 3, out);
      break;
    case Kind::call:
      out += fn_name(node.fn);
      out += '(';
      print_node(*node.lhs, 0, out);
      out += ')';
      break;
    case Kind::binary: {
      const char* op = "";
      int lhs_min = prec;
      int rhs_min = prec + 1;
      switch (node.bin) {
        case BinOp::add: op = " + "; rhs_min = prec; break;
        case BinOp::sub: op = " - "; break;
        case BinOp::mul: op = "*"; rhs_min = prec; break;
        case BinOp::div: op = "/"; break;
        case BinOp::pow:
          op = "^";
          lhs_min = prec + 1;  // left operand of ^ must be primary-like
          rhs_min = 3;         // exponent may be a unary expression
          break;
      }
      print_node(*node.lhs, lhs_min, out);
      out += op;
      print_node(*node.rhs, rhs_min, out);
      break;
    }
  }
  if (parens) out += ')';
}

}  // namespace expr_detail

/// A parsed, immutable arithmetic expression over {t, y, x, q}.
/// Copies share the tree; evaluation is reentrant and deterministic.
class Expression {
 public:
  /// Parse source text; throws ParseError with a byte offset on failure.
  static Expression parse(std::string_view source) {
    expr_detail::Parser parser(source);
    return Expression(std::shared_ptr<const expr_detail::Node>(parser.parse()),
                      std::string(source));
  }

  /// Evaluate under the given bindings; throws EvalError on domain errors
  /// or references to unbound variables.
  double eval(const Bindings& bindings) const {
    return expr_detail::eval_node(*root_, bindings);
  }

  /// Re-printable form with minimal parentheses; parsing it yields a tree
  /// that evaluates identically.
  std::string pretty() const {
    std::string out;
    expr_detail::print_node(*root_, 0, out);
    return out;
  }

  /// The original source text.
  const std::string& source() const noexcept { return source_; }

 private:
  Expression(std::shared_ptr<const expr_detail::Node> root, std::string source)
      : root_(std::move(root)), source_(std::move(source)) {}

  std::shared_ptr<const expr_detail::Node> root_;
  std::string source_;
};

}  // namespace psihilfer
