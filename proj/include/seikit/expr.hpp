#pragma once

// Scenario expression language: parser, evaluator, printer, AST builders and
// finite-difference gradients.
//
// Grammar (unary minus binds tighter than '^', so "-x1^2" is (-x1)^2):
//
//   expr   := ifexpr | sum
//   ifexpr := "if" bool "then" expr "else" expr
//   sum    := prod (("+"|"-") prod)*
//   prod   := pow (("*"|"/") pow)*
//   pow    := unary ("^" pow)?
//   unary  := "-" unary | atom
//   atom   := number | var | call | "(" expr ")"
//   var    := "x" digit+
//   call   := ident "(" expr ("," expr)* ")"
//   bool   := rel (("and"|"or") rel)* | "not" bool
//   rel    := expr cmp expr
//   cmp    := "<" | "<=" | ">" | ">=" | "==" | "!="

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sei {

using Point = std::vector<double>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

enum class EvalCause { DomainError, DivisionByZero, NonFinite };

inline std::string_view to_string(EvalCause c) {
  switch (c) {
    case EvalCause::DomainError: return "domain-error";
    case EvalCause::DivisionByZero: return "division-by-zero";
    case EvalCause::NonFinite: return "non-finite-result";
  }
  return "unknown";
}

namespace detail {
inline std::string format_point(std::span<const double> x) {
  std::string out = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out += ", ";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, x[i]);
    out.append(buf, res.ptr);
  }
  return out + ")";
}
}  // namespace detail

using NodeId = std::int32_t;

/// Evaluation failure. Carries the offending AST node and input point.
class EvalError : public Error {
 public:
  EvalError(EvalCause cause, NodeId node, Point point)
      : Error(std::string(to_string(cause)) + " at node " + std::to_string(node) + " for input " +
              detail::format_point(point)),
        cause_(cause),
        node_(node),
        point_(std::move(point)) {}

  EvalCause cause() const { return cause_; }
  NodeId node() const { return node_; }
  const Point& point() const { return point_; }

 private:
  EvalCause cause_;
  NodeId node_;
  Point point_;
};

enum class Op : std::uint8_t {
  Literal,
  Variable,
  Neg,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Call,
  If,
  Less,
  LessEq,
  Greater,
  GreaterEq,
  Equal,
  NotEqual,
  And,
  Or,
  Not,
};

enum class Builtin : std::uint8_t { Sqrt, Abs, Exp, Ln, Sin, Cos, Atan, Min, Max, Pi };

struct Node {
  Op op = Op::Literal;
  Builtin fn = Builtin::Pi;
  double value = 0.0;     // Literal
  std::size_t var = 0;    // Variable, zero-based
  std::vector<NodeId> args;
};

class Expression;

namespace detail {
class Parser;
NodeId copy_subtree(std::vector<Node>& dst, const Expression& src, NodeId root,
                    std::span<const NodeId> var_map);
}  // namespace detail

/// Immutable AST of a scalar- or vector-valued function of `arity` real
/// variables. A vector expression is an ordered list of scalar components
/// sharing one node arena.
class Expression {
 public:
  Expression() = default;

  std::size_t arity() const { return arity_; }
  std::size_t components() const { return roots_.size(); }
  bool is_scalar() const { return roots_.size() == 1; }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::span<const NodeId> roots() const { return roots_; }

  /// Scalar value; the expression must be scalar.
  double value(std::span<const double> x) const {
    check_input(x);
    if (!is_scalar()) throw Error("value() called on a vector expression");
    return finite(eval(roots_[0], x), roots_[0], x);
  }

  double component(std::size_t i, std::span<const double> x) const {
    check_input(x);
    return finite(eval(roots_.at(i), x), roots_[i], x);
  }

  Point operator()(std::span<const double> x) const {
    check_input(x);
    Point out(roots_.size());
    for (std::size_t i = 0; i < roots_.size(); ++i) out[i] = finite(eval(roots_[i], x), roots_[i], x);
    return out;
  }

  /// Fully parenthesized source that parses back to an equivalent AST.
  /// Vector expressions print as "[c1; c2; ...]".
  std::string to_string() const {
    if (is_scalar()) return print(roots_[0]);
    std::string out = "[";
    for (std::size_t i = 0; i < roots_.size(); ++i) {
      if (i) out += "; ";
      out += print(roots_[i]);
    }
    return out + "]";
  }

  std::string component_string(std::size_t i) const { return print(roots_.at(i)); }

  /// Builds an expression from a node arena; validates variable indices.
  static Expression from_nodes(std::vector<Node> nodes, std::vector<NodeId> roots, std::size_t arity) {
    Expression e;
    e.nodes_ = std::move(nodes);
    e.roots_ = std::move(roots);
    e.arity_ = arity;
    for (const auto& n : e.nodes_)
      if (n.op == Op::Variable && n.var >= arity) throw Error("variable index exceeds arity");
    return e;
  }

 private:
  friend class detail::Parser;

  void check_input(std::span<const double> x) const {
    if (x.size() != arity_)
      throw Error("input has dimension " + std::to_string(x.size()) + ", expression arity is " +
                  std::to_string(arity_));
  }

  [[noreturn]] static void fail(EvalCause cause, NodeId id, std::span<const double> x) {
    throw EvalError(cause, id, Point(x.begin(), x.end()));
  }

  static double finite(double v, NodeId id, std::span<const double> x) {
    if (std::isnan(v)) fail(EvalCause::DomainError, id, x);
    if (!std::isfinite(v)) fail(EvalCause::NonFinite, id, x);
    return v;
  }

  double eval(NodeId id, std::span<const double> x) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    switch (n.op) {
      case Op::Literal: return n.value;
      case Op::Variable: return x[n.var];
      case Op::Neg: return -eval(n.args[0], x);
      case Op::Add: return finite(eval(n.args[0], x) + eval(n.args[1], x), id, x);
      case Op::Sub: return finite(eval(n.args[0], x) - eval(n.args[1], x), id, x);
      case Op::Mul: return finite(eval(n.args[0], x) * eval(n.args[1], x), id, x);
      case Op::Div: {
        const double num = eval(n.args[0], x);
        const double den = eval(n.args[1], x);
        if (den == 0.0) fail(EvalCause::DivisionByZero, id, x);
        return finite(num / den, id, x);
      }
      case Op::Pow: {
        const double base = eval(n.args[0], x);
        const double ex = eval(n.args[1], x);
        if (base == 0.0 && ex < 0.0) fail(EvalCause::DivisionByZero, id, x);
        return finite(std::pow(base, ex), id, x);
      }
      case Op::Call: return call(n, id, x);
      case Op::If: return eval_bool(n.args[0], x) ? eval(n.args[1], x) : eval(n.args[2], x);
      default: throw Error("boolean node used as a value");
    }
  }

  double call(const Node& n, NodeId id, std::span<const double> x) const {
    if (n.fn == Builtin::Pi) return std::numbers::pi;
    if (n.fn == Builtin::Min || n.fn == Builtin::Max) {
      double acc = eval(n.args[0], x);
      for (std::size_t i = 1; i < n.args.size(); ++i) {
        const double v = eval(n.args[i], x);
        acc = n.fn == Builtin::Min ? std::min(acc, v) : std::max(acc, v);
      }
      return acc;
    }
    const double a = eval(n.args[0], x);
    switch (n.fn) {
      case Builtin::Sqrt:
        if (a < 0.0) fail(EvalCause::DomainError, id, x);
        return std::sqrt(a);
      case Builtin::Abs: return std::abs(a);
      case Builtin::Exp: return finite(std::exp(a), id, x);
      case Builtin::Ln:
        if (a <= 0.0) fail(EvalCause::DomainError, id, x);
        return std::log(a);
      case Builtin::Sin: return finite(std::sin(a), id, x);
      case Builtin::Cos: return finite(std::cos(a), id, x);
      case Builtin::Atan: return std::atan(a);
      default: break;
    }
    throw Error("unhandled builtin");
  }

  bool eval_bool(NodeId id, std::span<const double> x) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    switch (n.op) {
      case Op::Less: return eval(n.args[0], x) < eval(n.args[1], x);
      case Op::LessEq: return eval(n.args[0], x) <= eval(n.args[1], x);
      case Op::Greater: return eval(n.args[0], x) > eval(n.args[1], x);
      case Op::GreaterEq: return eval(n.args[0], x) >= eval(n.args[1], x);
      case Op::Equal: return eval(n.args[0], x) == eval(n.args[1], x);
      case Op::NotEqual: return eval(n.args[0], x) != eval(n.args[1], x);
      case Op::And: return eval_bool(n.args[0], x) && eval_bool(n.args[1], x);
      case Op::Or: return eval_bool(n.args[0], x) || eval_bool(n.args[1], x);
      case Op::Not: return !eval_bool(n.args[0], x);
      default: throw Error("value node used as a condition");
    }
  }

  static std::string number(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, std::abs(v));
    std::string s(buf, res.ptr);
    return v < 0.0 || std::signbit(v) ? "(-" + s + ")" : s;
  }

  std::string print(NodeId id) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    auto bin = [&](std::string_view op) {
      return "(" + print(n.args[0]) + " " + std::string(op) + " " + print(n.args[1]) + ")";
    };
    switch (n.op) {
      case Op::Literal: return number(n.value);
      case Op::Variable: return "x" + std::to_string(n.var + 1);
      case Op::Neg: return "(-" + print(n.args[0]) + ")";
      case Op::Add: return bin("+");
      case Op::Sub: return bin("-");
      case Op::Mul: return bin("*");
      case Op::Div: return bin("/");
      case Op::Pow: return bin("^");
      case Op::Call: {
        static constexpr std::string_view names[] = {"sqrt", "abs", "exp", "ln", "sin",
                                                     "cos",  "atan", "min", "max", "pi"};
        std::string out(names[static_cast<int>(n.fn)]);
        if (n.fn == Builtin::Pi) return out;
        out += "(";
        for (std::size_t i = 0; i < n.args.size(); ++i) {
          if (i) out += ", ";
          out += print(n.args[i]);
        }
        return out + ")";
      }
      case Op::If:
        return "(if " + print(n.args[0]) + " then " + print(n.args[1]) + " else " + print(n.args[2]) + ")";
      case Op::Less: return print(n.args[0]) + " < " + print(n.args[1]);
      case Op::LessEq: return print(n.args[0]) + " <= " + print(n.args[1]);
      case Op::Greater: return print(n.args[0]) + " > " + print(n.args[1]);
      case Op::GreaterEq: return print(n.args[0]) + " >= " + print(n.args[1]);
      case Op::Equal: return print(n.args[0]) + " == " + print(n.args[1]);
      case Op::NotEqual: return print(n.args[0]) + " != " + print(n.args[1]);
      case Op::And: return print(n.args[0]) + " and " + print(n.args[1]);
      case Op::Or: return print(n.args[0]) + " or " + print(n.args[1]);
      case Op::Not: return "not " + print(n.args[0]);
    }
    return {};
  }

  std::vector<Node> nodes_;
  std::vector<NodeId> roots_;
  std::size_t arity_ = 0;
};

namespace detail {

enum class Tok : std::uint8_t {
  End, Number, Ident, Var, LParen, RParen, Comma, Plus, Minus, Star, Slash, Caret,
  Less, LessEq, Greater, GreaterEq, Equal, NotEqual,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  std::size_t var = 0;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token tok;
      tok.line = line_;
      tok.column = column_;
      if (pos_ >= src_.size()) {
        out.push_back(tok);
        return out;
      }
      const char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) ||
          (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        lex_number(tok);
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        lex_word(tok);
      } else {
        lex_symbol(tok);
      }
      out.push_back(std::move(tok));
    }
  }

 private:
  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n; ++i, ++pos_) {
      if (src_[pos_] == '\n') {
        ++line_;
        column_ = 1;
      } else if ((static_cast<unsigned char>(src_[pos_]) & 0xC0) != 0x80) {
        ++column_;
      }
    }
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }

  void lex_number(Token& tok) {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    auto digits = [&] {
      while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
    };
    digits();
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      digits();
    }
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t probe = end + 1;
      if (probe < src_.size() && (src_[probe] == '+' || src_[probe] == '-')) ++probe;
      if (probe < src_.size() && std::isdigit(static_cast<unsigned char>(src_[probe]))) {
        end = probe;
        digits();
      }
    }
    tok.kind = Tok::Number;
    tok.text = std::string(src_.substr(start, end - start));
    auto res = std::from_chars(src_.data() + start, src_.data() + end, tok.number);
    if (res.ec != std::errc() || res.ptr != src_.data() + end || !std::isfinite(tok.number))
      throw ParseError("malformed number '" + tok.text + "'", tok.line, tok.column);
    advance(end - start);
  }

  void lex_word(Token& tok) {
    std::size_t end = pos_;
    while (end < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) ++end;
    tok.text = std::string(src_.substr(pos_, end - pos_));
    tok.kind = Tok::Ident;
    if (tok.text.size() > 1 && tok.text[0] == 'x' &&
        std::all_of(tok.text.begin() + 1, tok.text.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      tok.kind = Tok::Var;
      std::size_t index = 0;
      auto res = std::from_chars(tok.text.data() + 1, tok.text.data() + tok.text.size(), index);
      if (res.ec != std::errc()) throw ParseError("variable index out of range in '" + tok.text + "'", tok.line, tok.column);
      tok.var = index;
    }
    advance(end - pos_);
  }

  void lex_symbol(Token& tok) {
    const std::string_view rest = src_.substr(pos_);
    struct Sym {
      std::string_view text;
      Tok kind;
    };
    static constexpr Sym table[] = {
        {"<=", Tok::LessEq},    {">=", Tok::GreaterEq}, {"==", Tok::Equal},     {"!=", Tok::NotEqual},
        {"≤", Tok::LessEq}, {"≥", Tok::GreaterEq}, {"≠", Tok::NotEqual},
        {"<", Tok::Less},       {">", Tok::Greater},    {"=", Tok::Equal},      {"(", Tok::LParen},
        {")", Tok::RParen},     {",", Tok::Comma},      {"+", Tok::Plus},       {"-", Tok::Minus},
        {"*", Tok::Star},       {"/", Tok::Slash},      {"^", Tok::Caret},
    };
    for (const auto& sym : table) {
      if (rest.starts_with(sym.text)) {
        tok.kind = sym.kind;
        tok.text = std::string(sym.text);
        advance(sym.text.size());
        return;
      }
    }
    std::size_t len = 1;
    while (len < rest.size() && (static_cast<unsigned char>(rest[len]) & 0xC0) == 0x80) ++len;
    throw ParseError("unexpected character '" + std::string(rest.substr(0, len)) + "'", tok.line, tok.column);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

class Parser {
 public:
  Parser(std::string_view src, std::size_t arity) : tokens_(Lexer(src).run()), arity_(arity) {}

  Expression parse() {
    const NodeId root = expr();
    if (peek().kind != Tok::End) unexpected(peek());
    Expression e;
    e.nodes_ = std::move(nodes_);
    e.roots_ = {root};
    e.arity_ = arity_;
    return e;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& take() { return tokens_[pos_++]; }
  bool at_word(std::string_view w) const { return peek().kind == Tok::Ident && peek().text == w; }

  [[noreturn]] static void unexpected(const Token& tok) {
    if (tok.kind == Tok::End) throw ParseError("unexpected end of input", tok.line, tok.column);
    throw ParseError("syntax error: unexpected '" + tok.text + "'", tok.line, tok.column);
  }

  void expect_word(std::string_view w, std::string_view what) {
    if (!at_word(w)) {
      const Token& tok = peek();
      throw ParseError(std::string(what), tok.line, tok.column);
    }
    ++pos_;
  }

  void expect(Tok kind, std::string_view text) {
    if (peek().kind != kind) {
      const Token& tok = peek();
      if (tok.kind == Tok::End) throw ParseError("expected '" + std::string(text) + "' before end of input", tok.line, tok.column);
      throw ParseError("expected '" + std::string(text) + "' but found '" + tok.text + "'", tok.line, tok.column);
    }
    ++pos_;
  }

  NodeId add(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  NodeId add(Op op, std::vector<NodeId> args) {
    Node n;
    n.op = op;
    n.args = std::move(args);
    return add(std::move(n));
  }

  NodeId expr() {
    if (at_word("if")) {
      ++pos_;
      const NodeId cond = boolean();
      expect_word("then", "expected 'then' after condition");
      const NodeId a = expr();
      expect_word("else", "piecewise expression without 'else' branch");
      const NodeId b = expr();
      return add(Op::If, {cond, a, b});
    }
    return sum();
  }

  NodeId sum() {
    NodeId lhs = prod();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const Op op = take().kind == Tok::Plus ? Op::Add : Op::Sub;
      lhs = add(op, {lhs, prod()});
    }
    return lhs;
  }

  NodeId prod() {
    NodeId lhs = power();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const Op op = take().kind == Tok::Star ? Op::Mul : Op::Div;
      lhs = add(op, {lhs, power()});
    }
    return lhs;
  }

  NodeId power() {
    const NodeId base = unary();
    if (peek().kind == Tok::Caret) {
      ++pos_;
      return add(Op::Pow, {base, power()});
    }
    return base;
  }

  NodeId unary() {
    if (peek().kind == Tok::Minus) {
      ++pos_;
      return add(Op::Neg, {unary()});
    }
    return atom();
  }

  NodeId atom() {
    const Token& tok = peek();
    switch (tok.kind) {
      case Tok::Number: {
        ++pos_;
        Node n;
        n.value = tok.number;
        return add(std::move(n));
      }
      case Tok::Var: {
        ++pos_;
        if (tok.var == 0 || tok.var > arity_)
          throw ParseError("variable '" + tok.text + "' outside x1..x" + std::to_string(arity_), tok.line, tok.column);
        Node n;
        n.op = Op::Variable;
        n.var = tok.var - 1;
        return add(std::move(n));
      }
      case Tok::LParen: {
        ++pos_;
        const NodeId inner = expr();
        expect(Tok::RParen, ")");
        return inner;
      }
      case Tok::Ident: return call();
      default: unexpected(tok);
    }
  }

  NodeId call() {
    const Token& tok = take();
    struct Fn {
      std::string_view name;
      Builtin fn;
      std::size_t min_args;
      std::size_t max_args;
    };
    static constexpr Fn fns[] = {
        {"sqrt", Builtin::Sqrt, 1, 1}, {"abs", Builtin::Abs, 1, 1},   {"exp", Builtin::Exp, 1, 1},
        {"ln", Builtin::Ln, 1, 1},     {"sin", Builtin::Sin, 1, 1},   {"cos", Builtin::Cos, 1, 1},
        {"atan", Builtin::Atan, 1, 1}, {"min", Builtin::Min, 2, 64},  {"max", Builtin::Max, 2, 64},
        {"pi", Builtin::Pi, 0, 0},
    };
    const Fn* match = nullptr;
    for (const auto& f : fns)
      if (f.name == tok.text) match = &f;
    if (!match) {
      if (tok.text == "if" || tok.text == "then" || tok.text == "else" || tok.text == "and" ||
          tok.text == "or" || tok.text == "not")
        throw ParseError("syntax error: unexpected keyword '" + tok.text + "'", tok.line, tok.column);
      throw ParseError("unknown identifier '" + tok.text + "'", tok.line, tok.column);
    }
    Node n;
    n.op = Op::Call;
    n.fn = match->fn;
    if (match->fn == Builtin::Pi && peek().kind != Tok::LParen) return add(std::move(n));
    expect(Tok::LParen, "(");
    if (peek().kind != Tok::RParen) {
      n.args.push_back(expr());
      while (peek().kind == Tok::Comma) {
        ++pos_;
        n.args.push_back(expr());
      }
    }
    expect(Tok::RParen, ")");
    if (n.args.size() < match->min_args || n.args.size() > match->max_args)
      throw ParseError("wrong number of arguments to '" + tok.text + "'", tok.line, tok.column);
    return add(std::move(n));
  }

  NodeId boolean() {
    if (at_word("not")) {
      ++pos_;
      return add(Op::Not, {boolean()});
    }
    NodeId lhs = relation();
    while (at_word("and") || at_word("or")) {
      const Op op = take().text == "and" ? Op::And : Op::Or;
      lhs = add(op, {lhs, relation()});
    }
    return lhs;
  }

  NodeId relation() {
    const NodeId a = expr();
    Op op;
    switch (peek().kind) {
      case Tok::Less: op = Op::Less; break;
      case Tok::LessEq: op = Op::LessEq; break;
      case Tok::Greater: op = Op::Greater; break;
      case Tok::GreaterEq: op = Op::GreaterEq; break;
      case Tok::Equal: op = Op::Equal; break;
      case Tok::NotEqual: op = Op::NotEqual; break;
      default: {
        const Token& tok = peek();
        throw ParseError("expected comparison operator", tok.line, tok.column);
      }
    }
    ++pos_;
    return add(op, {a, expr()});
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t arity_;
  std::vector<Node> nodes_;
};

inline NodeId copy_subtree(std::vector<Node>& dst, const Expression& src, NodeId root,
                           std::span<const NodeId> var_map) {
  const Node& n = src.nodes()[static_cast<std::size_t>(root)];
  if (n.op == Op::Variable && !var_map.empty()) return var_map[n.var];
  Node copy = n;
  for (auto& a : copy.args) a = copy_subtree(dst, src, a, var_map);
  dst.push_back(std::move(copy));
  return static_cast<NodeId>(dst.size() - 1);
}

inline NodeId push(std::vector<Node>& dst, Op op, std::vector<NodeId> args) {
  Node n;
  n.op = op;
  n.args = std::move(args);
  dst.push_back(std::move(n));
  return static_cast<NodeId>(dst.size() - 1);
}

inline NodeId push_literal(std::vector<Node>& dst, double v) {
  Node n;
  n.value = v;
  dst.push_back(std::move(n));
  return static_cast<NodeId>(dst.size() - 1);
}

}  // namespace detail

/// Parses a scalar expression over variables x1..x{arity}.
inline Expression parse(std::string_view source, std::size_t arity) {
  return detail::Parser(source, arity).parse();
}

/// Parses one scalar expression per component into a vector expression.
inline Expression parse_vector(std::span<const std::string> sources, std::size_t arity) {
  if (sources.empty()) throw Error("vector expression needs at least one component");
  std::vector<Node> nodes;
  std::vector<NodeId> roots;
  for (const auto& src : sources) {
    const Expression part = parse(src, arity);
    roots.push_back(detail::copy_subtree(nodes, part, part.roots()[0], {}));
  }
  return Expression::from_nodes(std::move(nodes), std::move(roots), arity);
}

inline Expression constant(double c, std::size_t arity) {
  std::vector<Node> nodes;
  const NodeId root = detail::push_literal(nodes, c);
  return Expression::from_nodes(std::move(nodes), {root}, arity);
}

/// sum_i weights[i] * parts[i]; all parts scalar with equal arity.
inline Expression weighted_sum(std::span<const Expression> parts, std::span<const double> weights) {
  if (parts.empty() || parts.size() != weights.size()) throw Error("weighted_sum: parts and weights differ in length");
  std::vector<Node> nodes;
  NodeId acc = -1;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!parts[i].is_scalar() || parts[i].arity() != parts[0].arity()) throw Error("weighted_sum: incompatible parts");
    const NodeId w = detail::push_literal(nodes, weights[i]);
    const NodeId body = detail::copy_subtree(nodes, parts[i], parts[i].roots()[0], {});
    const NodeId term = detail::push(nodes, Op::Mul, {w, body});
    acc = acc < 0 ? term : detail::push(nodes, Op::Add, {acc, term});
  }
  return Expression::from_nodes(std::move(nodes), {acc}, parts[0].arity());
}

/// Pointwise maximum of scalar parts (a single part is returned unchanged).
inline Expression pointwise_max(std::span<const Expression> parts) {
  if (parts.empty()) throw Error("pointwise_max: empty list");
  if (parts.size() == 1) return parts[0];
  std::vector<Node> nodes;
  Node call;
  call.op = Op::Call;
  call.fn = Builtin::Max;
  for (const auto& p : parts) {
    if (!p.is_scalar() || p.arity() != parts[0].arity()) throw Error("pointwise_max: incompatible parts");
    call.args.push_back(detail::copy_subtree(nodes, p, p.roots()[0], {}));
  }
  nodes.push_back(std::move(call));
  return Expression::from_nodes(std::move(nodes), {static_cast<NodeId>(nodes.size() - 1)}, parts[0].arity());
}

/// outer(inner(x)) where outer has arity 1 and inner is scalar.
inline Expression compose(const Expression& outer, const Expression& inner) {
  if (outer.arity() != 1 || !outer.is_scalar() || !inner.is_scalar()) throw Error("compose: outer must be scalar of arity 1");
  std::vector<Node> nodes;
  const NodeId arg = detail::copy_subtree(nodes, inner, inner.roots()[0], {});
  const NodeId map[] = {arg};
  const NodeId root = detail::copy_subtree(nodes, outer, outer.roots()[0], map);
  return Expression::from_nodes(std::move(nodes), {root}, inner.arity());
}

/// scale * e + shift.
inline Expression affine(const Expression& e, double scale, double shift) {
  if (!e.is_scalar()) throw Error("affine: scalar expression required");
  std::vector<Node> nodes;
  const NodeId body = detail::copy_subtree(nodes, e, e.roots()[0], {});
  const NodeId s = detail::push_literal(nodes, scale);
  const NodeId scaled = detail::push(nodes, Op::Mul, {s, body});
  const NodeId c = detail::push_literal(nodes, shift);
  const NodeId root = detail::push(nodes, Op::Add, {scaled, c});
  return Expression::from_nodes(std::move(nodes), {root}, e.arity());
}

struct Gradient {
  Point value;
  bool non_smooth = false;
};

/// Central-difference gradient of a scalar expression. The per-coordinate
/// step is rel_step * max(1, |x_i|). A coordinate whose forward and backward
/// one-sided estimates differ by more than 1e-3 * max(1, |fwd|, |bwd|) marks
/// the sample as non-smooth.
inline Gradient grad_fd(const Expression& e, std::span<const double> x, double rel_step = 1e-6) {
  if (!e.is_scalar()) throw Error("grad_fd needs a scalar expression");
  if (!(rel_step > 0.0)) throw Error("grad_fd step must be positive");
  Gradient g;
  g.value.resize(x.size());
  Point probe(x.begin(), x.end());
  const double f0 = e.value(probe);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double step = rel_step * std::max(1.0, std::abs(x[i]));
    const double up = x[i] + step;
    const double down = x[i] - step;
    probe[i] = up;
    const double fp = e.value(probe);
    probe[i] = down;
    const double fm = e.value(probe);
    probe[i] = x[i];
    const double hp = up - x[i];
    const double hm = x[i] - down;
    g.value[i] = (fp - fm) / (hp + hm);
    const double fwd = (fp - f0) / hp;
    const double bwd = (f0 - fm) / hm;
    if (std::abs(fwd - bwd) > 1e-3 * std::max({1.0, std::abs(fwd), std::abs(bwd)})) g.non_smooth = true;
  }
  return g;
}

}  // namespace sei
