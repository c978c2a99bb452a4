#pragma once

// Scalar expressions in the single variable t.
//
// Grammar (whitespace insignificant, no implicit multiplication):
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | 't' | 'pi' | 'e' | func '(' sum ')' | '(' sum ')'
//   func    := sin | cos | tan | exp | ln | sqrt | abs

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <system_error>

#include "lnstab/error.hpp"

namespace lnstab {

class Expression {
 public:
  enum class Kind { number, variable, constant, negate, add, subtract, multiply, divide, power, call };
  enum class Function { sin, cos, tan, exp, ln, sqrt, abs };
  enum class Constant { pi, e };

  struct Node {
    Kind kind = Kind::number;
    double value = 0.0;
    Function function = Function::sin;
    Constant constant = Constant::pi;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

  // Default-constructed expression is the literal 0.
  Expression() : root_(std::make_shared<const Node>()) {}

  static Expression number(double v) {
    if (!std::isfinite(v) || std::signbit(v)) throw InputError("expression literal must be finite and non-negative");
    Node n;
    n.kind = Kind::number;
    n.value = v;
    return Expression(std::make_shared<const Node>(std::move(n)));
  }

  static Expression variable() {
    Node n;
    n.kind = Kind::variable;
    return Expression(std::make_shared<const Node>(std::move(n)));
  }

  static Expression constant(Constant c) {
    Node n;
    n.kind = Kind::constant;
    n.constant = c;
    return Expression(std::make_shared<const Node>(std::move(n)));
  }

  static Expression negate(const Expression& operand) {
    Node n;
    n.kind = Kind::negate;
    n.lhs = operand.root_;
    return Expression(std::make_shared<const Node>(std::move(n)));
  }

  static Expression binary(Kind op, const Expression& lhs, const Expression& rhs) {
    if (!is_binary(op)) throw InputError("not a binary operator");
    Node n;
    n.kind = op;
    n.lhs = lhs.root_;
    n.rhs = rhs.root_;
    return Expression(std::make_shared<const Node>(std::move(n)));
  }

  static Expression call(Function f, const Expression& arg) {
    Node n;
    n.kind = Kind::call;
    n.function = f;
    n.lhs = arg.root_;
    return Expression(std::make_shared<const Node>(std::move(n)));
  }

  static constexpr bool is_binary(Kind k) {
    return k == Kind::add || k == Kind::subtract || k == Kind::multiply || k == Kind::divide ||
           k == Kind::power;
  }

  static constexpr std::string_view function_name(Function f) {
    constexpr std::array<std::string_view, 7> names{"sin", "cos", "tan", "exp", "ln", "sqrt", "abs"};
    return names[static_cast<std::size_t>(f)];
  }

  const Node& root() const noexcept { return *root_; }

  double eval(double t) const { return eval_node(*root_, t); }

  // Fully parenthesized text that parses back to an identical tree.
  std::string to_string() const {
    std::string out;
    write(*root_, out);
    return out;
  }

  std::size_t depth() const noexcept { return depth_of(*root_); }

  friend bool operator==(const Expression& a, const Expression& b) { return same(*a.root_, *b.root_); }

 private:
  explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

  static std::string describe(const Node& n) {
    std::string out;
    write(n, out);
    return out;
  }

  static double checked(const Node& n, double t, double v) {
    if (!std::isfinite(v)) throw DomainError(describe(n), t, "non-finite result");
    return v;
  }

  static double eval_node(const Node& n, double t) {
    switch (n.kind) {
      case Kind::number:
        return n.value;
      case Kind::variable:
        return t;
      case Kind::constant:
        return n.constant == Constant::pi ? std::numbers::pi : std::numbers::e;
      case Kind::negate:
        return -eval_node(*n.lhs, t);
      case Kind::add:
        return checked(n, t, eval_node(*n.lhs, t) + eval_node(*n.rhs, t));
      case Kind::subtract:
        return checked(n, t, eval_node(*n.lhs, t) - eval_node(*n.rhs, t));
      case Kind::multiply:
        return checked(n, t, eval_node(*n.lhs, t) * eval_node(*n.rhs, t));
      case Kind::divide: {
        const double num = eval_node(*n.lhs, t);
        const double den = eval_node(*n.rhs, t);
        if (den == 0.0) throw DomainError(describe(n), t, "division by zero");
        return checked(n, t, num / den);
      }
      case Kind::power: {
        const double base = eval_node(*n.lhs, t);
        const double exponent = eval_node(*n.rhs, t);
        if (base < 0.0 && std::trunc(exponent) != exponent)
          throw DomainError(describe(n), t, "negative base with non-integer exponent");
        return checked(n, t, std::pow(base, exponent));
      }
      case Kind::call:
        return eval_call(n, t);
    }
    return 0.0;
  }

  static double eval_call(const Node& n, double t) {
    const double x = eval_node(*n.lhs, t);
    switch (n.function) {
      case Function::sin:
        return std::sin(x);
      case Function::cos:
        return std::cos(x);
      case Function::tan:
        return checked(n, t, std::tan(x));
      case Function::exp:
        return checked(n, t, std::exp(x));
      case Function::ln:
        if (x <= 0.0) throw DomainError(describe(n), t, "logarithm of non-positive value");
        return std::log(x);
      case Function::sqrt:
        if (x < 0.0) throw DomainError(describe(n), t, "square root of negative value");
        return std::sqrt(x);
      case Function::abs:
        return std::abs(x);
    }
    return 0.0;
  }

  static void write(const Node& n, std::string& out) {
    switch (n.kind) {
      case Kind::number: {
        std::array<char, 64> buf{};
        auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), n.value);
        out.append(buf.data(), end);
        return;
      }
      case Kind::variable:
        out += 't';
        return;
      case Kind::constant:
        out += n.constant == Constant::pi ? "pi" : "e";
        return;
      case Kind::negate:
        out += "(-";
        write(*n.lhs, out);
        out += ')';
        return;
      case Kind::call:
        out += function_name(n.function);
        out += '(';
        write(*n.lhs, out);
        out += ')';
        return;
      default:
        break;
    }
    constexpr std::string_view ops = "+-*/^";
    const auto op = static_cast<std::size_t>(n.kind) - static_cast<std::size_t>(Kind::add);
    out += '(';
    write(*n.lhs, out);
    out += ops[op];
    write(*n.rhs, out);
    out += ')';
  }

  static std::size_t depth_of(const Node& n) {
    std::size_t d = 0;
    if (n.lhs) d = depth_of(*n.lhs);
    if (n.rhs) d = std::max(d, depth_of(*n.rhs));
    return d + 1;
  }

  static bool same(const Node& a, const Node& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
      case Kind::number:
        return a.value == b.value;
      case Kind::variable:
        return true;
      case Kind::constant:
        return a.constant == b.constant;
      case Kind::call:
        return a.function == b.function && same(*a.lhs, *b.lhs);
      case Kind::negate:
        return same(*a.lhs, *b.lhs);
      default:
        return same(*a.lhs, *b.lhs) && same(*a.rhs, *b.rhs);
    }
  }

  std::shared_ptr<const Node> root_;
};

namespace detail {

class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view text) : text_(text) {}

  Expression parse() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError(pos_, "empty expression");
    Expression e = sum();
    skip_space();
    if (pos_ != text_.size()) {
      if (text_[pos_] == ')') throw ParseError(pos_, "unbalanced ')'");
      throw ParseError(pos_, std::string("unexpected '") + text_[pos_] + "'");
    }
    return e;
  }

 private:
  using Kind = Expression::Kind;

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expression sum() {
    Expression lhs = product();
    for (;;) {
      if (accept('+'))
        lhs = Expression::binary(Kind::add, lhs, product());
      else if (accept('-'))
        lhs = Expression::binary(Kind::subtract, lhs, product());
      else
        return lhs;
    }
  }

  Expression product() {
    Expression lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = Expression::binary(Kind::multiply, lhs, unary());
      else if (accept('/'))
        lhs = Expression::binary(Kind::divide, lhs, unary());
      else
        return lhs;
    }
  }

  Expression unary() {
    if (accept('-')) return Expression::negate(unary());
    return power();
  }

  Expression power() {
    Expression base = primary();
    if (accept('^')) return Expression::binary(Kind::power, base, unary());
    return base;
  }

  Expression primary() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError(pos_, "expected operand but reached end of input");
    const char c = text_[pos_];
    if (c == '(') {
      const std::size_t open = pos_++;
      Expression inner = sum();
      if (!accept(')')) {
        skip_space();
        throw ParseError(pos_, "unbalanced '(' opened at offset " + std::to_string(open) + ", expected ')'");
      }
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError(pos_, std::string("expected operand, found '") + c + "'");
  }

  Expression number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_, ++n;
      return n;
    };
    std::size_t count = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      count += digits();
    }
    if (count == 0) throw ParseError(start, "malformed number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        digits();
      }
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc{} || ptr != text_.data() + pos_ || !std::isfinite(value))
      throw ParseError(start, "malformed number");
    return Expression::number(value);
  }

  Expression identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "t") return Expression::variable();
    if (name == "pi") return Expression::constant(Expression::Constant::pi);
    if (name == "e") return Expression::constant(Expression::Constant::e);
    for (int f = 0; f <= static_cast<int>(Expression::Function::abs); ++f) {
      const auto fn = static_cast<Expression::Function>(f);
      if (name != Expression::function_name(fn)) continue;
      skip_space();
      if (pos_ >= text_.size() || text_[pos_] != '(')
        throw ParseError(pos_, "function '" + std::string(name) + "' requires parentheses");
      const std::size_t open = pos_++;
      Expression arg = sum();
      if (!accept(')')) {
        skip_space();
        throw ParseError(pos_, "unbalanced '(' opened at offset " + std::to_string(open) + ", expected ')'");
      }
      return Expression::call(fn, arg);
    }
    throw ParseError(start, "unknown identifier '" + std::string(name) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Expression parse_expression(std::string_view text) { return detail::ExpressionParser(text).parse(); }

inline double eval(const Expression& e, double t) { return e.eval(t); }

inline std::string serialize(const Expression& e) { return e.to_string(); }

}  // namespace lnstab
