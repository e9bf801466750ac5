#pragma once

// Arithmetic expressions for metric entries, map components and scalar
// fields. Identifiers: coordinates x1..x9 (u and v alias x1 and x2), the
// family parameter t, and named parameters bound at parse time.
//
//   expr   := term (('+' | '-') term)*
//   term   := signed (('*' | '/') signed)*
//   signed := ('-' | '+') signed | factor
//   factor := base ('^' signed)?
//   base   := number | ident | func '(' expr ')' | '(' expr ')'
//   func   := sin | cos | tan | exp | log | sqrt | abs

#include "beltrami/jet.hpp"
#include "beltrami/taylor.hpp"
#include "beltrami/types.hpp"

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <string>

namespace beltrami {

class ParseError : public InputError {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : InputError(message + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

using ParamMap = std::map<std::string, double>;

struct ExprNode {
  enum class Kind { Number, Coord, Time, Param, Neg, Add, Sub, Mul, Div, Pow, Func };
  enum class Fn { Sin, Cos, Tan, Exp, Log, Sqrt, Abs };

  Kind kind = Kind::Number;
  double value = 0.0;  // Number, Param
  int index = 0;       // Coord
  Fn fn = Fn::Sin;
  std::string name;    // Param, Func
  std::shared_ptr<const ExprNode> a, b;
};

class Expression {
 public:
  Expression() = default;

  const ExprNode& root() const { return *root_; }
  bool valid() const { return static_cast<bool>(root_); }
  // Highest coordinate index used plus one (0 for coordinate-free input).
  int coordinates() const { return coords_; }
  bool uses_t() const { return uses_t_; }

  template <typename S>
  S operator()(const VecX<S>& x, double t = 0.0) const {
    if (x.size() < coords_) throw InputError("expression needs more coordinates than given");
    return eval<S>(*root_, x, t);
  }

  // Fully parenthesised; parsing the result gives an equal tree.
  std::string to_string() const;

  friend bool operator==(const Expression& a, const Expression& b);

 private:
  friend Expression parse_expression(const std::string& src, const ParamMap& params);

  template <typename S>
  static S eval(const ExprNode& n, const VecX<S>& x, double t) {
    using K = ExprNode::Kind;
    switch (n.kind) {
      case K::Number:
      case K::Param:
        return S(n.value);
      case K::Coord:
        return x(n.index);
      case K::Time:
        return S(t);
      case K::Neg:
        return -eval<S>(*n.a, x, t);
      case K::Add:
        return eval<S>(*n.a, x, t) + eval<S>(*n.b, x, t);
      case K::Sub:
        return eval<S>(*n.a, x, t) - eval<S>(*n.b, x, t);
      case K::Mul:
        return eval<S>(*n.a, x, t) * eval<S>(*n.b, x, t);
      case K::Div:
        return eval<S>(*n.a, x, t) / eval<S>(*n.b, x, t);
      case K::Pow: {
        const S base = eval<S>(*n.a, x, t);
        using std::exp, std::log, std::pow;
        if (is_constant(*n.b)) {
          return pow(base, eval_constant(*n.b, t));
        }
        return exp(eval<S>(*n.b, x, t) * log(base));
      }
      case K::Func:
        return apply(n.fn, eval<S>(*n.a, x, t));
    }
    return S(0.0);
  }

  template <typename S>
  static S apply(ExprNode::Fn fn, const S& v) {
    using std::abs, std::cos, std::exp, std::log, std::sin, std::sqrt, std::tan;
    switch (fn) {
      case ExprNode::Fn::Sin: return sin(v);
      case ExprNode::Fn::Cos: return cos(v);
      case ExprNode::Fn::Tan: return tan(v);
      case ExprNode::Fn::Exp: return exp(v);
      case ExprNode::Fn::Log: return log(v);
      case ExprNode::Fn::Sqrt: return sqrt(v);
      case ExprNode::Fn::Abs: return abs(v);
    }
    return v;
  }

  static bool is_constant(const ExprNode& n);
  static double eval_constant(const ExprNode& n, double t);

  std::shared_ptr<const ExprNode> root_;
  int coords_ = 0;
  bool uses_t_ = false;
};

// Throws ParseError (syntax errors, unknown identifiers, wrong arity).
Expression parse_expression(const std::string& src, const ParamMap& params = {});

}  // namespace beltrami
