#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "tlsurf/jet.hpp"

namespace tlsurf {

enum class Function { Sin, Cos, Tan, Sinh, Cosh, Tanh, Exp, Log, Sqrt };

std::string_view to_string(Function fn);

/// Immutable expression tree over the surface parameters u and v.
///
/// Nodes are shared, so copying an Expr is cheap and evaluating the same tree
/// from several threads is safe. Equality is structural.
class Expr {
 public:
  enum class Kind { Number, VarU, VarV, Neg, Add, Sub, Mul, Div, Pow, Call };

  /// Defaults to the literal 0.
  Expr();

  /// Negative values are stored as a negated literal so that printing and
  /// re-parsing reproduces the same tree.
  static Expr number(double value);
  static Expr var_u();
  static Expr var_v();
  static Expr call(Function fn, Expr arg);
  static Expr pow(Expr base, Expr exponent);

  friend Expr operator-(Expr a);
  friend Expr operator+(Expr a, Expr b);
  friend Expr operator-(Expr a, Expr b);
  friend Expr operator*(Expr a, Expr b);
  friend Expr operator/(Expr a, Expr b);

  Kind kind() const;
  double number_value() const;   // Kind::Number only
  Function function() const;     // Kind::Call only
  Expr lhs() const;              // unary operand, call argument, or left child
  Expr rhs() const;              // right child of binary nodes

  bool depends_on_parameters() const;

  /// Replace u and v by the given expressions (used for reparametrizations).
  Expr substitute(const Expr& u_replacement, const Expr& v_replacement) const;

  /// Fully parenthesized text accepted by parse().
  std::string to_string() const;

  friend bool operator==(const Expr& a, const Expr& b);

  struct Node;  // opaque

 private:
  explicit Expr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

/// Parse an expression in u and v. Multiplication must be explicit and every
/// function call needs parentheses. Throws ParseError with the offending
/// character offset.
Expr parse(std::string_view text);

/// Value and exact first/second partials at (u, v). Throws Error(DomainError)
/// naming the subexpression when a partial function leaves its domain.
Jet2 eval_jet2(const Expr& e, double u, double v);

/// Plain value at (u, v); same domain rules as eval_jet2.
double eval(const Expr& e, double u, double v);

}  // namespace tlsurf
