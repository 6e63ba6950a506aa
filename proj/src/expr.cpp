#include "tlsurf/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <vector>

#include <fmt/core.h>

#include "tlsurf/error.hpp"

namespace tlsurf {

bool Jet2::all_finite() const {
  return std::isfinite(val) && std::isfinite(d_u) && std::isfinite(d_v) &&
         std::isfinite(d_uu) && std::isfinite(d_uv) && std::isfinite(d_vv);
}

struct Expr::Node {
  Kind kind = Kind::Number;
  double value = 0.0;
  Function fn = Function::Sin;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
  bool depends = false;
};

namespace {

constexpr std::array<std::pair<std::string_view, Function>, 9> kFunctions{{
    {"sin", Function::Sin},
    {"cos", Function::Cos},
    {"tan", Function::Tan},
    {"sinh", Function::Sinh},
    {"cosh", Function::Cosh},
    {"tanh", Function::Tanh},
    {"exp", Function::Exp},
    {"log", Function::Log},
    {"sqrt", Function::Sqrt},
}};

std::optional<Function> lookup_function(std::string_view name) {
  for (const auto& [n, fn] : kFunctions) {
    if (n == name) return fn;
  }
  return std::nullopt;
}

std::string format_number(double x) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  (void)ec;
  return std::string(buf.data(), end);
}

}  // namespace

std::string_view to_string(Function fn) {
  for (const auto& [n, f] : kFunctions) {
    if (f == fn) return n;
  }
  return "?";
}

Expr::Expr() : Expr(number(0.0)) {}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::number(double value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::InvalidInput, "non-finite literal in expression");
  }
  if (std::signbit(value) && value != 0.0) return -number(-value);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Number;
  n->value = value == 0.0 ? 0.0 : value;
  return Expr(std::move(n));
}

Expr Expr::var_u() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::VarU;
  n->depends = true;
  return Expr(std::move(n));
}

Expr Expr::var_v() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::VarV;
  n->depends = true;
  return Expr(std::move(n));
}

Expr Expr::call(Function fn, Expr arg) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Call;
  n->fn = fn;
  n->depends = arg.node_->depends;
  n->a = std::move(arg.node_);
  return Expr(std::move(n));
}

namespace {

std::shared_ptr<Expr::Node> make_binary(Expr::Kind kind, std::shared_ptr<const Expr::Node> a,
                                        std::shared_ptr<const Expr::Node> b) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = kind;
  n->depends = a->depends || b->depends;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

}  // namespace

Expr Expr::pow(Expr base, Expr exponent) {
  return Expr(make_binary(Kind::Pow, std::move(base.node_), std::move(exponent.node_)));
}

Expr operator-(Expr a) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Expr::Kind::Neg;
  n->depends = a.node_->depends;
  n->a = std::move(a.node_);
  return Expr(std::move(n));
}

Expr operator+(Expr a, Expr b) {
  return Expr(make_binary(Expr::Kind::Add, std::move(a.node_), std::move(b.node_)));
}
Expr operator-(Expr a, Expr b) {
  return Expr(make_binary(Expr::Kind::Sub, std::move(a.node_), std::move(b.node_)));
}
Expr operator*(Expr a, Expr b) {
  return Expr(make_binary(Expr::Kind::Mul, std::move(a.node_), std::move(b.node_)));
}
Expr operator/(Expr a, Expr b) {
  return Expr(make_binary(Expr::Kind::Div, std::move(a.node_), std::move(b.node_)));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::number_value() const { return node_->value; }
Function Expr::function() const { return node_->fn; }
Expr Expr::lhs() const { return node_->a ? Expr(node_->a) : Expr(); }
Expr Expr::rhs() const { return node_->b ? Expr(node_->b) : Expr(); }
bool Expr::depends_on_parameters() const { return node_->depends; }

Expr Expr::substitute(const Expr& u_replacement, const Expr& v_replacement) const {
  switch (kind()) {
    case Kind::Number: return *this;
    case Kind::VarU: return u_replacement;
    case Kind::VarV: return v_replacement;
    case Kind::Neg: return -lhs().substitute(u_replacement, v_replacement);
    case Kind::Call: return call(function(), lhs().substitute(u_replacement, v_replacement));
    default: break;
  }
  Expr l = lhs().substitute(u_replacement, v_replacement);
  Expr r = rhs().substitute(u_replacement, v_replacement);
  return Expr(make_binary(kind(), std::move(l.node_), std::move(r.node_)));
}

std::string Expr::to_string() const {
  switch (kind()) {
    case Kind::Number: return format_number(node_->value);
    case Kind::VarU: return "u";
    case Kind::VarV: return "v";
    case Kind::Neg: return "(-" + lhs().to_string() + ")";
    case Kind::Call:
      return std::string(tlsurf::to_string(function())) + "(" + lhs().to_string() + ")";
    case Kind::Add: return "(" + lhs().to_string() + " + " + rhs().to_string() + ")";
    case Kind::Sub: return "(" + lhs().to_string() + " - " + rhs().to_string() + ")";
    case Kind::Mul: return "(" + lhs().to_string() + " * " + rhs().to_string() + ")";
    case Kind::Div: return "(" + lhs().to_string() + " / " + rhs().to_string() + ")";
    case Kind::Pow: return "(" + lhs().to_string() + "^" + rhs().to_string() + ")";
  }
  return {};
}

bool operator==(const Expr& a, const Expr& b) {
  const Expr::Node* x = a.node_.get();
  const Expr::Node* y = b.node_.get();
  if (x == y) return true;
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case Expr::Kind::Number: return x->value == y->value;
    case Expr::Kind::VarU:
    case Expr::Kind::VarV: return true;
    case Expr::Kind::Neg: return a.lhs() == b.lhs();
    case Expr::Kind::Call: return x->fn == y->fn && a.lhs() == b.lhs();
    default: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind;
  std::size_t pos;
  std::string_view text;
  double number = 0.0;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  auto is_alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  while (i < s.size()) {
    const char c = s[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_digit(c) || (c == '.' && i + 1 < s.size() && is_digit(s[i + 1]))) {
      while (i < s.size() && (is_digit(s[i]) || s[i] == '.')) ++i;
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        if (j < s.size() && is_digit(s[j])) {
          i = j;
          while (i < s.size() && is_digit(s[i])) ++i;
        }
      }
      Token t{Tok::Number, start, s.substr(start, i - start)};
      auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
      if (ec != std::errc() || ptr != t.text.data() + t.text.size() || !std::isfinite(t.number)) {
        throw ParseError(ErrorCode::SyntaxError,
                         fmt::format("malformed number '{}' at position {}", t.text, start), start);
      }
      out.push_back(t);
      continue;
    }
    if (is_alpha(c)) {
      while (i < s.size() && (is_alpha(s[i]) || is_digit(s[i]))) ++i;
      out.push_back({Tok::Ident, start, s.substr(start, i - start)});
      continue;
    }
    Tok k;
    switch (c) {
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '/': k = Tok::Slash; break;
      case '^': k = Tok::Caret; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case ',': k = Tok::Comma; break;
      default:
        throw ParseError(ErrorCode::SyntaxError,
                         fmt::format("unexpected character '{}' at position {}", c, start), start);
    }
    out.push_back({k, start, s.substr(start, 1)});
    ++i;
  }
  out.push_back({Tok::End, s.size(), {}});
  return out;
}

// Precedence, loosest first: + -, * /, unary -, ^ (right-associative).
class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

  Expr parse_all() {
    Expr e = expression();
    if (peek().kind != Tok::End) fail_unexpected();
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool accept(Tok k) {
    if (peek().kind == k) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail_unexpected() const {
    const Token& t = peek();
    if (t.kind == Tok::End) {
      throw ParseError(ErrorCode::SyntaxError,
                       fmt::format("unexpected end of expression at position {}", t.pos), t.pos);
    }
    throw ParseError(ErrorCode::SyntaxError,
                     fmt::format("unexpected token '{}' at position {}", t.text, t.pos), t.pos);
  }

  Expr expression() {
    Expr e = term();
    for (;;) {
      if (accept(Tok::Plus)) {
        e = e + term();
      } else if (accept(Tok::Minus)) {
        e = e - term();
      } else {
        return e;
      }
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      if (accept(Tok::Star)) {
        e = e * unary();
      } else if (accept(Tok::Slash)) {
        e = e / unary();
      } else {
        return e;
      }
    }
  }

  Expr unary() {
    if (accept(Tok::Minus)) return -unary();
    if (accept(Tok::Plus)) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept(Tok::Caret)) return Expr::pow(base, exponent());
    return base;
  }

  Expr exponent() {
    if (accept(Tok::Minus)) return -exponent();
    if (accept(Tok::Plus)) return exponent();
    return power();
  }

  Expr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number:
        next();
        return Expr::number(t.number);
      case Tok::LParen: {
        next();
        Expr e = expression();
        if (!accept(Tok::RParen)) {
          const Token& u = peek();
          throw ParseError(ErrorCode::SyntaxError,
                           fmt::format("expected ')' at position {}", u.pos), u.pos);
        }
        return e;
      }
      case Tok::Ident:
        return identifier();
      default:
        fail_unexpected();
    }
  }

  Expr identifier() {
    const Token t = next();
    if (t.text == "u") return Expr::var_u();
    if (t.text == "v") return Expr::var_v();
    if (t.text == "pi") return Expr::number(3.14159265358979323846);
    auto fn = lookup_function(t.text);
    if (!fn) {
      throw ParseError(ErrorCode::UnknownIdentifier,
                       fmt::format("unknown identifier '{}' at position {}", t.text, t.pos), t.pos);
    }
    if (!accept(Tok::LParen)) {
      const Token& u = peek();
      throw ParseError(ErrorCode::SyntaxError,
                       fmt::format("expected '(' after function '{}' at position {}", t.text, u.pos),
                       u.pos);
    }
    std::vector<Expr> args;
    if (peek().kind != Tok::RParen) {
      args.push_back(expression());
      while (accept(Tok::Comma)) args.push_back(expression());
    }
    if (!accept(Tok::RParen)) {
      const Token& u = peek();
      throw ParseError(ErrorCode::SyntaxError, fmt::format("expected ')' at position {}", u.pos),
                       u.pos);
    }
    if (args.size() != 1) {
      throw ParseError(ErrorCode::ArityMismatch,
                       fmt::format("function '{}' at position {} takes 1 argument, got {}", t.text,
                                   t.pos, args.size()),
                       t.pos);
    }
    return Expr::call(*fn, args.front());
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Evaluation

[[noreturn]] void domain_error(const std::string& what, const Expr& where) {
  throw Error(ErrorCode::DomainError, fmt::format("{} in '{}'", what, where.to_string()));
}

bool is_integer(double c) { return std::abs(c) < 1e9 && c == std::round(c); }

Jet2 power_const(const Jet2& x, double c, const Expr& where) {
  if (c == 0.0) return Jet2::constant(1.0);
  if (is_integer(c)) {
    if (x.val == 0.0 && c < 0.0) domain_error("negative power of zero", where);
    const double k1 = c * std::pow(x.val, c - 1.0);
    const double k2 = c == 1.0 ? 0.0 : c * (c - 1.0) * std::pow(x.val, c - 2.0);
    return x.compose(std::pow(x.val, c), k1, k2);
  }
  if (!(x.val > 0.0)) {
    domain_error(fmt::format("non-integer power {} of non-positive value {}", c, x.val), where);
  }
  const double p = std::pow(x.val, c);
  return x.compose(p, c * p / x.val, c * (c - 1.0) * p / (x.val * x.val));
}

Jet2 apply_function(Function fn, const Jet2& x, const Expr& where) {
  const double t = x.val;
  switch (fn) {
    case Function::Sin: return x.compose(std::sin(t), std::cos(t), -std::sin(t));
    case Function::Cos: return x.compose(std::cos(t), -std::sin(t), -std::cos(t));
    case Function::Tan: {
      const double c = std::cos(t);
      if (std::abs(c) < 1e-300) domain_error("tan at a pole", where);
      const double tn = std::tan(t);
      const double sec2 = 1.0 / (c * c);
      return x.compose(tn, sec2, 2.0 * tn * sec2);
    }
    case Function::Sinh: return x.compose(std::sinh(t), std::cosh(t), std::sinh(t));
    case Function::Cosh: return x.compose(std::cosh(t), std::sinh(t), std::cosh(t));
    case Function::Tanh: {
      const double th = std::tanh(t);
      const double s2 = 1.0 - th * th;
      return x.compose(th, s2, -2.0 * th * s2);
    }
    case Function::Exp: {
      const double e = std::exp(t);
      return x.compose(e, e, e);
    }
    case Function::Log:
      if (!(t > 0.0)) domain_error(fmt::format("log of non-positive value {}", t), where);
      return x.compose(std::log(t), 1.0 / t, -1.0 / (t * t));
    case Function::Sqrt: {
      if (!(t > 0.0)) domain_error(fmt::format("sqrt of non-positive value {}", t), where);
      const double s = std::sqrt(t);
      return x.compose(s, 0.5 / s, -0.25 / (s * t));
    }
  }
  return x;
}

Jet2 eval_node(const Expr& e, double u, double v) {
  Jet2 r;
  switch (e.kind()) {
    case Expr::Kind::Number: return Jet2::constant(e.number_value());
    case Expr::Kind::VarU: return Jet2::variable_u(u);
    case Expr::Kind::VarV: return Jet2::variable_v(v);
    case Expr::Kind::Neg: r = -eval_node(e.lhs(), u, v); break;
    case Expr::Kind::Add: r = eval_node(e.lhs(), u, v) + eval_node(e.rhs(), u, v); break;
    case Expr::Kind::Sub: r = eval_node(e.lhs(), u, v) - eval_node(e.rhs(), u, v); break;
    case Expr::Kind::Mul: r = eval_node(e.lhs(), u, v) * eval_node(e.rhs(), u, v); break;
    case Expr::Kind::Div: {
      const Jet2 den = eval_node(e.rhs(), u, v);
      if (den.val == 0.0) domain_error("division by zero", e);
      r = eval_node(e.lhs(), u, v) / den;
      break;
    }
    case Expr::Kind::Pow: {
      const Jet2 base = eval_node(e.lhs(), u, v);
      if (!e.rhs().depends_on_parameters()) {
        r = power_const(base, eval_node(e.rhs(), u, v).val, e);
      } else {
        if (!(base.val > 0.0)) {
          domain_error(fmt::format("variable power of non-positive value {}", base.val), e);
        }
        const Jet2 ex = eval_node(e.rhs(), u, v);
        const Jet2 lg = base.compose(std::log(base.val), 1.0 / base.val,
                                     -1.0 / (base.val * base.val));
        const Jet2 prod = ex * lg;
        const double ev = std::exp(prod.val);
        r = prod.compose(ev, ev, ev);
      }
      break;
    }
    case Expr::Kind::Call: r = apply_function(e.function(), eval_node(e.lhs(), u, v), e); break;
  }
  if (!r.all_finite()) domain_error("non-finite result", e);
  return r;
}

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

Jet2 eval_jet2(const Expr& e, double u, double v) { return eval_node(e, u, v); }

double eval(const Expr& e, double u, double v) { return eval_node(e, u, v).val; }

}  // namespace tlsurf
