#include <cmath>

#include "doctest.h"
#include "tlsurf/error.hpp"
#include "tlsurf/expr.hpp"

using namespace tlsurf;

namespace {

ErrorCode parse_code(const char* text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.code();
  }
  FAIL("no parse error for " << text);
  return ErrorCode::InvalidInput;
}

// Central differences of eval, used as an independent check of the jets.
Jet2 numeric_jet(const Expr& e, double u, double v, double h = 1e-4) {
  auto f = [&](double x, double y) { return eval(e, x, y); };
  Jet2 j;
  j.val = f(u, v);
  j.d_u = (f(u + h, v) - f(u - h, v)) / (2 * h);
  j.d_v = (f(u, v + h) - f(u, v - h)) / (2 * h);
  j.d_uu = (f(u + h, v) - 2 * j.val + f(u - h, v)) / (h * h);
  j.d_vv = (f(u, v + h) - 2 * j.val + f(u, v - h)) / (h * h);
  j.d_uv = (f(u + h, v + h) - f(u + h, v - h) - f(u - h, v + h) + f(u - h, v - h)) / (4 * h * h);
  return j;
}

}  // namespace

TEST_CASE("parse builds the expected tree") {
  CHECK(parse("u") == Expr::var_u());
  CHECK(parse("v").kind() == Expr::Kind::VarV);
  const Expr e = parse("u^3/6 + u*v^2/2 - u/2");
  CHECK(e.kind() == Expr::Kind::Sub);
  CHECK(e.rhs() == Expr::var_u() / Expr::number(2.0));
  CHECK(parse("2^3^2") == Expr::pow(Expr::number(2), Expr::pow(Expr::number(3), Expr::number(2))));
  CHECK(eval(parse("-2^2"), 0, 0) == doctest::Approx(-4.0));
  CHECK(eval(parse("pi"), 0, 0) == doctest::Approx(M_PI));
  CHECK(eval(parse("1.5e1 - .5"), 0, 0) == doctest::Approx(14.5));
}

TEST_CASE("printing round-trips through the parser") {
  for (const char* text : {"u^3/6 + u*v^2/2 - u/2", "cos(u)*cosh(v)", "-(u - v)/sqrt(1 + u^2)",
                           "exp(-u)*log(2 + v)", "tanh(u - v)^2", "-3.25e-3*u"}) {
    const Expr e = parse(text);
    CHECK(parse(e.to_string()) == e);
  }
}

TEST_CASE("parse errors carry a code and an offset") {
  CHECK(parse_code("cos u cosh v") == ErrorCode::SyntaxError);
  CHECK(parse_code("2u") == ErrorCode::SyntaxError);
  CHECK(parse_code("u +") == ErrorCode::SyntaxError);
  CHECK(parse_code("(u") == ErrorCode::SyntaxError);
  CHECK(parse_code("") == ErrorCode::SyntaxError);
  CHECK(parse_code("w + 1") == ErrorCode::UnknownIdentifier);
  CHECK(parse_code("foo(u)") == ErrorCode::UnknownIdentifier);
  CHECK(parse_code("sin(u, v)") == ErrorCode::ArityMismatch);
  try {
    parse("u + * v");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 4);
  }
}

TEST_CASE("jets of the Enneper coordinate at the origin") {
  const Jet2 j = eval_jet2(parse("u^3/6 + u*v^2/2 - u/2"), 0, 0);
  CHECK(j.val == 0.0);
  CHECK(j.d_u == doctest::Approx(-0.5));
  CHECK(j.d_v == 0.0);
  CHECK(j.d_uu == 0.0);
  CHECK(j.d_uv == 0.0);
  CHECK(j.d_vv == 0.0);
}

TEST_CASE("jets of simple products") {
  const Jet2 a = eval_jet2(parse("u*v"), 2, 3);
  CHECK(a.val == 6.0);
  CHECK(a.d_u == 3.0);
  CHECK(a.d_v == 2.0);
  CHECK(a.d_uv == 1.0);
  CHECK(a.d_uu == 0.0);
  CHECK(a.d_vv == 0.0);

  const Jet2 b = eval_jet2(parse("cos(u)*cosh(v)"), 0, 0);
  CHECK(b.val == doctest::Approx(1.0));
  CHECK(b.d_u == doctest::Approx(0.0));
  CHECK(b.d_v == doctest::Approx(0.0));
  CHECK(b.d_uu == doctest::Approx(-1.0));
  CHECK(b.d_vv == doctest::Approx(1.0));
  CHECK(b.d_uv == doctest::Approx(0.0));
}

TEST_CASE("jets agree with finite differences") {
  const char* exprs[] = {"u^3/6 + u*v^2/2 - u/2", "cosh(v)/cosh(u)", "sinh(v)/cosh(u)",
                         "tan(u*v) + exp(u - v)", "log(2 + u*u)*sqrt(3 + v)", "tanh(u)^3 - sin(v)/u",
                         "u^v"};
  for (const char* text : exprs) {
    const Expr e = parse(text);
    for (auto [u, v] : {std::pair{0.3, 0.7}, std::pair{1.1, -0.4}}) {
      const Jet2 j = eval_jet2(e, u, v), n = numeric_jet(e, u, v);
      INFO(text << " at " << u << "," << v);
      CHECK(j.val == doctest::Approx(n.val).epsilon(1e-12));
      CHECK(j.d_u == doctest::Approx(n.d_u).epsilon(1e-6));
      CHECK(j.d_v == doctest::Approx(n.d_v).epsilon(1e-6));
      CHECK(j.d_uu == doctest::Approx(n.d_uu).epsilon(1e-4));
      CHECK(j.d_uv == doctest::Approx(n.d_uv).epsilon(1e-4));
      CHECK(j.d_vv == doctest::Approx(n.d_vv).epsilon(1e-4));
    }
  }
}

TEST_CASE("domain errors name the subexpression") {
  for (const char* text : {"log(u - 1)", "sqrt(u - 1)", "1/(u - v)"}) {
    try {
      eval(parse(text), 0.5, 0.5);
      FAIL("expected a domain error for " << text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DomainError);
    }
  }
}

TEST_CASE("substitution composes parametrizations") {
  const Expr e = parse("u^2 + 3*v");
  const Expr s = e.substitute(parse("2*u"), parse("u + v"));
  CHECK(eval(s, 0.5, 0.25) == doctest::Approx(1.0 + 2.25));
  CHECK_FALSE(parse("2 + pi").depends_on_parameters());
  CHECK(parse("2 + u").depends_on_parameters());
}
