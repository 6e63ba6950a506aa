#include <cmath>

#include "doctest.h"
#include "tlsurf/error.hpp"
#include "tlsurf/pde.hpp"

using namespace tlsurf;

namespace {

GoursatProblem zero_problem(double L, std::size_t n) {
  GoursatProblem p;
  p.U = p.V = L;
  p.nu = p.nv = n;
  p.omega_u0.assign(n, 0.0);
  p.omega_0v.assign(n, 0.0);
  return p;
}

// omega* = sinh(u) sinh(v) solves omega_uv + cosh(omega) = cosh u cosh v + cosh(omega*).
GoursatProblem manufactured(std::size_t n) {
  GoursatProblem p = zero_problem(0.5, n);
  p.source = [](double u, double v) {
    return std::cosh(u) * std::cosh(v) + std::cosh(std::sinh(u) * std::sinh(v));
  };
  return p;
}

double manufactured_error(std::size_t n) {
  const ScalarGrid w = solve_cosh_gordon(manufactured(n));
  const GridSpec& g = w.spec();
  double e = 0.0;
  for (std::size_t j = 0; j < g.nv; ++j)
    for (std::size_t i = 0; i < g.nu; ++i)
      e = std::max(e, std::abs(w(i, j) - std::sinh(g.u(i)) * std::sinh(g.v(j))));
  return e;
}

}  // namespace

TEST_CASE("one cell from zero data") {
  const ScalarGrid w = solve_cosh_gordon(zero_problem(0.1, 2));
  CHECK(w(1, 1) == doctest::Approx(-0.01).epsilon(1e-3));
  CHECK(w(0, 0) == 0.0);
}

TEST_CASE("manufactured solution converges at second order") {
  const double e1 = manufactured_error(26), e2 = manufactured_error(51);
  CHECK(e1 < 1e-3);
  CHECK(e1 / e2 >= 3.5);
  CHECK(e1 / e2 <= 4.5);
}

TEST_CASE("bilinear manufactured solution is reproduced to corrector accuracy") {
  GoursatProblem p = zero_problem(0.5, 21);
  p.source = [](double u, double v) { return 1.0 + std::cosh(u * v); };
  const ScalarGrid w = solve_cosh_gordon(p);
  const GridSpec& g = w.spec();
  for (std::size_t j = 0; j < g.nv; ++j)
    for (std::size_t i = 0; i < g.nu; ++i) CHECK(std::abs(w(i, j) - g.u(i) * g.v(j)) < 1e-9);
}

TEST_CASE("symmetric data give a symmetric solution") {
  GoursatProblem p = GoursatProblem::from_expressions(0.6, 0.6, 31, 31, parse("0.3*sin(3*u)"),
                                                      parse("0.3*sin(3*v)"));
  const ScalarGrid w = solve_cosh_gordon(p);
  for (std::size_t j = 0; j < 31; ++j)
    for (std::size_t i = 0; i < 31; ++i) CHECK(std::abs(w(i, j) - w(j, i)) <= 1e-12);
}

TEST_CASE("residuals of the cosh-Gordon solution") {
  const MaskedGrid r1 = cosh_gordon_residual(solve_cosh_gordon(zero_problem(0.5, 51)));
  const MaskedGrid r2 = cosh_gordon_residual(solve_cosh_gordon(zero_problem(0.5, 101)));
  CHECK(r1.max_abs() < 5e-3);
  CHECK(r1.max_abs() / r2.max_abs() >= 3.5);
  CHECK(r1.max_abs() / r2.max_abs() <= 4.5);
  CHECK(r1.count() == 49u * 49u);
}

TEST_CASE("constant curvature residual") {
  const ScalarGrid w1 = solve_cosh_gordon(zero_problem(0.5, 51));
  const ScalarGrid w2 = solve_cosh_gordon(zero_problem(0.5, 101));
  auto a_of = [](const ScalarGrid& w) {
    ScalarGrid a(w.spec());
    for (std::size_t k = 0; k < a.data().size(); ++k) a.data()[k] = std::sinh(w.data()[k]);
    return a;
  };
  const double r1 = constant_k_residual(a_of(w1)).max_abs(), r2 = constant_k_residual(a_of(w2)).max_abs();
  CHECK(r1 < 5e-3);
  CHECK(r1 / r2 >= 3.5);
  CHECK(r1 / r2 <= 4.5);
  const MaskedGrid z = constant_k_residual(ScalarGrid(w1.spec(), 0.0));
  for (std::size_t j = 1; j + 1 < 51; ++j)
    for (std::size_t i = 1; i + 1 < 51; ++i) CHECK(z.values(i, j) == 1.0);
}

TEST_CASE("minimal-case residual") {
  const GridSpec g{-0.3, 0.3, -0.3, 0.3, 61, 61};
  const ScalarGrid K = map_grid(g, [&](auto i, auto j) {
    const double w = 1 - g.u(i) * g.u(i) + g.v(j) * g.v(j);
    return 16 / (w * w * w * w);
  });
  CHECK(minimal_k_residual(K).max_abs() < 5e-3);
  const MaskedGrid c = minimal_k_residual(ScalarGrid(g, 1.0));
  CHECK(c.values(7, 9) == doctest::Approx(-2.0));
  ScalarGrid bad(g, 1.0);
  bad(4, 4) = 0.0;
  try {
    minimal_k_residual(bad);
    FAIL("expected NonPositiveK");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonPositiveK);
  }
}

TEST_CASE("Goursat data validation") {
  GoursatProblem p = zero_problem(0.5, 11);
  p.omega_0v[0] = 1e-6;
  CHECK_THROWS_AS(p.validate(), Error);
  GoursatProblem q = zero_problem(0.5, 11);
  q.omega_u0.pop_back();
  CHECK_THROWS_AS(solve_cosh_gordon(q), Error);
}

TEST_CASE("blow-up is reported") {
  GoursatProblem p = zero_problem(3.0, 31);
  p.source = [](double, double) { return 200.0; };
  try {
    solve_cosh_gordon(p);
    FAIL("expected Divergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Divergence);
  }
}
