#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "tlsurf/error.hpp"
#include "tlsurf/invariants.hpp"

using namespace tlsurf;
using namespace testsupport;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidInput;
}

struct Samples {
  ScalarGrid a, alpha, g1, g2, sE, sG;
};

// Closed-form Enneper samples.
Samples enneper_samples(const GridSpec& g) {
  Samples s{ScalarGrid(g), ScalarGrid(g), ScalarGrid(g), ScalarGrid(g), ScalarGrid(g), ScalarGrid(g)};
  for (std::size_t j = 0; j < g.nv; ++j)
    for (std::size_t i = 0; i < g.nu; ++i) {
      const EnneperClosedForm o = enneper_closed_form(g.u(i), g.v(j));
      s.a(i, j) = 0.0;
      s.alpha(i, j) = o.alpha;
      s.g1(i, j) = o.gamma1;
      s.g2(i, j) = o.gamma2;
      s.sE(i, j) = o.s;
      s.sG(i, j) = o.s;
    }
  return s;
}

InvariantField field_of(const Samples& s) {
  return InvariantField::from_samples(s.a, s.alpha, s.g1, s.g2, s.sE, s.sG);
}

}  // namespace

TEST_CASE("invariants of the Enneper surface") {
  const SurfaceDef s = enneper_pos(square(0.3, 11));
  const InvariantPoint o = invariants_at(s, 0, 0);
  CHECK(o.a == doctest::Approx(0.0));
  CHECK(o.alpha == doctest::Approx(4.0));
  CHECK(o.f == doctest::Approx(-std::log(2.0)));
  CHECK(o.gamma1 == doctest::Approx(0.0));
  CHECK(o.gamma2 == doctest::Approx(0.0));

  const InvariantPoint p = invariants_at(s, 0.1, 0.2);
  CHECK(p.a == doctest::Approx(0.0));
  CHECK(p.alpha == doctest::Approx(3.7704).epsilon(1e-4));
  CHECK(p.gamma1 == doctest::Approx(0.75408).epsilon(1e-4));
  CHECK(p.gamma2 == doctest::Approx(-0.37704).epsilon(1e-4));
  const EnneperClosedForm c = enneper_closed_form(0.1, 0.2);
  CHECK(p.alpha == doctest::Approx(c.alpha).epsilon(1e-12));
  CHECK(p.gamma1 == doctest::Approx(c.gamma1).epsilon(1e-8));
  CHECK(p.gamma2 == doctest::Approx(c.gamma2).epsilon(1e-8));
  CHECK(p.gamma_crosscheck < 1e-8);
  CHECK(p.gauss_curvature() == doctest::Approx(c.K));
  CHECK(p.mean_curvature() == doctest::Approx(0.0));
}

TEST_CASE("f is minus the log of the fourth root of K") {
  for (auto [a, al] : {std::pair{0.0, 4.0}, std::pair{0.7, 1.3}, std::pair{-2.0, 0.2}}) {
    const double K = al * al / (1 + a * a);
    CHECK(f_from(a, al) == doctest::Approx(-0.25 * std::log(K)));
  }
}

TEST_CASE("barred invariants") {
  InvariantPoint p;
  p.a = 0.75;
  p.alpha = 2.5;
  p.gamma1 = 1.0;
  p.gamma2 = -2.0;
  const BarredInvariants b = p.barred();
  CHECK(b.gamma1 == doctest::Approx(1.25));
  CHECK(b.gamma2 == doctest::Approx(-2.5));
  CHECK(b.alpha == doctest::Approx(2.0));
}

TEST_CASE("a vanishes where F does") {
  const InvariantField fld = build_invariant_field(enneper_pos(square(0.3, 9)));
  for (const InvariantPoint& p : fld.points()) CHECK(std::abs(p.a) < 1e-14);
}

TEST_CASE("non-asymptotic and wrong-signature parametrizations") {
  CHECK(code_of([] { invariants_at(rotational({0.1, 0.7, -0.3, 0.3, 5, 5}), 0.4, 0); }) ==
        ErrorCode::NotAsymptotic);
  CHECK(code_of([] { invariants_at(make_surface("v^3/6 + u^2*v/2 - v/2", "u*v", "v^2*u/2 + u^3/6 + u/2", square(0.3, 5)), 0.1, 0.1); }) ==
        ErrorCode::WrongSignature);
  CHECK(code_of([] { build_invariant_field(rotational({0.1, 0.7, -0.3, 0.3, 5, 5})); }) ==
        ErrorCode::NotAsymptotic);
}

TEST_CASE("grid-derived field reproduces the pointwise one") {
  const GridSpec g = square(0.3, 61);
  const InvariantField pw = build_invariant_field(enneper_pos(g));
  const InvariantField sm = field_of(enneper_samples(g));
  CHECK(max_abs_diff(pw.component(&InvariantPoint::alpha), sm.component(&InvariantPoint::alpha)) < 1e-12);
  CHECK(max_abs_diff(pw.component(&InvariantPoint::gamma1), sm.component(&InvariantPoint::gamma1)) < 1e-8);
  CHECK(max_abs_diff(pw.component(&InvariantPoint::f), sm.component(&InvariantPoint::f)) < 1e-12);
  CHECK(max_abs_diff(pw.component(&InvariantPoint::f_u), sm.component(&InvariantPoint::f_u)) < 1e-3);
  CHECK(pw.alpha_sign() == 1);
}

TEST_CASE("compatibility residuals vanish for genuine data") {
  const InvariantField fld = field_of(enneper_samples(square(0.3, 61)));
  CHECK(gauss_residual(fld).max_abs() < 5e-3);
  CHECK(system_residual(fld).max_abs() < 5e-3);
  // Codazzi stays below the budget away from the corners of the patch.
  CHECK(codazzi_residual(field_of(enneper_samples(square(0.25, 51)))).max_abs() < 5e-3);
  CHECK(gauss_residual(fld).count() == 59u * 59u);
}

TEST_CASE("residuals converge at second order") {
  const InvariantField c = field_of(enneper_samples(square(0.3, 61)));
  const InvariantField f = field_of(enneper_samples(square(0.3, 121)));
  for (double r : {gauss_residual(c).max_abs() / gauss_residual(f).max_abs(),
                   codazzi_residual(c).max_abs() / codazzi_residual(f).max_abs(),
                   system_residual(c).max_abs() / system_residual(f).max_abs()}) {
    CHECK(r >= 3.5);
    CHECK(r <= 4.5);
  }
}

TEST_CASE("tampered data is caught") {
  const GridSpec g = square(0.3, 61);
  Samples s = enneper_samples(g);
  const InvariantField good = field_of(s);

  SUBCASE("alpha scaled by 1 + u/10") {
    Samples t = s;
    for (std::size_t j = 0; j < g.nv; ++j)
      for (std::size_t i = 0; i < g.nu; ++i) t.alpha(i, j) *= 1.0 + 0.1 * g.u(i);
    CHECK(gauss_residual(field_of(t)).max_abs() > 0.05);
  }
  SUBCASE("gamma1 shifted by 0.1") {
    Samples t = s;
    for (double& x : t.g1.data()) x += 0.1;
    const ResidualPair a = codazzi_residual(good), b = codazzi_residual(field_of(t));
    for (std::size_t j = 1; j + 1 < g.nv; ++j)
      for (std::size_t i = 1; i + 1 < g.nu; ++i) {
        CHECK(b.first.values(i, j) == doctest::Approx(a.first.values(i, j)).epsilon(1e-12));
        CHECK(b.second.values(i, j) - a.second.values(i, j) ==
              doctest::Approx(0.2 * s.alpha(i, j)).epsilon(1e-9));
      }
  }
  SUBCASE("constant first form with varying f") {
    Samples t = s;
    for (double& x : t.sE.data()) x = 1.0;
    for (double& x : t.sG.data()) x = 1.0;
    CHECK(system_residual(field_of(t)).max_abs() > 0.1);
  }
}

TEST_CASE("first-form inversion") {
  const EnneperClosedForm c = enneper_closed_form(0.1, 0.2);
  InvariantJet p;
  p.gamma1 = c.gamma1;
  p.gamma2 = c.gamma2;
  p.f_u = -0.1 / c.s;
  p.f_v = 0.2 / c.s;
  CHECK(p.f_u == doctest::Approx(-0.19417).epsilon(1e-4));
  CHECK(p.f_v == doctest::Approx(0.38835).epsilon(1e-4));
  const FirstFormRoots r = eg_from_invariants(p);
  CHECK(r.sqrtE == doctest::Approx(0.515));
  CHECK(r.sqrtMinusG == doctest::Approx(0.515));

  InvariantJet origin;
  CHECK(code_of([&] { eg_from_invariants(origin); }) == ErrorCode::DegenerateDenominator);

  // a = 0 with f_u f_v > 0 and consistent gammas always gives positive roots.
  for (double sE : {0.3, 1.0, 2.5})
    for (double sG : {0.4, 1.7}) {
      InvariantJet q;
      q.f_u = 0.3;
      q.f_v = 0.8;
      q.gamma2 = q.f_u / sE;
      q.gamma1 = q.f_v / sG;
      const FirstFormRoots rr = eg_from_invariants(q);
      CHECK(rr.sqrtE == doctest::Approx(sE));
      CHECK(rr.sqrtMinusG == doctest::Approx(sG));
    }
}

TEST_CASE("(a, alpha) from (K, H)") {
  const AsymptoticPair e = ah_from_kh(16, 0);
  CHECK(e.a == doctest::Approx(0.0));
  CHECK(e.alpha == doctest::Approx(4.0));
  const AsymptoticPair p = ah_from_kh(1, 1 / std::sqrt(2.0));
  CHECK(p.a == doctest::Approx(1.0));
  CHECK(p.alpha == doctest::Approx(std::sqrt(2.0)));
  const AsymptoticPair m = ah_from_kh(1, 1 / std::sqrt(2.0), Branch::Minus);
  CHECK(m.a == doctest::Approx(-1.0));
  CHECK(m.alpha == doctest::Approx(-std::sqrt(2.0)));
  CHECK(code_of([] { ah_from_kh(1, 1); }) == ErrorCode::MethodNotApplicable);
  CHECK(code_of([] { ah_from_kh(-1, 0); }) == ErrorCode::MethodNotApplicable);
  for (auto [K, H] : {std::pair{2.0, 0.3}, std::pair{0.5, -0.6}, std::pair{10.0, 3.0}}) {
    for (Branch b : {Branch::Plus, Branch::Minus}) {
      const AsymptoticPair r = ah_from_kh(K, H, b);
      const double q = 1 + r.a * r.a;
      CHECK(std::abs(r.alpha * r.alpha / q - K) < 1e-12 * K);
      CHECK(std::abs(r.a * r.alpha / q - H) < 1e-12);
    }
  }
}

TEST_CASE("field identities hold at every node") {
  // The bilinear patch (u, u v, v) is asymptotic with F != 0, so a and H do not vanish.
  for (const SurfaceDef& s : {enneper_pos(square(0.3, 21)), make_surface("u", "u*v", "v", square(0.3, 21))}) {
    const InvariantField fld = build_invariant_field(s);
    const GridSpec& g = fld.grid();
    for (std::size_t j = 0; j < g.nv; ++j)
      for (std::size_t i = 0; i < g.nu; ++i) {
        const InvariantPoint& p = fld.at(i, j);
        const CurvaturePair k = curvatures(forms_at(s, g.u(i), g.v(j)));
        CHECK(std::abs(p.gauss_curvature() - k.K) <= 1e-9 * std::max(1.0, std::abs(k.K)));
        CHECK(std::abs(p.mean_curvature() - k.H) <= 1e-9 * std::max(1.0, std::abs(k.H)));
        CHECK(std::abs(p.f + 0.25 * std::log(k.K)) < 1e-10);
        const BarredInvariants b = p.barred();
        const double r = std::sqrt(1 + p.a * p.a);
        CHECK(b.alpha * r == doctest::Approx(p.alpha));
        CHECK(b.gamma1 == doctest::Approx(p.gamma1 * r));
      }
  }
  const InvariantPoint q = invariants_at(make_surface("u", "u*v", "v", square(0.3, 21)), 0.2, 0.1);
  CHECK(std::abs(q.a) > 0.01);
}
