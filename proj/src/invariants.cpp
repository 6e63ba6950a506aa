#include "tlsurf/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "tlsurf/error.hpp"

namespace tlsurf {

double f_from(double a, double alpha) {
  return 0.5 * (std::log(std::sqrt(1.0 + a * a)) - std::log(std::abs(alpha)));
}

BarredInvariants InvariantPoint::barred() const {
  const double r = std::sqrt(1.0 + a * a);
  return {gamma1 * r, gamma2 * r, alpha / r};
}

double InvariantPoint::gauss_curvature() const { return alpha * alpha / (1.0 + a * a); }
double InvariantPoint::mean_curvature() const { return a * alpha / (1.0 + a * a); }

namespace {

struct PointCore {
  SurfaceDerivatives d;
  FormCoefficients forms;
  double sE = 0.0, sG = 0.0, a = 0.0, alpha = 0.0;
};

PointCore core_at(const SurfaceDef& s, double u, double v, const InvariantOptions& opts) {
  PointCore c;
  c.d = derivatives_at(s, u, v);
  c.forms = forms_from_derivatives(c.d);
  const FormCoefficients& f = c.forms;
  const double scale = std::max({std::abs(f.E), std::abs(f.F), std::abs(f.G), std::abs(f.M)});
  if (std::abs(f.L) + std::abs(f.N) > opts.asymptotic_tolerance * scale) {
    throw Error(ErrorCode::NotAsymptotic,
                fmt::format("L = {:.3e}, N = {:.3e} at ({}, {}); parameters are not asymptotic", f.L,
                            f.N, u, v));
  }
  if (!(f.E > 0.0) || !(f.G < 0.0)) {
    throw Error(ErrorCode::WrongSignature,
                fmt::format("E = {}, G = {} at ({}, {}); need E > 0, G < 0", f.E, f.G, u, v));
  }
  c.sE = std::sqrt(f.E);
  c.sG = std::sqrt(-f.G);
  c.a = f.F / (c.sE * c.sG);
  c.alpha = f.M / (c.sE * c.sG);
  if (c.alpha == 0.0) {
    throw Error(ErrorCode::MethodNotApplicable, fmt::format("alpha = 0 (K = 0) at ({}, {})", u, v));
  }
  return c;
}

double f_at(const SurfaceDef& s, double u, double v, const InvariantOptions& opts) {
  const PointCore c = core_at(s, u, v, opts);
  return f_from(c.a, c.alpha);
}

}  // namespace

InvariantPoint invariants_at(const SurfaceDef& s, double u, double v, const InvariantOptions& opts) {
  const PointCore c = core_at(s, u, v, opts);
  const SurfaceDerivatives& d = c.d;
  const double sE = c.sE, sG = c.sG, a = c.a, q = 1.0 + a * a;

  // Exact first derivatives of the first form from the second-order jets.
  const double E_u = 2.0 * mdot(d.z_u, d.z_uu);
  const double E_v = 2.0 * mdot(d.z_u, d.z_uv);
  const double G_u = 2.0 * mdot(d.z_v, d.z_uv);
  const double G_v = 2.0 * mdot(d.z_v, d.z_vv);
  const double F_u = mdot(d.z_uu, d.z_v) + mdot(d.z_u, d.z_uv);
  const double F_v = mdot(d.z_uv, d.z_v) + mdot(d.z_u, d.z_vv);
  const double sE_u = E_u / (2.0 * sE), sE_v = E_v / (2.0 * sE);
  const double sG_u = -G_u / (2.0 * sG), sG_v = -G_v / (2.0 * sG);

  InvariantPoint p;
  p.a = a;
  p.alpha = c.alpha;
  p.f = f_from(a, c.alpha);
  p.sqrtE = sE;
  p.sqrtMinusG = sG;
  p.a_u = F_u / (sE * sG) - a * (sE_u / sE + sG_u / sG);
  p.a_v = F_v / (sE * sG) - a * (sE_v / sE + sG_v / sG);

  // f involves the second form, so its derivatives need third derivatives of
  // z; use fourth-order central differences instead.
  const double h = opts.fd_step;
  auto d4 = [&](auto&& fn) {
    return (-fn(2.0 * h) + 8.0 * fn(h) - 8.0 * fn(-h) + fn(-2.0 * h)) / (12.0 * h);
  };
  p.f_u = d4([&](double t) { return f_at(s, u + t, v, opts); });
  p.f_v = d4([&](double t) { return f_at(s, u, v + t, opts); });

  p.gamma1 = -p.a_u / (q * sE) + p.f_v / sG;
  p.gamma2 = p.a_v / (q * sG) + p.f_u / sE;

  const double g1_forms = -(p.a_u / sE + a * sG_u / (sE * sG) - sE_v / (sE * sG)) / q;
  const double g2_forms = (p.a_v / sG + a * sE_v / (sE * sG) + sG_u / (sE * sG)) / q;
  p.gamma_crosscheck = std::max(std::abs(p.gamma1 - g1_forms), std::abs(p.gamma2 - g2_forms));
  return p;
}

InvariantField::InvariantField(const GridSpec& grid, std::vector<InvariantPoint> points,
                               DerivativeSource source)
    : grid_(grid), points_(std::move(points)), source_(source) {
  if (points_.size() != grid_.size()) {
    throw Error(ErrorCode::InvalidInput, "invariant field size does not match its grid");
  }
}

InvariantField InvariantField::from_samples(const ScalarGrid& a, const ScalarGrid& alpha,
                                            const ScalarGrid& gamma1, const ScalarGrid& gamma2,
                                            const ScalarGrid& sqrtE, const ScalarGrid& sqrtMinusG) {
  const GridSpec& g = a.spec();
  for (const ScalarGrid* c : {&alpha, &gamma1, &gamma2, &sqrtE, &sqrtMinusG}) {
    if (!(c->spec() == g)) throw Error(ErrorCode::InvalidInput, "sample grids differ");
  }
  ScalarGrid f(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (alpha.data()[k] == 0.0) {
      throw Error(ErrorCode::MethodNotApplicable, "alpha vanishes in the sampled data");
    }
    f.data()[k] = f_from(a.data()[k], alpha.data()[k]);
  }
  const ScalarGrid a_u = derivative_u(a), a_v = derivative_v(a);
  const ScalarGrid f_u = derivative_u(f), f_v = derivative_v(f);
  std::vector<InvariantPoint> pts(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    InvariantPoint& p = pts[k];
    p.a = a.data()[k];
    p.alpha = alpha.data()[k];
    p.f = f.data()[k];
    p.gamma1 = gamma1.data()[k];
    p.gamma2 = gamma2.data()[k];
    p.sqrtE = sqrtE.data()[k];
    p.sqrtMinusG = sqrtMinusG.data()[k];
    p.a_u = a_u.data()[k];
    p.a_v = a_v.data()[k];
    p.f_u = f_u.data()[k];
    p.f_v = f_v.data()[k];
    p.gamma_crosscheck = std::numeric_limits<double>::quiet_NaN();
  }
  return InvariantField(g, std::move(pts), DerivativeSource::Grid);
}

ScalarGrid InvariantField::component(double InvariantPoint::*member) const {
  ScalarGrid out(grid_);
  for (std::size_t k = 0; k < points_.size(); ++k) out.data()[k] = points_[k].*member;
  return out;
}

InvariantField InvariantField::with_component(double InvariantPoint::*member,
                                              const ScalarGrid& values) const {
  if (!(values.spec() == grid_)) throw Error(ErrorCode::InvalidInput, "component grid differs");
  InvariantField out = *this;
  for (std::size_t k = 0; k < points_.size(); ++k) out.points_[k].*member = values.data()[k];
  return out;
}

int InvariantField::alpha_sign() const {
  bool pos = false, neg = false;
  for (const auto& p : points_) {
    if (p.alpha > 0.0) pos = true;
    else if (p.alpha < 0.0) neg = true;
    else throw Error(ErrorCode::MethodNotApplicable, "alpha vanishes on the patch");
  }
  if (pos && neg) throw Error(ErrorCode::MethodNotApplicable, "alpha changes sign on the patch");
  return pos ? 1 : -1;
}

InvariantField build_invariant_field(const SurfaceDef& s, const InvariantOptions& opts) {
  s.validate();
  const GridSpec& g = s.grid;
  std::vector<InvariantPoint> pts(g.size());
  for (std::size_t j = 0; j < g.nv; ++j) {
    for (std::size_t i = 0; i < g.nu; ++i) {
      try {
        pts[g.index(i, j)] = invariants_at(s, g.u(i), g.v(j), opts);
      } catch (const Error& e) {
        throw Error(e.code(), fmt::format("node ({}, {}): {}", i, j, e.what()));
      }
    }
  }
  InvariantField fld(g, std::move(pts), DerivativeSource::Pointwise);
  fld.alpha_sign();
  return fld;
}

namespace {

struct FieldGrids {
  ScalarGrid a, alpha, f, g1, g2, sE, sG;
  explicit FieldGrids(const InvariantField& fld)
      : a(fld.component(&InvariantPoint::a)),
        alpha(fld.component(&InvariantPoint::alpha)),
        f(fld.component(&InvariantPoint::f)),
        g1(fld.component(&InvariantPoint::gamma1)),
        g2(fld.component(&InvariantPoint::gamma2)),
        sE(fld.component(&InvariantPoint::sqrtE)),
        sG(fld.component(&InvariantPoint::sqrtMinusG)) {}
};

template <class F>
void for_interior(const GridSpec& g, F&& fn) {
  for (std::size_t j = 1; j + 1 < g.nv; ++j)
    for (std::size_t i = 1; i + 1 < g.nu; ++i) fn(i, j);
}

}  // namespace

MaskedGrid gauss_residual(const InvariantField& fld) {
  const FieldGrids F(fld);
  const ScalarGrid g2_u = derivative_u(F.g2), g1_v = derivative_v(F.g1);
  const ScalarGrid a_u = derivative_u(F.a), a_v = derivative_v(F.a), a_uv = derivative_uv(F.a);
  MaskedGrid r(fld.grid());
  for_interior(fld.grid(), [&](std::size_t i, std::size_t j) {
    const double a = F.a(i, j), al = F.alpha(i, j), g1 = F.g1(i, j), g2 = F.g2(i, j);
    const double sE = F.sE(i, j), sG = F.sG(i, j), q = 1.0 + a * a;
    const double xa = a_u(i, j) / sE, ya = a_v(i, j) / sG;
    const double res = g2_u(i, j) / sE - g1_v(i, j) / sG - 2.0 * a * g1 * g2 - g1 * g1 + g2 * g2 -
                       g1 * xa / q - g2 * ya / q - a_uv(i, j) / (q * sE * sG) +
                       a * xa * ya / (q * q) + al * al / q;
    r.set(i, j, res);
  });
  return r;
}

double ResidualPair::max_abs() const { return std::max(first.max_abs(), second.max_abs()); }

ResidualPair codazzi_residual(const InvariantField& fld) {
  const FieldGrids F(fld);
  const ScalarGrid al_u = derivative_u(F.alpha), al_v = derivative_v(F.alpha);
  const ScalarGrid a_u = derivative_u(F.a), a_v = derivative_v(F.a);
  ResidualPair r{MaskedGrid(fld.grid()), MaskedGrid(fld.grid())};
  for_interior(fld.grid(), [&](std::size_t i, std::size_t j) {
    const double a = F.a(i, j), al = F.alpha(i, j), g1 = F.g1(i, j), g2 = F.g2(i, j);
    const double sE = F.sE(i, j), sG = F.sG(i, j), q = 1.0 + a * a;
    const double xa = a_u(i, j) / sE, ya = a_v(i, j) / sG;
    r.first.set(i, j, al_u(i, j) / sE - (a * al * xa / q + 2.0 * al * (ya / q - g2)));
    r.second.set(i, j, al_v(i, j) / sG - (a * al * ya / q - 2.0 * al * (xa / q + g1)));
  });
  return r;
}

ResidualPair system_residual(const InvariantField& fld) {
  const FieldGrids F(fld);
  const ScalarGrid sE_v = derivative_v(F.sE), sG_u = derivative_u(F.sG);
  const ScalarGrid f_u = derivative_u(F.f), f_v = derivative_v(F.f);
  ResidualPair r{MaskedGrid(fld.grid()), MaskedGrid(fld.grid())};
  for_interior(fld.grid(), [&](std::size_t i, std::size_t j) {
    const double a = F.a(i, j), sE = F.sE(i, j), sG = F.sG(i, j);
    r.first.set(i, j, sE_v(i, j) - (f_v(i, j) * sE + a * f_u(i, j) * sG));
    r.second.set(i, j, sG_u(i, j) - (-a * f_v(i, j) * sE + f_u(i, j) * sG));
  });
  return r;
}

FirstFormRoots eg_from_invariants(const InvariantJet& p, const InversionOptions& opts) {
  const double q = 1.0 + p.a * p.a;
  const double num = p.a_u * p.a_v + q * q * p.f_u * p.f_v;
  const double den_e = q * (-p.a_v * p.gamma1 + q * p.f_v * p.gamma2);
  const double den_g = q * (p.a_u * p.gamma2 + q * p.f_u * p.gamma1);
  auto degenerate = [&](double den, double t1, double t2) {
    const double terms = q * (std::abs(t1) + std::abs(t2));
    return std::abs(den) <= opts.absolute_tolerance ||
           std::abs(den) <= opts.relative_tolerance * std::max(terms, std::abs(num));
  };
  if (degenerate(den_e, p.a_v * p.gamma1, q * p.f_v * p.gamma2) ||
      degenerate(den_g, p.a_u * p.gamma2, q * p.f_u * p.gamma1)) {
    throw Error(ErrorCode::DegenerateDenominator,
                fmt::format("first-form inversion is 0/0-degenerate (denominators {:.3e}, {:.3e})",
                            den_e, den_g));
  }
  FirstFormRoots r{num / den_e, num / den_g};
  if (!(r.sqrtE > 0.0) || !(r.sqrtMinusG > 0.0)) {
    throw Error(ErrorCode::NonPositiveResult,
                fmt::format("first-form inversion gave sqrtE = {}, sqrtMinusG = {}", r.sqrtE,
                            r.sqrtMinusG));
  }
  return r;
}

AsymptoticPair ah_from_kh(double K, double H, Branch branch) {
  const double d = K - H * H;
  if (!(K > 0.0) || !(d > 0.0)) {
    throw Error(ErrorCode::MethodNotApplicable,
                fmt::format("need K > 0 and K - H^2 > 0 (K = {}, K - H^2 = {})", K, d));
  }
  const double r = std::sqrt(d);
  const double s = branch == Branch::Plus ? 1.0 : -1.0;
  return {s * H / r, s * K / r};
}

}  // namespace tlsurf
