#include "tlsurf/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "tlsurf/error.hpp"

namespace tlsurf {

void SurfaceDef::validate() const {
  grid.validate(2);
  if (u0 < grid.u_min || u0 > grid.u_max || v0 < grid.v_min || v0 > grid.v_max) {
    throw Error(ErrorCode::InvalidInput,
                fmt::format("base point ({}, {}) outside the domain", u0, v0));
  }
}

GridIndex SurfaceDef::base_index() const {
  auto i = grid.u_node(u0);
  auto j = grid.v_node(v0);
  if (!i || !j) {
    throw Error(ErrorCode::InvalidInput,
                fmt::format("base point ({}, {}) is not a grid node", u0, v0));
  }
  return {*i, *j};
}

SurfaceDerivatives derivatives_at(const SurfaceDef& s, double u, double v) {
  SurfaceDerivatives d;
  for (int k = 0; k < 3; ++k) {
    const Jet2 j = eval_jet2(s.coords[static_cast<std::size_t>(k)], u, v);
    d.z[k] = j.val;
    d.z_u[k] = j.d_u;
    d.z_v[k] = j.d_v;
    d.z_uu[k] = j.d_uu;
    d.z_uv[k] = j.d_uv;
    d.z_vv[k] = j.d_vv;
  }
  return d;
}

FormCoefficients forms_from_derivatives(const SurfaceDerivatives& d) {
  FormCoefficients f;
  f.E = mdot(d.z_u, d.z_u);
  f.F = mdot(d.z_u, d.z_v);
  f.G = mdot(d.z_v, d.z_v);
  const MVec3 w = mcross(d.z_u, d.z_v);
  const double wn = euclidean_norm(w);
  if (!(wn > 1e-12 * euclidean_norm(d.z_u) * euclidean_norm(d.z_v)) || wn == 0.0) {
    throw Error(ErrorCode::DegeneratePoint, "z_u and z_v are linearly dependent");
  }
  f.normal_type = causal_type(w);
  if (f.normal_type == CausalType::LightLike) {
    throw Error(ErrorCode::LightLikeNormal, "normal is light-like; cannot normalize");
  }
  const double q = mdot(w, w);
  // det[z_u, z_v, w] = <w, w>, so dividing by the signed norm keeps det > 0.
  f.n = w / (q > 0.0 ? std::sqrt(q) : -std::sqrt(-q));
  f.L = mdot(f.n, d.z_uu);
  f.M = mdot(f.n, d.z_uv);
  f.N = mdot(f.n, d.z_vv);
  return f;
}

FormCoefficients forms_at(const SurfaceDef& s, double u, double v) {
  return forms_from_derivatives(derivatives_at(s, u, v));
}

CurvaturePair curvatures(const FormCoefficients& f) {
  const double g = f.E * f.G - f.F * f.F;
  const double scale = std::max({f.E * f.E, f.F * f.F, f.G * f.G});
  if (!(std::abs(g) >= 1e-14 * scale) || g == 0.0) {
    throw Error(ErrorCode::SingularMetric, fmt::format("EG - F^2 = {:.3e} is singular", g));
  }
  CurvaturePair c;
  c.K = (f.L * f.N - f.M * f.M) / g;
  c.H = (f.E * f.N - 2.0 * f.F * f.M + f.G * f.L) / (2.0 * g);
  c.K_minus_H2 = c.K - c.H * c.H;
  return c;
}

const char* to_string(Sign s) {
  switch (s) {
    case Sign::Positive: return "positive";
    case Sign::Negative: return "negative";
    case Sign::Zero: return "zero";
    case Sign::Mixed: return "mixed";
  }
  return "?";
}

double Extrema::max_abs() const { return std::max(std::abs(min), std::abs(max)); }

namespace {

struct Tracker {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double x) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  Extrema get() const {
    if (lo > hi) return {};
    return {lo, hi};
  }
};

Sign sign_of(const Extrema& e, double zero_band) {
  if (e.min > zero_band) return Sign::Positive;
  if (e.max < -zero_band) return Sign::Negative;
  if (e.max_abs() <= zero_band) return Sign::Zero;
  return Sign::Mixed;
}

}  // namespace

ClassReport classify_patch(const SurfaceDef& s) {
  s.validate();
  ClassReport r;
  Tracker tE, tF, tG, tL, tM, tN, tK, tH, tD;
  std::size_t spacelike_normals = 0, timelike_normals = 0, evaluated = 0;
  std::size_t E_nonpos = 0, E_pos = 0, G_nonneg = 0, G_neg = 0;
  const GridSpec& g = s.grid;
  for (std::size_t j = 0; j < g.nv; ++j) {
    for (std::size_t i = 0; i < g.nu; ++i) {
      const double u = g.u(i), v = g.v(j);
      try {
        const FormCoefficients f = forms_at(s, u, v);
        const CurvaturePair c = curvatures(f);
        ++evaluated;
        tE.add(f.E);
        tF.add(f.F);
        tG.add(f.G);
        tL.add(f.L);
        tM.add(f.M);
        tN.add(f.N);
        tK.add(c.K);
        tH.add(c.H);
        tD.add(c.K_minus_H2);
        if (f.normal_type == CausalType::SpaceLike) ++spacelike_normals;
        else ++timelike_normals;
        (f.E > 0 ? E_pos : E_nonpos)++;
        (f.G < 0 ? G_neg : G_nonneg)++;
      } catch (const Error& e) {
        r.failures.push_back({{i, j}, u, v, e.what()});
      }
    }
  }
  r.E = tE.get();
  r.F = tF.get();
  r.G = tG.get();
  r.L = tL.get();
  r.M = tM.get();
  r.N = tN.get();
  r.K = tK.get();
  r.H = tH.get();
  r.K_minus_H2 = tD.get();
  if (evaluated == 0) {
    r.surface_type = "undefined";
    r.reasons.push_back("no evaluable grid node");
    return r;
  }

  r.scale = std::max({r.E.max_abs(), r.F.max_abs(), r.G.max_abs(), r.L.max_abs(), r.M.max_abs(),
                      r.N.max_abs()});
  const double zero = kVanishingTolerance * r.scale;
  const double curv_scale = std::max({r.K.max_abs(), r.H.max_abs() * r.H.max_abs(), 1e-300});
  const double curv_zero = kVanishingTolerance * curv_scale;

  r.surface_type = timelike_normals == 0 ? "time-like" : (spacelike_normals == 0 ? "space-like" : "mixed");
  r.K_sign = sign_of(r.K, curv_zero);
  r.K_minus_H2_sign = sign_of(r.K_minus_H2, curv_zero);
  r.asymptotic = r.L.max_abs() < zero && r.N.max_abs() < zero;
  r.principal = r.F.max_abs() < zero && r.M.max_abs() < zero;
  r.isotropic = r.E.max_abs() < zero && r.G.max_abs() < zero;
  r.E_positive = E_nonpos == 0;
  r.G_negative = G_nonneg == 0;
  r.E_sign_changes = (E_pos > 0 && E_nonpos > 0) ? std::min(E_pos, E_nonpos) : 0;
  r.G_sign_changes = (G_neg > 0 && G_nonneg > 0) ? std::min(G_neg, G_nonneg) : 0;

  const bool timelike = r.surface_type == "time-like";
  if (!r.failures.empty()) r.reasons.push_back("evaluation failed at some grid nodes");
  if (!timelike) r.reasons.push_back("surface is not time-like");
  if (r.K_sign != Sign::Positive) {
    r.reasons.push_back(r.K_sign == Sign::Negative ? "K<0" : "K>0 does not hold on the patch");
  }
  if (r.K_minus_H2_sign != Sign::Positive) {
    r.reasons.push_back(r.K_minus_H2_sign == Sign::Negative ? "K-H^2<0"
                                                            : "K-H^2>0 does not hold on the patch");
  }
  if (r.isotropic) r.reasons.push_back("parameters are isotropic (E=G=0)");
  if (!r.asymptotic) r.reasons.push_back("parameters are not asymptotic (L=N=0 fails)");
  if (!r.isotropic && (!r.E_positive || !r.G_negative)) {
    r.reasons.push_back("E>0, G<0 does not hold on the patch");
  }
  r.method_applicable = r.failures.empty() && timelike && r.K_sign == Sign::Positive &&
                        r.K_minus_H2_sign == Sign::Positive && r.asymptotic && r.E_positive &&
                        r.G_negative && !r.isotropic;
  return r;
}

Frame asymptotic_frame_at(const SurfaceDef& s, double u, double v) {
  const SurfaceDerivatives d = derivatives_at(s, u, v);
  const FormCoefficients f = forms_from_derivatives(d);
  if (!(f.E > 0.0) || !(f.G < 0.0)) {
    throw Error(ErrorCode::WrongSignature,
                fmt::format("E = {}, G = {} at ({}, {}); need E > 0, G < 0", f.E, f.G, u, v));
  }
  return {d.z_u / std::sqrt(f.E), d.z_v / std::sqrt(-f.G), f.n};
}

Grid<MVec3> sample_positions(const SurfaceDef& s) {
  Grid<MVec3> z(s.grid);
  for (std::size_t j = 0; j < s.grid.nv; ++j)
    for (std::size_t i = 0; i < s.grid.nu; ++i) {
      for (int k = 0; k < 3; ++k) {
        z(i, j)[k] = eval(s.coords[static_cast<std::size_t>(k)], s.grid.u(i), s.grid.v(j));
      }
    }
  return z;
}

SurfaceDef apply_motion(const SurfaceDef& s, const LorentzMotion& m) {
  SurfaceDef out = s;
  for (int r = 0; r < 3; ++r) {
    Expr e = Expr::number(m.b[r]);
    for (int c = 0; c < 3; ++c) {
      e = e + Expr::number(m.A(r, c)) * s.coords[static_cast<std::size_t>(c)];
    }
    out.coords[static_cast<std::size_t>(r)] = e;
  }
  return out;
}

SurfaceDef reparametrize(const SurfaceDef& s, const Expr& u_expr, const Expr& v_expr,
                         const GridSpec& new_grid, double u0, double v0) {
  SurfaceDef out;
  for (std::size_t k = 0; k < 3; ++k) out.coords[k] = s.coords[k].substitute(u_expr, v_expr);
  out.grid = new_grid;
  out.u0 = u0;
  out.v0 = v0;
  return out;
}

SampledCurvatures curvatures_from_positions(const Grid<MVec3>& z) {
  const GridSpec& g = z.spec();
  SampledCurvatures out{MaskedGrid(g), MaskedGrid(g)};
  const double hu = g.hu(), hv = g.hv();
  for (std::size_t j = 1; j + 1 < g.nv; ++j) {
    for (std::size_t i = 1; i + 1 < g.nu; ++i) {
      SurfaceDerivatives d;
      d.z = z(i, j);
      d.z_u = (z(i + 1, j) - z(i - 1, j)) / (2.0 * hu);
      d.z_v = (z(i, j + 1) - z(i, j - 1)) / (2.0 * hv);
      d.z_uu = (z(i + 1, j) - 2.0 * z(i, j) + z(i - 1, j)) / (hu * hu);
      d.z_vv = (z(i, j + 1) - 2.0 * z(i, j) + z(i, j - 1)) / (hv * hv);
      d.z_uv = (z(i + 1, j + 1) - z(i + 1, j - 1) - z(i - 1, j + 1) + z(i - 1, j - 1)) /
               (4.0 * hu * hv);
      try {
        const CurvaturePair c = curvatures(forms_from_derivatives(d));
        out.K.set(i, j, c.K);
        out.H.set(i, j, c.H);
      } catch (const Error&) {
        // degenerate node stays absent
      }
    }
  }
  return out;
}

}  // namespace tlsurf
