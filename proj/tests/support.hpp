#pragma once

#include <cmath>
#include <string>

#include "tlsurf/expr.hpp"
#include "tlsurf/grid.hpp"
#include "tlsurf/minkowski.hpp"
#include "tlsurf/surface.hpp"

namespace testsupport {

using namespace tlsurf;

inline SurfaceDef make_surface(const std::string& x, const std::string& y, const std::string& z,
                               GridSpec grid, double u0 = 0.0, double v0 = 0.0) {
  SurfaceDef s;
  s.coords = {parse(x), parse(y), parse(z)};
  s.grid = grid;
  s.u0 = u0;
  s.v0 = v0;
  return s;
}

inline GridSpec square(double half, std::size_t n) { return {-half, half, -half, half, n, n}; }

/// Enneper-type surface with K > 0 (asymptotic parameters, canonical).
inline SurfaceDef enneper_pos(GridSpec g) {
  return make_surface("u^3/6 + u*v^2/2 - u/2", "u*v", "u^2*v/2 + v^3/6 + v/2", g);
}

/// Enneper-type surface with K < 0.
inline SurfaceDef enneper_neg(GridSpec g) {
  return make_surface("v^3/6 + u^2*v/2 - v/2", "u^2/2 + v^2/2", "u^3/6 + u*v^2/2 + v^3/6 + u/2", g);
}

inline SurfaceDef rotational(GridSpec g) {
  return make_surface("u", "cos(u)*cosh(v)", "cos(u)*sinh(v)", g, g.u(g.nu / 2), g.v(g.nv / 2));
}

inline SurfaceDef lorentz_sphere(GridSpec g) {
  return make_surface("cosh(v)/cosh(u)", "tanh(u)", "sinh(v)/cosh(u)", g);
}

/// Hand-derived closed forms of the positive Enneper surface: with
/// s = (1 - u^2 + v^2)/2, E = s^2, G = -s^2, F = L = N = 0, M = 1.
struct EnneperClosedForm {
  double s, E, F, G, L, M, N, K, H, alpha, f, gamma1, gamma2;
};

inline EnneperClosedForm enneper_closed_form(double u, double v) {
  const double s = 0.5 * (1.0 - u * u + v * v);
  EnneperClosedForm c{};
  c.s = s;
  c.E = s * s;
  c.G = -s * s;
  c.M = 1.0;
  c.K = 1.0 / (s * s * s * s);
  c.alpha = 1.0 / (s * s);
  c.f = std::log(s);
  // gamma1 = f_v / sqrt(-G), gamma2 = f_u / sqrt(E) with f = log s.
  c.gamma1 = (v / s) / s;
  c.gamma2 = (-u / s) / s;
  return c;
}

/// Closed-form frame of the positive Enneper surface (z_u / s, z_v / s, n).
inline Frame enneper_frame(double u, double v) {
  const double s = 0.5 * (1.0 - u * u + v * v);
  const MVec3 zu{u * u / 2 + v * v / 2 - 0.5, v, u * v};
  const MVec3 zv{u * v, u, u * u / 2 + v * v / 2 + 0.5};
  Frame f{zu / s, zv / s, {}};
  // Euclidean cross product with the third component negated, normalized.
  const MVec3 c{f.x.x2 * f.y.x3 - f.x.x3 * f.y.x2, f.x.x3 * f.y.x1 - f.x.x1 * f.y.x3,
                -(f.x.x1 * f.y.x2 - f.x.x2 * f.y.x1)};
  const double q = c.x1 * c.x1 + c.x2 * c.x2 - c.x3 * c.x3;
  f.n = c / std::sqrt(q);
  return f;
}

inline double max_abs_diff(const ScalarGrid& a, const ScalarGrid& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

}  // namespace testsupport
