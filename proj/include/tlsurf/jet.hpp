#pragma once

namespace tlsurf {

/// A scalar carried together with its first and second partial derivatives
/// in the surface parameters (u, v). Arithmetic applies the product and
/// chain rules exactly, so composing jets yields exact partials up to
/// rounding.
struct Jet2 {
  double val = 0.0;
  double d_u = 0.0;
  double d_v = 0.0;
  double d_uu = 0.0;
  double d_uv = 0.0;
  double d_vv = 0.0;

  static constexpr Jet2 constant(double c) { return {c, 0, 0, 0, 0, 0}; }
  static constexpr Jet2 variable_u(double u) { return {u, 1, 0, 0, 0, 0}; }
  static constexpr Jet2 variable_v(double v) { return {v, 0, 1, 0, 0, 0}; }

  /// Composition g(x) for a univariate g given g(x.val), g', g''.
  constexpr Jet2 compose(double g0, double g1, double g2) const {
    return {g0,
            g1 * d_u,
            g1 * d_v,
            g2 * d_u * d_u + g1 * d_uu,
            g2 * d_u * d_v + g1 * d_uv,
            g2 * d_v * d_v + g1 * d_vv};
  }

  bool all_finite() const;
};

constexpr Jet2 operator-(const Jet2& a) {
  return {-a.val, -a.d_u, -a.d_v, -a.d_uu, -a.d_uv, -a.d_vv};
}

constexpr Jet2 operator+(const Jet2& a, const Jet2& b) {
  return {a.val + b.val,   a.d_u + b.d_u,   a.d_v + b.d_v,
          a.d_uu + b.d_uu, a.d_uv + b.d_uv, a.d_vv + b.d_vv};
}

constexpr Jet2 operator-(const Jet2& a, const Jet2& b) { return a + (-b); }

constexpr Jet2 operator*(const Jet2& a, const Jet2& b) {
  return {a.val * b.val,
          a.d_u * b.val + a.val * b.d_u,
          a.d_v * b.val + a.val * b.d_v,
          a.d_uu * b.val + 2.0 * a.d_u * b.d_u + a.val * b.d_uu,
          a.d_uv * b.val + a.d_u * b.d_v + a.d_v * b.d_u + a.val * b.d_uv,
          a.d_vv * b.val + 2.0 * a.d_v * b.d_v + a.val * b.d_vv};
}

constexpr Jet2 operator*(double s, const Jet2& a) {
  return {s * a.val, s * a.d_u, s * a.d_v, s * a.d_uu, s * a.d_uv, s * a.d_vv};
}

/// Reciprocal; the caller guarantees a.val != 0.
constexpr Jet2 reciprocal(const Jet2& a) {
  const double r = 1.0 / a.val;
  return a.compose(r, -r * r, 2.0 * r * r * r);
}

constexpr Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }

}  // namespace tlsurf
