#include "tlsurf/minkowski.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "tlsurf/error.hpp"

namespace tlsurf {

const char* to_string(CausalType type) {
  switch (type) {
    case CausalType::SpaceLike: return "space-like";
    case CausalType::TimeLike: return "time-like";
    case CausalType::LightLike: return "light-like";
  }
  return "?";
}

double mdot(const MVec3& x, const MVec3& y) { return x.x1 * y.x1 + x.x2 * y.x2 - x.x3 * y.x3; }

CausalType causal_type(const MVec3& x, double eps) {
  const double q = mdot(x, x);
  const double e2 = x.x1 * x.x1 + x.x2 * x.x2 + x.x3 * x.x3;
  if (std::abs(q) <= eps * e2) return CausalType::LightLike;
  return q > 0.0 ? CausalType::SpaceLike : CausalType::TimeLike;
}

MVec3 mcross(const MVec3& x, const MVec3& y) {
  // Euclidean cross product with the time component negated, so that
  // <w, z> = (x cross y) . z = det[x, y, z].
  return {x.x2 * y.x3 - x.x3 * y.x2, x.x3 * y.x1 - x.x1 * y.x3, -(x.x1 * y.x2 - x.x2 * y.x1)};
}

double det3(const MVec3& x, const MVec3& y, const MVec3& z) {
  return x.x1 * (y.x2 * z.x3 - y.x3 * z.x2) - y.x1 * (x.x2 * z.x3 - x.x3 * z.x2) +
         z.x1 * (x.x2 * y.x3 - x.x3 * y.x2);
}

double euclidean_norm(const MVec3& x) { return std::sqrt(x.x1 * x.x1 + x.x2 * x.x2 + x.x3 * x.x3); }

Mat3 Mat3::identity() { return diag(1.0, 1.0, 1.0); }

Mat3 Mat3::diag(double a, double b, double c) {
  Mat3 r;
  r(0, 0) = a;
  r(1, 1) = b;
  r(2, 2) = c;
  return r;
}

Mat3 Mat3::from_columns(const MVec3& c0, const MVec3& c1, const MVec3& c2) {
  Mat3 r;
  for (int k = 0; k < 3; ++k) {
    r(k, 0) = c0[k];
    r(k, 1) = c1[k];
    r(k, 2) = c2[k];
  }
  return r;
}

Mat3 Mat3::from_rows(const MVec3& r0, const MVec3& r1, const MVec3& r2) {
  return from_columns(r0, r1, r2).transposed();
}

Mat3 Mat3::transposed() const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
  return r;
}

double Mat3::det() const { return det3(column(0), column(1), column(2)); }

Mat3 Mat3::inverse() const {
  const double d = det();
  if (d == 0.0 || !std::isfinite(d)) throw Error(ErrorCode::InvalidInput, "singular 3x3 matrix");
  const Mat3& a = *this;
  Mat3 r;
  r(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  r(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
  r(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
  r(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
  r(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
  r(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
  r(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
  r(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
  r(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  return (1.0 / d) * r;
}

double Mat3::frobenius_norm() const {
  double s = 0.0;
  for (double x : m) s += x * x;
  return std::sqrt(s);
}

double Mat3::max_abs() const {
  double s = 0.0;
  for (double x : m) s = std::max(s, std::abs(x));
  return s;
}

Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
  return r;
}

MVec3 operator*(const Mat3& a, const MVec3& x) {
  return {a(0, 0) * x.x1 + a(0, 1) * x.x2 + a(0, 2) * x.x3,
          a(1, 0) * x.x1 + a(1, 1) * x.x2 + a(1, 2) * x.x3,
          a(2, 0) * x.x1 + a(2, 1) * x.x2 + a(2, 2) * x.x3};
}

Mat3 operator+(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (std::size_t k = 0; k < 9; ++k) r.m[k] = a.m[k] + b.m[k];
  return r;
}

Mat3 operator-(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (std::size_t k = 0; k < 9; ++k) r.m[k] = a.m[k] - b.m[k];
  return r;
}

Mat3 operator*(double s, const Mat3& a) {
  Mat3 r;
  for (std::size_t k = 0; k < 9; ++k) r.m[k] = s * a.m[k];
  return r;
}

Mat3 minkowski_metric() { return Mat3::diag(1.0, 1.0, -1.0); }

Mat3 gram(const Frame& f) {
  const MVec3 v[3] = {f.x, f.y, f.n};
  Mat3 g;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g(i, j) = mdot(v[i], v[j]);
  return g;
}

LorentzMotion LorentzMotion::inverse() const {
  // A^{-1} = eta A^T eta for Lorentz matrices.
  const Mat3 eta = minkowski_metric();
  LorentzMotion r;
  r.A = eta * A.transposed() * eta;
  r.b = -(r.A * b);
  return r;
}

LorentzMotion LorentzMotion::compose(const LorentzMotion& other) const {
  return {A * other.A, A * other.b + b};
}

double LorentzMotion::metric_defect() const {
  const Mat3 eta = minkowski_metric();
  return (A.transposed() * eta * A - eta).max_abs();
}

Mat3 boost(int spatial_axis, double rapidity) {
  Mat3 r = Mat3::identity();
  const int k = spatial_axis == 0 ? 0 : 1;
  r(k, k) = std::cosh(rapidity);
  r(2, 2) = std::cosh(rapidity);
  r(k, 2) = std::sinh(rapidity);
  r(2, k) = std::sinh(rapidity);
  return r;
}

Mat3 rotation12(double angle) {
  Mat3 r = Mat3::identity();
  r(0, 0) = std::cos(angle);
  r(0, 1) = -std::sin(angle);
  r(1, 0) = std::sin(angle);
  r(1, 1) = std::cos(angle);
  return r;
}

LorentzMotion motion_from_frames(const Frame& source, const MVec3& zs, const Frame& target,
                                 const MVec3& zt, double tol) {
  const Mat3 gs = gram(source);
  const Mat3 gt = gram(target);
  const double mismatch = (gs - gt).max_abs();
  if (!(mismatch <= tol)) {
    throw Error(ErrorCode::FrameIncompatible,
                fmt::format("frame Gram matrices differ by {:.3e} (tolerance {:.1e})", mismatch, tol));
  }
  const Mat3 fs = Mat3::from_columns(source.x, source.y, source.n);
  const Mat3 ft = Mat3::from_columns(target.x, target.y, target.n);
  // Fs^{-1} = Gram^{-1} Fs^T eta, which stays accurate for non-orthonormal
  // frames where <x, y> = a.
  const Mat3 fs_inv = gs.inverse() * fs.transposed() * minkowski_metric();
  LorentzMotion m;
  m.A = ft * fs_inv;
  m.b = zt - m.A * zs;
  return m;
}

}  // namespace tlsurf
