#pragma once

#include <array>

namespace tlsurf {

/// Vector of Minkowski 3-space. The third coordinate is the time-like one:
/// <x, y> = x1 y1 + x2 y2 - x3 y3.
struct MVec3 {
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;

  double operator[](int k) const { return k == 0 ? x1 : (k == 1 ? x2 : x3); }
  double& operator[](int k) { return k == 0 ? x1 : (k == 1 ? x2 : x3); }

  MVec3& operator+=(const MVec3& o) {
    x1 += o.x1;
    x2 += o.x2;
    x3 += o.x3;
    return *this;
  }
  MVec3& operator-=(const MVec3& o) {
    x1 -= o.x1;
    x2 -= o.x2;
    x3 -= o.x3;
    return *this;
  }
  MVec3& operator*=(double s) {
    x1 *= s;
    x2 *= s;
    x3 *= s;
    return *this;
  }

  friend MVec3 operator+(MVec3 a, const MVec3& b) { return a += b; }
  friend MVec3 operator-(MVec3 a, const MVec3& b) { return a -= b; }
  friend MVec3 operator-(const MVec3& a) { return {-a.x1, -a.x2, -a.x3}; }
  friend MVec3 operator*(double s, MVec3 a) { return a *= s; }
  friend MVec3 operator*(MVec3 a, double s) { return a *= s; }
  friend MVec3 operator/(MVec3 a, double s) { return a *= 1.0 / s; }
  friend bool operator==(const MVec3&, const MVec3&) = default;
};

enum class CausalType { SpaceLike, TimeLike, LightLike };

const char* to_string(CausalType type);

/// Default width of the light-like band, relative to the squared Euclidean
/// length of the vector.
inline constexpr double kCausalEpsilon = 1e-12;

double mdot(const MVec3& x, const MVec3& y);

/// Sign of <x,x>; |<x,x>| <= eps * |x|^2 (Euclidean) counts as light-like.
CausalType causal_type(const MVec3& x, double eps = kCausalEpsilon);

/// Lorentzian cross product: the unique w with <w, z> = det[x, y, z] for all z.
MVec3 mcross(const MVec3& x, const MVec3& y);

/// det of the matrix with columns x, y, z.
double det3(const MVec3& x, const MVec3& y, const MVec3& z);

double euclidean_norm(const MVec3& x);

/// Row-major 3x3 matrix.
struct Mat3 {
  std::array<double, 9> m{};

  static Mat3 identity();
  static Mat3 diag(double a, double b, double c);
  /// Matrix whose columns are c0, c1, c2.
  static Mat3 from_columns(const MVec3& c0, const MVec3& c1, const MVec3& c2);
  /// Matrix whose rows are r0, r1, r2.
  static Mat3 from_rows(const MVec3& r0, const MVec3& r1, const MVec3& r2);

  double operator()(int r, int c) const { return m[3 * r + c]; }
  double& operator()(int r, int c) { return m[3 * r + c]; }

  MVec3 row(int r) const { return {m[3 * r], m[3 * r + 1], m[3 * r + 2]}; }
  MVec3 column(int c) const { return {m[c], m[3 + c], m[6 + c]}; }

  Mat3 transposed() const;
  double det() const;
  /// Throws Error(InvalidInput) when singular.
  Mat3 inverse() const;
  double frobenius_norm() const;
  double max_abs() const;

  friend Mat3 operator*(const Mat3& a, const Mat3& b);
  friend MVec3 operator*(const Mat3& a, const MVec3& x);
  friend Mat3 operator+(const Mat3& a, const Mat3& b);
  friend Mat3 operator-(const Mat3& a, const Mat3& b);
  friend Mat3 operator*(double s, const Mat3& a);
};

/// The metric eta = diag(1, 1, -1).
Mat3 minkowski_metric();

/// Frame (x, y, n) attached to a surface point.
struct Frame {
  MVec3 x;
  MVec3 y;
  MVec3 n;
};

/// Gram matrix of (x, y, n) with respect to <.,.>.
Mat3 gram(const Frame& f);

/// Rigid motion of Minkowski space: z -> A z + b with A^T eta A = eta.
struct LorentzMotion {
  Mat3 A = Mat3::identity();
  MVec3 b{};

  MVec3 operator()(const MVec3& z) const { return A * z + b; }
  MVec3 linear(const MVec3& z) const { return A * z; }
  Frame linear(const Frame& f) const { return {A * f.x, A * f.y, A * f.n}; }

  LorentzMotion inverse() const;
  /// this after other.
  LorentzMotion compose(const LorentzMotion& other) const;

  /// max |A^T eta A - eta| componentwise.
  double metric_defect() const;
};

/// Boost of the given rapidity mixing the spatial axis (0 or 1) with the
/// time axis.
Mat3 boost(int spatial_axis, double rapidity);

/// Rotation by `angle` in the (x1, x2) plane.
Mat3 rotation12(double angle);

inline constexpr double kFrameGramTolerance = 1e-8;

/// Motion carrying the source frame at zs onto the target frame at zt.
/// Throws Error(FrameIncompatible) when the Gram matrices differ by more
/// than `tol`.
LorentzMotion motion_from_frames(const Frame& source, const MVec3& zs, const Frame& target,
                                 const MVec3& zt, double tol = kFrameGramTolerance);

}  // namespace tlsurf
