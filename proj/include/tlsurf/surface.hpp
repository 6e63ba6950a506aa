#pragma once

#include <array>
#include <string>
#include <vector>

#include "tlsurf/expr.hpp"
#include "tlsurf/grid.hpp"
#include "tlsurf/minkowski.hpp"

namespace tlsurf {

/// Parametrized surface z(u, v) in Minkowski space sampled on a grid.
struct SurfaceDef {
  std::array<Expr, 3> coords;  // x1, x2, x3 (x3 is the time-like axis)
  GridSpec grid;
  double u0 = 0.0;
  double v0 = 0.0;

  /// Throws Error(InvalidInput) unless the grid has >= 2 nodes per direction
  /// and the base point lies in the domain.
  void validate() const;
  /// Base point as a grid node; throws Error(InvalidInput) if it is not one.
  GridIndex base_index() const;
};

/// z and its partials up to second order at one parameter point.
struct SurfaceDerivatives {
  MVec3 z, z_u, z_v, z_uu, z_uv, z_vv;
};

SurfaceDerivatives derivatives_at(const SurfaceDef& s, double u, double v);

/// Coefficients of the fundamental forms plus the unit normal.
struct FormCoefficients {
  double E = 0, F = 0, G = 0;
  double L = 0, M = 0, N = 0;
  MVec3 n;
  CausalType normal_type = CausalType::SpaceLike;
};

/// The normal is mcross(z_u, z_v) normalized and signed so that
/// det[z_u, z_v, n] > 0. Throws DegeneratePoint or LightLikeNormal.
FormCoefficients forms_from_derivatives(const SurfaceDerivatives& d);
FormCoefficients forms_at(const SurfaceDef& s, double u, double v);

struct CurvaturePair {
  double K = 0.0;
  double H = 0.0;
  double K_minus_H2 = 0.0;
};

/// Throws Error(SingularMetric) when |EG - F^2| < 1e-14 max(E^2, F^2, G^2).
CurvaturePair curvatures(const FormCoefficients& f);

enum class Sign { Positive, Negative, Zero, Mixed };
const char* to_string(Sign s);

struct Extrema {
  double min = 0.0;
  double max = 0.0;
  double max_abs() const;
};

struct PointFailure {
  GridIndex node;
  double u = 0.0;
  double v = 0.0;
  std::string message;
};

/// Patch-wide classification of a parametrization.
struct ClassReport {
  std::string surface_type;  // "time-like", "space-like", "mixed"
  Sign K_sign = Sign::Zero;
  Sign K_minus_H2_sign = Sign::Zero;
  bool asymptotic = false;   // L = N = 0
  bool principal = false;    // F = M = 0
  bool isotropic = false;    // E = G = 0
  bool E_positive = false;
  bool G_negative = false;
  bool method_applicable = false;
  double scale = 0.0;        // max |coefficient| over E..N on the patch
  Extrema E, F, G, L, M, N, K, H, K_minus_H2;
  std::size_t E_sign_changes = 0;  // nodes with E <= 0 when E is mostly positive, etc.
  std::size_t G_sign_changes = 0;
  std::vector<std::string> reasons;  // why the method does not apply
  std::vector<PointFailure> failures;
};

/// "Vanishes on the patch" means max |.| < kVanishingTolerance * scale.
inline constexpr double kVanishingTolerance = 1e-9;

ClassReport classify_patch(const SurfaceDef& s);

/// Closed-form asymptotic frame (z_u/sqrt(E), z_v/sqrt(-G), n) at (u, v);
/// throws WrongSignature unless E > 0 and G < 0.
Frame asymptotic_frame_at(const SurfaceDef& s, double u, double v);

/// z sampled on the grid.
Grid<MVec3> sample_positions(const SurfaceDef& s);

/// Apply a Lorentz motion to the coordinate expressions.
SurfaceDef apply_motion(const SurfaceDef& s, const LorentzMotion& m);

/// Substitute (u, v) -> (u_expr, v_expr) in the coordinates.
SurfaceDef reparametrize(const SurfaceDef& s, const Expr& u_expr, const Expr& v_expr,
                         const GridSpec& new_grid, double u0, double v0);

/// K and H recomputed from sampled positions with second-order central
/// differences; present on interior nodes only.
struct SampledCurvatures {
  MaskedGrid K;
  MaskedGrid H;
};
SampledCurvatures curvatures_from_positions(const Grid<MVec3>& z);

}  // namespace tlsurf
