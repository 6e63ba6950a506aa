#pragma once

#include <vector>

#include "tlsurf/grid.hpp"
#include "tlsurf/surface.hpp"

namespace tlsurf {

/// f = (log sqrt(1 + a^2) - log |alpha|) / 2, which equals -log K^(1/4).
double f_from(double a, double alpha);

/// Geodesic curvatures and torsion of the asymptotic lines.
struct BarredInvariants {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double alpha = 0.0;
};

/// Basic asymptotic invariants at one point, with the derivative data the
/// reconstruction and gauge computations consume.
struct InvariantPoint {
  double a = 0.0;
  double alpha = 0.0;
  double f = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double sqrtE = 0.0;
  double sqrtMinusG = 0.0;
  double a_u = 0.0;
  double a_v = 0.0;
  double f_u = 0.0;
  double f_v = 0.0;
  /// max |gamma_k - gamma_k'| where gamma_k' comes from the form-derivative
  /// expressions; NaN when not available.
  double gamma_crosscheck = 0.0;

  BarredInvariants barred() const;
  double gauss_curvature() const;  // alpha^2 / (1 + a^2)
  double mean_curvature() const;   // a alpha / (1 + a^2)
};

struct InvariantOptions {
  /// Step of the fourth-order central differences that give f_u, f_v.
  double fd_step = 1e-3;
  /// |L| + |N| must stay below this times the form scale.
  double asymptotic_tolerance = 1e-9;
};

/// Throws NotAsymptotic, WrongSignature (E <= 0 or G >= 0) or
/// MethodNotApplicable (alpha = 0).
InvariantPoint invariants_at(const SurfaceDef& s, double u, double v,
                             const InvariantOptions& opts = {});

enum class DerivativeSource {
  Pointwise,  // a_u, a_v from jets, f_u, f_v from fine differences of the parametrization
  Grid,       // central differences of the sampled fields
};

class InvariantField {
 public:
  InvariantField(const GridSpec& grid, std::vector<InvariantPoint> points, DerivativeSource source);

  /// Field from sampled data only; f and every derivative slot are derived
  /// from the samples.
  static InvariantField from_samples(const ScalarGrid& a, const ScalarGrid& alpha,
                                     const ScalarGrid& gamma1, const ScalarGrid& gamma2,
                                     const ScalarGrid& sqrtE, const ScalarGrid& sqrtMinusG);

  const GridSpec& grid() const { return grid_; }
  const InvariantPoint& at(std::size_t i, std::size_t j) const { return points_[grid_.index(i, j)]; }
  const std::vector<InvariantPoint>& points() const { return points_; }
  DerivativeSource derivative_source() const { return source_; }

  ScalarGrid component(double InvariantPoint::*member) const;
  /// Copy with one component replaced (derived slots are left untouched).
  InvariantField with_component(double InvariantPoint::*member, const ScalarGrid& values) const;

  /// +1 or -1; throws MethodNotApplicable if alpha vanishes or changes sign.
  int alpha_sign() const;

 private:
  GridSpec grid_;
  std::vector<InvariantPoint> points_;
  DerivativeSource source_;
};

/// Field on the surface grid; requires E > 0 and G < 0 at every node.
InvariantField build_invariant_field(const SurfaceDef& s, const InvariantOptions& opts = {});

/// Gauss equation residual on interior nodes.
MaskedGrid gauss_residual(const InvariantField& fld);

struct ResidualPair {
  MaskedGrid first;
  MaskedGrid second;
  double max_abs() const;
};

/// Codazzi equations (x(alpha) line, y(alpha) line).
ResidualPair codazzi_residual(const InvariantField& fld);

/// (sqrt E)_v and (sqrt -G)_u evolution equations.
ResidualPair system_residual(const InvariantField& fld);

/// Inputs of the first-form inversion.
struct InvariantJet {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double a = 0.0;
  double a_u = 0.0;
  double a_v = 0.0;
  double f_u = 0.0;
  double f_v = 0.0;
};

struct FirstFormRoots {
  double sqrtE = 0.0;
  double sqrtMinusG = 0.0;
};

struct InversionOptions {
  double relative_tolerance = 1e-10;
  double absolute_tolerance = 1e-12;
};

/// sqrt E and sqrt(-G) from the invariants. Throws DegenerateDenominator
/// when either denominator vanishes relative to its terms, and
/// NonPositiveResult when a root comes out non-positive.
FirstFormRoots eg_from_invariants(const InvariantJet& p, const InversionOptions& opts = {});

enum class Branch { Plus, Minus };

struct AsymptoticPair {
  double a = 0.0;
  double alpha = 0.0;
};

/// a = +-H / sqrt(K - H^2), alpha = +-K / sqrt(K - H^2). Throws
/// MethodNotApplicable unless K > 0 and K - H^2 > 0.
AsymptoticPair ah_from_kh(double K, double H, Branch branch = Branch::Plus);

}  // namespace tlsurf
