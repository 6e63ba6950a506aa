#pragma once

#include <vector>

#include "tlsurf/grid.hpp"
#include "tlsurf/invariants.hpp"

namespace tlsurf {

/// Gauge functions phi(u), psi(v) relative to a base node.
struct GaugePair {
  std::vector<double> u;    // grid u values
  std::vector<double> phi;  // phi at each u column (averaged over v)
  std::vector<double> v;
  std::vector<double> psi;  // psi at each v row (averaged over u)
  GridIndex base;
  double u0 = 0.0;
  double v0 = 0.0;
  /// max over columns of (max - min) / |mean| of phi along v, and the same
  /// for psi along u.
  double cross_variation = 0.0;
};

struct GaugeOptions {
  double cross_variation_tolerance = 1e-6;
};

/// Throws CrossVariationTooLarge when phi varies along v (or psi along u)
/// beyond tolerance, NonPositiveGauge when a value is not positive, and
/// InvalidInput when the base is not a grid node.
GaugePair gauge_functions(const InvariantField& fld, double u0, double v0,
                          const GaugeOptions& opts = {});

struct Canonicity {
  bool canonical = false;
  double deviation = 0.0;  // max(|phi - 1|, |psi - 1|)
};

Canonicity is_canonical(const InvariantField& fld, double u0, double v0, double tol = 1e-6,
                        const GaugeOptions& opts = {});

/// Monotone parameter change ubar(u) = u0 + int phi, vbar(v) = v0 + int psi,
/// with sampled inverses on the output grid.
struct ReparamMap {
  std::vector<double> u, ubar;  // forward samples on the input grid
  std::vector<double> v, vbar;
  std::vector<double> ubar_out, u_of_ubar;  // inverse samples on the output grid
  std::vector<double> vbar_out, v_of_vbar;
  double u0 = 0.0;
  double v0 = 0.0;
};

struct CanonicalResult {
  ReparamMap map;
  InvariantField field;
  GaugePair gauge;  // gauge of the input field
};

/// Resample the field on a uniform grid in canonical parameters. The output
/// grid keeps the node counts and the base index; its spacing is the largest
/// one that stays inside the image of the input domain.
CanonicalResult canonicalize(const InvariantField& fld, double u0, double v0,
                             const GaugeOptions& opts = {});

}  // namespace tlsurf
