#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "tlsurf/expr.hpp"
#include "tlsurf/grid.hpp"

namespace tlsurf {

/// omega_uv + cosh(omega) = source(u, v) on [0, U] x [0, V] with data on the
/// two characteristics u = 0 and v = 0.
struct GoursatProblem {
  double U = 1.0;
  double V = 1.0;
  std::size_t nu = 2;
  std::size_t nv = 2;
  std::vector<double> omega_u0;  // omega(u_i, 0), nu values
  std::vector<double> omega_0v;  // omega(0, v_j), nv values
  std::function<double(double, double)> source;  // empty means 0

  GridSpec grid() const { return {0.0, U, 0.0, V, nu, nv}; }

  /// Boundary data sampled from expressions in u (for v = 0) and in v (for
  /// u = 0); the other parameter is set to 0 while evaluating.
  static GoursatProblem from_expressions(double U, double V, std::size_t nu, std::size_t nv,
                                         const Expr& bu, const Expr& bv);

  /// Throws InvalidInput for bad sizes or when the corner values differ by
  /// more than 1e-12.
  void validate() const;
};

struct CoshGordonOptions {
  double divergence_bound = 50.0;
};

/// Characteristic-rectangle marching with one corrector per cell. Throws
/// Divergence when |omega| exceeds the bound.
ScalarGrid solve_cosh_gordon(const GoursatProblem& p, const CoshGordonOptions& opts = {});

/// omega_uv + cosh(omega) - source by central differences on interior nodes.
MaskedGrid cosh_gordon_residual(const ScalarGrid& omega,
                                const std::function<double(double, double)>& source = {});

/// a_uv / (1 + a^2) - a a_u a_v / (1 + a^2)^2 + 1 on interior nodes.
MaskedGrid constant_k_residual(const ScalarGrid& a);

/// (log sqrt K)_uu - (log sqrt K)_vv - 2 sqrt K on interior nodes. Throws
/// NonPositiveK.
MaskedGrid minimal_k_residual(const ScalarGrid& K);

}  // namespace tlsurf
