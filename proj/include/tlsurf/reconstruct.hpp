#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tlsurf/grid.hpp"
#include "tlsurf/invariants.hpp"
#include "tlsurf/minkowski.hpp"

namespace tlsurf {

/// Solution of Phi_v = f_v Phi + a f_u Psi, Psi_u = -a f_v Phi + f_u Psi.
struct PhiPsiField {
  ScalarGrid Phi;
  ScalarGrid Psi;
  std::vector<double> initial_row;     // Phi(., v0)
  std::vector<double> initial_column;  // Psi(u0, .)
  MaskedGrid residual_phi;             // interior nodes
  MaskedGrid residual_psi;
  GridIndex base;
};

struct PhiPsiOptions {
  /// StepTooCoarse when a residual exceeds this times max(1, |Phi_v| and
  /// |Psi_u| scale).
  double residual_limit = 0.05;
};

/// Characteristic Cauchy problem with initial row and column from the
/// first-form integrals. Throws NonPositiveResult or StepTooCoarse.
PhiPsiField solve_phi_psi(const ScalarGrid& a, const ScalarGrid& alpha, GridIndex base,
                          const PhiPsiOptions& opts = {});

/// gamma1 = -a_u / ((1 + a^2) Phi) + f_v / Psi, gamma2 = a_v / ((1 + a^2) Psi) + f_u / Phi.
struct GammaFields {
  ScalarGrid gamma1;
  ScalarGrid gamma2;
};
GammaFields gammas_from_phi_psi(const ScalarGrid& a, const ScalarGrid& alpha, const ScalarGrid& Phi,
                                const ScalarGrid& Psi);

/// xi_u = U xi, xi_v = V xi for xi = rows (x, y, n).
struct FrameConnection {
  Mat3 U;
  Mat3 V;
};

/// Uses a, alpha, gamma1, gamma2 of the point; the derivatives are passed
/// separately.
FrameConnection assemble_connection(const InvariantPoint& p, double a_u, double a_v, double Phi,
                                    double Psi);

struct ConnectionField {
  Grid<Mat3> U;
  Grid<Mat3> V;
};

/// Connection at every node, with a_u, a_v from grid central differences.
ConnectionField assemble_connections(const ScalarGrid& a, const ScalarGrid& alpha,
                                     const ScalarGrid& gamma1, const ScalarGrid& gamma2,
                                     const ScalarGrid& Phi, const ScalarGrid& Psi);

/// Frobenius norm of U_v - V_u - (V U - U V) on interior nodes.
MaskedGrid integrability_residual(const ConnectionField& c);

struct BonnetResiduals {
  MaskedGrid gauss;      // Gauss equation in Phi, Psi form
  MaskedGrid codazzi1;   // (log Phi)_v line
  MaskedGrid codazzi2;   // (log Psi)_u line
  std::size_t masked = 0;  // interior nodes dropped for vanishing denominators
};

/// Throws AllNodesMasked when no interior node survives.
BonnetResiduals bonnet_condition_residuals(const ScalarGrid& gamma1, const ScalarGrid& gamma2,
                                           const ScalarGrid& a, const ScalarGrid& alpha,
                                           const ScalarGrid& Phi, const ScalarGrid& Psi);

/// x0 = (1,0,0), y0 = (a0, 0, sqrt(1+a0^2)), n0 = normalized mcross(x0, y0).
Frame initial_frame(double a0);

struct FrameOptions {
  /// Minkowski Gram-Schmidt every this many steps; 0 disables it.
  std::size_t reorthonormalize_every = 0;
  double drift_limit = 1e-3;
};

struct FramePatch {
  Grid<Frame> frames;
  ScalarGrid a;
  ScalarGrid drift;  // max-norm of Gram - target per node
  double max_drift = 0.0;
  GridIndex base;
};

/// Gram target of an asymptotic frame: [[1, a, 0], [a, -1, 0], [0, 0, 1]].
Mat3 frame_gram_target(double a);

/// RK4 along the base row, then along each column. Throws GramDriftExceeded.
FramePatch integrate_frames(const ConnectionField& c, const ScalarGrid& a, const Frame& frame0,
                            GridIndex base, const FrameOptions& opts = {});

struct SurfacePatch {
  Grid<MVec3> z;
  GridIndex base;
  Frame base_frame;
  double closure = 0.0;
  std::string provenance;
};

/// z_u = Phi x, z_v = Psi y by the trapezoid rule, row first. Throws
/// ClosureExceeded when the column-first path disagrees by more than
/// closure_limit times the patch diameter.
SurfacePatch integrate_position(const ScalarGrid& Phi, const ScalarGrid& Psi,
                                const FramePatch& frames, const MVec3& z0,
                                double closure_limit = 1e-2);

struct MotionComparison {
  LorentzMotion motion;
  double rms = 0.0;
};

/// Aligns A onto B through their base frames. Throws FrameIncompatible.
MotionComparison compare_up_to_motion(const SurfacePatch& A, const SurfacePatch& B);

struct ReconstructOptions {
  PhiPsiOptions phi_psi;
  FrameOptions frames;
  double integrability_warn = 0.1;
  double integrability_abort = 1.0;
  /// Incompatible when the Gauss residual exceeds this times max(1, max K).
  double gauss_limit = 0.05;
  double closure_limit = 1e-2;
  std::optional<Frame> frame0;  // default initial_frame(a0)
  MVec3 z0{};
};

struct ReconstructDiagnostics {
  std::string route;
  double phi_residual = 0.0;
  double psi_residual = 0.0;
  double gauss = 0.0;
  double codazzi1 = 0.0;
  double codazzi2 = 0.0;
  std::size_t masked = 0;
  double integrability = 0.0;
  double drift = 0.0;
  double closure = 0.0;
  std::vector<std::string> warnings;
};

struct Reconstruction {
  SurfacePatch patch;
  FramePatch frames;
  ScalarGrid Phi;
  ScalarGrid Psi;
  ReconstructDiagnostics diagnostics;
};

/// Canonical-parameter route from (a, alpha). Errors carry the stage name.
Reconstruction reconstruct_from_a_alpha(const ScalarGrid& a, const ScalarGrid& alpha, GridIndex base,
                                        const ReconstructOptions& opts = {});

/// (K, H) -> (a, alpha) on the chosen branch, then the route above.
Reconstruction reconstruct_from_kh(const ScalarGrid& K, const ScalarGrid& H, Branch branch,
                                   GridIndex base, const ReconstructOptions& opts = {});

/// Four-function route: Phi, Psi from the first-form inversion. When some
/// node is 0/0-degenerate the sampled sqrtE, sqrtMinusG are used if
/// positive, else the canonical route.
Reconstruction reconstruct_from_invariants(const InvariantField& fld, GridIndex base,
                                           const ReconstructOptions& opts = {});

}  // namespace tlsurf
