#include "tlsurf/reconstruct.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "tlsurf/error.hpp"
#include "tlsurf/numerics.hpp"

namespace tlsurf {

namespace {

void require_same_grid(const ScalarGrid& a, const ScalarGrid& b, const char* what) {
  if (!(a.spec() == b.spec())) {
    throw Error(ErrorCode::InvalidInput, fmt::format("{} grids do not match", what));
  }
}

void require_base(const GridSpec& g, GridIndex b) {
  if (b.i >= g.nu || b.j >= g.nv) {
    throw Error(ErrorCode::InvalidInput, fmt::format("base node ({}, {}) outside the grid", b.i, b.j));
  }
}

ScalarGrid f_grid(const ScalarGrid& a, const ScalarGrid& alpha) {
  ScalarGrid f(a.spec());
  int sign = 0;
  for (std::size_t k = 0; k < f.data().size(); ++k) {
    const double al = alpha.data()[k];
    const int s = al > 0.0 ? 1 : (al < 0.0 ? -1 : 0);
    if (s == 0 || (sign != 0 && s != sign)) {
      throw Error(ErrorCode::MethodNotApplicable, "alpha vanishes or changes sign on the patch");
    }
    sign = s;
    f.data()[k] = f_from(a.data()[k], al);
  }
  return f;
}

std::vector<double> row_of(const ScalarGrid& g, std::size_t j) {
  std::vector<double> r(g.nu());
  for (std::size_t i = 0; i < g.nu(); ++i) r[i] = g(i, j);
  return r;
}

std::vector<double> column_of(const ScalarGrid& g, std::size_t i) {
  std::vector<double> c(g.nv());
  for (std::size_t j = 0; j < g.nv(); ++j) c[j] = g(i, j);
  return c;
}

// Outward traversal order of indices 0..n-1 from the base.
std::vector<std::size_t> outward(std::size_t n, std::size_t base) {
  std::vector<std::size_t> order;
  for (std::size_t k = base + 1; k < n; ++k) order.push_back(k);
  for (std::size_t k = base; k-- > 0;) order.push_back(k);
  return order;
}

}  // namespace

PhiPsiField solve_phi_psi(const ScalarGrid& a, const ScalarGrid& alpha, GridIndex base,
                          const PhiPsiOptions& opts) {
  require_same_grid(a, alpha, "a and alpha");
  const GridSpec& g = a.spec();
  g.validate(2);
  require_base(g, base);
  const ScalarGrid f = f_grid(a, alpha);
  const ScalarGrid f_u = derivative_u(f), f_v = derivative_v(f);
  const double hu = g.hu(), hv = g.hv();
  const std::size_t i0 = base.i, j0 = base.j;

  PhiPsiField out;
  out.base = base;
  out.Phi = ScalarGrid(g);
  out.Psi = ScalarGrid(g);
  ScalarGrid& Phi = out.Phi;
  ScalarGrid& Psi = out.Psi;

  // Initial data: the f_u (resp. f_v) part of each exponent integrates to f.
  ScalarGrid cu(g), cv(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    cu.data()[k] = -a.data()[k] * f_v.data()[k];
    cv.data()[k] = a.data()[k] * f_u.data()[k];
  }
  const std::vector<double> Iu = cumulative_integral(row_of(cu, j0), hu, i0);
  const std::vector<double> Iv = cumulative_integral(column_of(cv, i0), hv, j0);
  for (std::size_t i = 0; i < g.nu; ++i) Phi(i, j0) = std::exp(f(i, j0) + Iu[i]);
  for (std::size_t j = 0; j < g.nv; ++j) Psi(i0, j) = std::exp(f(i0, j) + Iv[j]);
  out.initial_row = row_of(Phi, j0);
  out.initial_column = column_of(Psi, i0);

  auto F = [&](std::size_t i, std::size_t j, double P, double Q) {
    return f_v(i, j) * P + a(i, j) * f_u(i, j) * Q;
  };
  auto G = [&](std::size_t i, std::size_t j, double P, double Q) {
    return -a(i, j) * f_v(i, j) * P + f_u(i, j) * Q;
  };
  auto check = [&](std::size_t i, std::size_t j) {
    if (!(Phi(i, j) > 0.0) || !(Psi(i, j) > 0.0) || !std::isfinite(Phi(i, j)) ||
        !std::isfinite(Psi(i, j))) {
      throw Error(ErrorCode::NonPositiveResult,
                  fmt::format("Phi = {}, Psi = {} at node ({}, {})", Phi(i, j), Psi(i, j), i, j));
    }
  };
  check(i0, j0);

  // Psi along the base row and Phi along the base column (the other unknown
  // is already known there).
  for (std::size_t i : outward(g.nu, i0)) {
    const std::size_t p = i > i0 ? i - 1 : i + 1;
    const double h = i > i0 ? hu : -hu;
    const double g0 = G(p, j0, Phi(p, j0), Psi(p, j0));
    const double pred = Psi(p, j0) + h * g0;
    Psi(i, j0) = Psi(p, j0) + 0.5 * h * (g0 + G(i, j0, Phi(i, j0), pred));
    check(i, j0);
  }
  for (std::size_t j : outward(g.nv, j0)) {
    const std::size_t p = j > j0 ? j - 1 : j + 1;
    const double h = j > j0 ? hv : -hv;
    const double f0 = F(i0, p, Phi(i0, p), Psi(i0, p));
    const double pred = Phi(i0, p) + h * f0;
    Phi(i0, j) = Phi(i0, p) + 0.5 * h * (f0 + F(i0, j, pred, Psi(i0, j)));
    check(i0, j);
  }

  // Quadrants: each node uses (i, j -+ 1) for Phi and (i -+ 1, j) for Psi.
  for (std::size_t j : outward(g.nv, j0)) {
    const std::size_t pj = j > j0 ? j - 1 : j + 1;
    const double kv = j > j0 ? hv : -hv;
    for (std::size_t i : outward(g.nu, i0)) {
      const std::size_t pi = i > i0 ? i - 1 : i + 1;
      const double ku = i > i0 ? hu : -hu;
      const double fs = F(i, pj, Phi(i, pj), Psi(i, pj));
      const double gs = G(pi, j, Phi(pi, j), Psi(pi, j));
      const double P1 = Phi(i, pj) + kv * fs;
      const double Q1 = Psi(pi, j) + ku * gs;
      Phi(i, j) = Phi(i, pj) + 0.5 * kv * (fs + F(i, j, P1, Q1));
      Psi(i, j) = Psi(pi, j) + 0.5 * ku * (gs + G(i, j, P1, Q1));
      check(i, j);
    }
  }

  out.residual_phi = MaskedGrid(g);
  out.residual_psi = MaskedGrid(g);
  const ScalarGrid Phi_v = derivative_v(Phi), Psi_u = derivative_u(Psi);
  double scale = 1.0;
  for (std::size_t j = 1; j + 1 < g.nv; ++j)
    for (std::size_t i = 1; i + 1 < g.nu; ++i) {
      const double rf = F(i, j, Phi(i, j), Psi(i, j));
      const double rg = G(i, j, Phi(i, j), Psi(i, j));
      scale = std::max({scale, std::abs(rf), std::abs(rg)});
      out.residual_phi.set(i, j, Phi_v(i, j) - rf);
      out.residual_psi.set(i, j, Psi_u(i, j) - rg);
    }
  const double worst = std::max(out.residual_phi.max_abs(), out.residual_psi.max_abs());
  if (worst > opts.residual_limit * scale) {
    throw Error(ErrorCode::StepTooCoarse,
                fmt::format("Phi/Psi residual {:.3e} exceeds {:.3e}; refine the grid", worst,
                            opts.residual_limit * scale));
  }
  return out;
}

GammaFields gammas_from_phi_psi(const ScalarGrid& a, const ScalarGrid& alpha, const ScalarGrid& Phi,
                                const ScalarGrid& Psi) {
  require_same_grid(a, Phi, "a and Phi");
  require_same_grid(a, Psi, "a and Psi");
  const ScalarGrid f = f_grid(a, alpha);
  const ScalarGrid a_u = derivative_u(a), a_v = derivative_v(a);
  const ScalarGrid f_u = derivative_u(f), f_v = derivative_v(f);
  GammaFields out{ScalarGrid(a.spec()), ScalarGrid(a.spec())};
  for (std::size_t k = 0; k < a.data().size(); ++k) {
    const double q = 1.0 + a.data()[k] * a.data()[k];
    const double P = Phi.data()[k], Q = Psi.data()[k];
    out.gamma1.data()[k] = -a_u.data()[k] / (q * P) + f_v.data()[k] / Q;
    out.gamma2.data()[k] = a_v.data()[k] / (q * Q) + f_u.data()[k] / P;
  }
  return out;
}

FrameConnection assemble_connection(const InvariantPoint& p, double a_u, double a_v, double Phi,
                                    double Psi) {
  const double a = p.a, al = p.alpha, g1 = p.gamma1, g2 = p.gamma2, q = 1.0 + a * a;
  FrameConnection c;
  const Mat3 U = Mat3::from_rows({-a * g1, g1, 0.0},
                                 {a_u / (q * Phi) + g1, a * a_u / (q * Phi) + a * g1, al},
                                 {-a * al / q, al / q, 0.0});
  const Mat3 V = Mat3::from_rows({a * a_v / (q * Psi) - a * g2, -a_v / (q * Psi) + g2, al},
                                 {g2, a * g2, 0.0},
                                 {-al / q, -a * al / q, 0.0});
  c.U = Phi * U;
  c.V = Psi * V;
  return c;
}

ConnectionField assemble_connections(const ScalarGrid& a, const ScalarGrid& alpha,
                                     const ScalarGrid& gamma1, const ScalarGrid& gamma2,
                                     const ScalarGrid& Phi, const ScalarGrid& Psi) {
  const GridSpec& g = a.spec();
  for (const ScalarGrid* s : {&alpha, &gamma1, &gamma2, &Phi, &Psi}) require_same_grid(a, *s, "field");
  const ScalarGrid a_u = derivative_u(a), a_v = derivative_v(a);
  ConnectionField c{Grid<Mat3>(g), Grid<Mat3>(g)};
  for (std::size_t k = 0; k < g.size(); ++k) {
    InvariantPoint p;
    p.a = a.data()[k];
    p.alpha = alpha.data()[k];
    p.gamma1 = gamma1.data()[k];
    p.gamma2 = gamma2.data()[k];
    const FrameConnection fc =
        assemble_connection(p, a_u.data()[k], a_v.data()[k], Phi.data()[k], Psi.data()[k]);
    c.U.data()[k] = fc.U;
    c.V.data()[k] = fc.V;
  }
  return c;
}

MaskedGrid integrability_residual(const ConnectionField& c) {
  const GridSpec& g = c.U.spec();
  MaskedGrid r(g);
  const double hu = g.hu(), hv = g.hv();
  for (std::size_t j = 1; j + 1 < g.nv; ++j)
    for (std::size_t i = 1; i + 1 < g.nu; ++i) {
      const Mat3 U_v = (1.0 / (2.0 * hv)) * (c.U(i, j + 1) - c.U(i, j - 1));
      const Mat3 V_u = (1.0 / (2.0 * hu)) * (c.V(i + 1, j) - c.V(i - 1, j));
      const Mat3& U = c.U(i, j);
      const Mat3& V = c.V(i, j);
      r.set(i, j, (U_v - V_u - (V * U - U * V)).frobenius_norm());
    }
  return r;
}

namespace {

BonnetResiduals bonnet_unchecked(const ScalarGrid& gamma1, const ScalarGrid& gamma2,
                                 const ScalarGrid& a, const ScalarGrid& alpha,
                                 const ScalarGrid& Phi, const ScalarGrid& Psi) {
  const GridSpec& g = a.spec();
  for (const ScalarGrid* s : {&alpha, &gamma1, &gamma2, &Phi, &Psi}) require_same_grid(a, *s, "field");
  const ScalarGrid f = f_grid(a, alpha);
  const ScalarGrid a_u = derivative_u(a), a_v = derivative_v(a), a_uv = derivative_uv(a);
  const ScalarGrid f_u = derivative_u(f), f_v = derivative_v(f);
  const ScalarGrid g2_u = derivative_u(gamma2), g1_v = derivative_v(gamma1);
  ScalarGrid logPhi(g), logPsi(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    logPhi.data()[k] = std::log(Phi.data()[k]);
    logPsi.data()[k] = std::log(Psi.data()[k]);
  }
  const ScalarGrid lPhi_v = derivative_v(logPhi), lPsi_u = derivative_u(logPsi);

  BonnetResiduals r{MaskedGrid(g), MaskedGrid(g), MaskedGrid(g), 0};
  auto vanishes = [](double den, double t1, double t2) {
    return std::abs(den) < 1e-12 || std::abs(den) <= 1e-10 * (std::abs(t1) + std::abs(t2));
  };
  for (std::size_t j = 1; j + 1 < g.nv; ++j)
    for (std::size_t i = 1; i + 1 < g.nu; ++i) {
      const double A = a(i, j), al = alpha(i, j), q = 1.0 + A * A;
      const double g1 = gamma1(i, j), g2 = gamma2(i, j), P = Phi(i, j), Q = Psi(i, j);
      const double au = a_u(i, j), av = a_v(i, j), fu = f_u(i, j), fv = f_v(i, j);
      r.gauss.set(i, j, g2_u(i, j) / P - g1_v(i, j) / Q - 2.0 * A * g1 * g2 - g1 * g1 + g2 * g2 -
                            g1 * au / (q * P) - g2 * av / (q * Q) - a_uv(i, j) / (q * P * Q) +
                            A * au * av / (q * q * P * Q) + al * al / q);
      const double t1 = au * g2, t2 = q * fu * g1;  // first denominator
      const double s1 = -av * g1, s2 = q * fv * g2;  // second denominator
      const double d1 = t1 + t2, d2 = s1 + s2;
      bool masked = false;
      if (vanishes(d1, t1, t2)) {
        masked = true;
      } else {
        r.codazzi1.set(i, j, lPhi_v(i, j) + A * fu * (av * g1 - q * fv * g2) / d1 - fv);
      }
      if (vanishes(d2, s1, s2)) {
        masked = true;
      } else {
        r.codazzi2.set(i, j, lPsi_u(i, j) + A * fv * (au * g2 + q * fu * g1) / d2 - fu);
      }
      if (masked) ++r.masked;
    }
  return r;
}

}  // namespace

BonnetResiduals bonnet_condition_residuals(const ScalarGrid& gamma1, const ScalarGrid& gamma2,
                                           const ScalarGrid& a, const ScalarGrid& alpha,
                                           const ScalarGrid& Phi, const ScalarGrid& Psi) {
  BonnetResiduals r = bonnet_unchecked(gamma1, gamma2, a, alpha, Phi, Psi);
  if (r.gauss.count() == 0 || (r.codazzi1.count() == 0 && r.codazzi2.count() == 0)) {
    throw Error(ErrorCode::AllNodesMasked,
                fmt::format("no interior node left for the Codazzi conditions ({} masked)", r.masked));
  }
  return r;
}

Frame initial_frame(double a0) {
  Frame f;
  f.x = {1.0, 0.0, 0.0};
  f.y = {a0, 0.0, std::sqrt(1.0 + a0 * a0)};
  const MVec3 w = mcross(f.x, f.y);
  const double q = mdot(w, w);
  f.n = w / (q > 0.0 ? std::sqrt(q) : -std::sqrt(-q));
  return f;
}

Mat3 frame_gram_target(double a) { return Mat3::from_rows({1.0, a, 0.0}, {a, -1.0, 0.0}, {0.0, 0.0, 1.0}); }

namespace {

Mat3 to_matrix(const Frame& f) { return Mat3::from_rows(f.x, f.y, f.n); }
Frame to_frame(const Mat3& m) { return {m.row(0), m.row(1), m.row(2)}; }

Mat3 rk4_step(const Mat3& xi, const Mat3& M0, const Mat3& M1, double h) {
  const Mat3 Mh = 0.5 * (M0 + M1);
  const Mat3 k1 = M0 * xi;
  const Mat3 k2 = Mh * (xi + (0.5 * h) * k1);
  const Mat3 k3 = Mh * (xi + (0.5 * h) * k2);
  const Mat3 k4 = M1 * (xi + h * k3);
  return xi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Restores the Gram relations for the given a, keeping orientation.
Frame minkowski_gram_schmidt(const Frame& f, double a) {
  Frame out;
  out.x = f.x / std::sqrt(mdot(f.x, f.x));
  MVec3 yp = f.y - mdot(f.y, out.x) * out.x;
  yp = yp / std::sqrt(-mdot(yp, yp));
  out.y = a * out.x + std::sqrt(1.0 + a * a) * yp;
  MVec3 w = mcross(out.x, out.y);
  const double q = mdot(w, w);
  w = w / (q > 0.0 ? std::sqrt(q) : -std::sqrt(-q));
  out.n = mdot(w, f.n) >= 0.0 ? w : -w;
  return out;
}

double gram_drift(const Frame& f, double a) {
  return (gram(f) - frame_gram_target(a)).max_abs();
}

}  // namespace

FramePatch integrate_frames(const ConnectionField& c, const ScalarGrid& a, const Frame& frame0,
                            GridIndex base, const FrameOptions& opts) {
  const GridSpec& g = c.U.spec();
  require_base(g, base);
  FramePatch out;
  out.base = base;
  out.a = a;
  out.frames = Grid<Frame>(g);
  out.drift = ScalarGrid(g);
  const std::size_t i0 = base.i, j0 = base.j;
  const std::size_t every = opts.reorthonormalize_every;

  out.frames(i0, j0) = frame0;
  {
    std::size_t steps = 0;
    for (std::size_t i : outward(g.nu, i0)) {
      if (i == i0 + 1) steps = 0;
      if (i + 1 == i0) steps = 0;
      const std::size_t p = i > i0 ? i - 1 : i + 1;
      const double h = i > i0 ? g.hu() : -g.hu();
      Mat3 xi = rk4_step(to_matrix(out.frames(p, j0)), c.U(p, j0), c.U(i, j0), h);
      Frame fr = to_frame(xi);
      if (every > 0 && ++steps % every == 0) fr = minkowski_gram_schmidt(fr, a(i, j0));
      out.frames(i, j0) = fr;
    }
  }
  for (std::size_t i = 0; i < g.nu; ++i) {
    std::size_t steps = 0;
    for (std::size_t j : outward(g.nv, j0)) {
      if (j == j0 + 1 || j + 1 == j0) steps = 0;
      const std::size_t p = j > j0 ? j - 1 : j + 1;
      const double h = j > j0 ? g.hv() : -g.hv();
      Mat3 xi = rk4_step(to_matrix(out.frames(i, p)), c.V(i, p), c.V(i, j), h);
      Frame fr = to_frame(xi);
      if (every > 0 && ++steps % every == 0) fr = minkowski_gram_schmidt(fr, a(i, j));
      out.frames(i, j) = fr;
    }
  }

  GridIndex worst{};
  for (std::size_t j = 0; j < g.nv; ++j)
    for (std::size_t i = 0; i < g.nu; ++i) {
      const double d = gram_drift(out.frames(i, j), a(i, j));
      out.drift(i, j) = d;
      if (d > out.max_drift || !std::isfinite(d)) {
        out.max_drift = std::isfinite(d) ? d : INFINITY;
        worst = {i, j};
      }
    }
  if (out.max_drift > opts.drift_limit) {
    throw Error(ErrorCode::GramDriftExceeded,
                fmt::format("Gram drift {:.3e} at node ({}, {}) exceeds {:.1e}", out.max_drift,
                            worst.i, worst.j, opts.drift_limit));
  }
  return out;
}

SurfacePatch integrate_position(const ScalarGrid& Phi, const ScalarGrid& Psi,
                                const FramePatch& frames, const MVec3& z0, double closure_limit) {
  const GridSpec& g = Phi.spec();
  require_same_grid(Phi, Psi, "Phi and Psi");
  const std::size_t i0 = frames.base.i, j0 = frames.base.j;
  auto zu = [&](std::size_t i, std::size_t j) { return Phi(i, j) * frames.frames(i, j).x; };
  auto zv = [&](std::size_t i, std::size_t j) { return Psi(i, j) * frames.frames(i, j).y; };

  auto along_row = [&](Grid<MVec3>& z, std::size_t j) {
    for (std::size_t i : outward(g.nu, i0)) {
      const std::size_t p = i > i0 ? i - 1 : i + 1;
      const double h = i > i0 ? g.hu() : -g.hu();
      z(i, j) = z(p, j) + (0.5 * h) * (zu(p, j) + zu(i, j));
    }
  };
  auto along_column = [&](Grid<MVec3>& z, std::size_t i) {
    for (std::size_t j : outward(g.nv, j0)) {
      const std::size_t p = j > j0 ? j - 1 : j + 1;
      const double h = j > j0 ? g.hv() : -g.hv();
      z(i, j) = z(i, p) + (0.5 * h) * (zv(i, p) + zv(i, j));
    }
  };

  SurfacePatch out;
  out.base = frames.base;
  out.base_frame = frames.frames(i0, j0);
  out.provenance = "reconstructed";
  out.z = Grid<MVec3>(g);
  out.z(i0, j0) = z0;
  along_row(out.z, j0);
  for (std::size_t i = 0; i < g.nu; ++i) along_column(out.z, i);

  Grid<MVec3> alt(g);
  alt(i0, j0) = z0;
  along_column(alt, i0);
  for (std::size_t j = 0; j < g.nv; ++j) along_row(alt, j);

  MVec3 lo = z0, hi = z0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const MVec3& p = out.z.data()[k];
    out.closure = std::max(out.closure, euclidean_norm(p - alt.data()[k]));
    for (int c = 0; c < 3; ++c) {
      lo[c] = std::min(lo[c], p[c]);
      hi[c] = std::max(hi[c], p[c]);
    }
  }
  const double diameter = euclidean_norm(hi - lo);
  if (out.closure > closure_limit * diameter) {
    throw Error(ErrorCode::ClosureExceeded,
                fmt::format("closure residual {:.3e} exceeds {:.1e} of the patch diameter {:.3e}",
                            out.closure, closure_limit, diameter));
  }
  return out;
}

MotionComparison compare_up_to_motion(const SurfacePatch& A, const SurfacePatch& B) {
  if (A.z.nu() != B.z.nu() || A.z.nv() != B.z.nv()) {
    throw Error(ErrorCode::InvalidInput, "patches have different grid shapes");
  }
  MotionComparison r;
  r.motion = motion_from_frames(A.base_frame, A.z(A.base), B.base_frame, B.z(B.base));
  double sum = 0.0;
  for (std::size_t k = 0; k < A.z.data().size(); ++k) {
    const double d = euclidean_norm(r.motion(A.z.data()[k]) - B.z.data()[k]);
    sum += d * d;
  }
  r.rms = std::sqrt(sum / static_cast<double>(A.z.data().size()));
  return r;
}

namespace {

template <class F>
auto stage(const char* name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("{}: {}", name, e.what()));
  }
}

Reconstruction finish(const ScalarGrid& a, const ScalarGrid& alpha, const ScalarGrid& g1,
                      const ScalarGrid& g2, ScalarGrid Phi, ScalarGrid Psi, GridIndex base,
                      const ReconstructOptions& opts, ReconstructDiagnostics diag) {
  const GridSpec& g = a.spec();
  const BonnetResiduals br = stage("compatibility", [&] {
    return bonnet_unchecked(g1, g2, a, alpha, Phi, Psi);
  });
  diag.gauss = br.gauss.max_abs();
  diag.codazzi1 = br.codazzi1.max_abs();
  diag.codazzi2 = br.codazzi2.max_abs();
  diag.masked = br.masked;
  double kmax = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double A = a.data()[k], al = alpha.data()[k];
    kmax = std::max(kmax, al * al / (1.0 + A * A));
  }
  const double limit = opts.gauss_limit * std::max(1.0, kmax);
  if (diag.gauss > limit) {
    throw Error(ErrorCode::Incompatible,
                fmt::format("compatibility: Gauss equation residual {:.3e} exceeds {:.3e}; the "
                            "data are not the invariants of a surface",
                            diag.gauss, limit));
  }
  if (br.codazzi1.count() == 0 && br.codazzi2.count() == 0 && br.gauss.count() > 0) {
    diag.warnings.push_back("every interior node masked for the Codazzi conditions");
  }

  const ConnectionField conn = assemble_connections(a, alpha, g1, g2, Phi, Psi);
  diag.integrability = integrability_residual(conn).max_abs();
  if (diag.integrability > opts.integrability_abort) {
    throw Error(ErrorCode::IntegrabilityViolated,
                fmt::format("connection: integrability residual {:.3e} exceeds {:.1e}",
                            diag.integrability, opts.integrability_abort));
  }
  if (diag.integrability > opts.integrability_warn) {
    diag.warnings.push_back(
        fmt::format("integrability residual {:.3e} above {:.1e}", diag.integrability,
                    opts.integrability_warn));
  }

  const Frame frame0 = opts.frame0 ? *opts.frame0 : initial_frame(a(base.i, base.j));
  Reconstruction r;
  r.frames = stage("frames", [&] { return integrate_frames(conn, a, frame0, base, opts.frames); });
  diag.drift = r.frames.max_drift;
  r.patch = stage("position", [&] {
    return integrate_position(Phi, Psi, r.frames, opts.z0, opts.closure_limit);
  });
  diag.closure = r.patch.closure;
  r.Phi = std::move(Phi);
  r.Psi = std::move(Psi);
  r.diagnostics = std::move(diag);
  return r;
}

}  // namespace

Reconstruction reconstruct_from_a_alpha(const ScalarGrid& a, const ScalarGrid& alpha, GridIndex base,
                                        const ReconstructOptions& opts) {
  require_same_grid(a, alpha, "a and alpha");
  const PhiPsiField pp = stage("phi-psi", [&] { return solve_phi_psi(a, alpha, base, opts.phi_psi); });
  ReconstructDiagnostics diag;
  diag.route = "canonical";
  diag.phi_residual = pp.residual_phi.max_abs();
  diag.psi_residual = pp.residual_psi.max_abs();
  const GammaFields gm = gammas_from_phi_psi(a, alpha, pp.Phi, pp.Psi);
  return finish(a, alpha, gm.gamma1, gm.gamma2, pp.Phi, pp.Psi, base, opts, std::move(diag));
}

Reconstruction reconstruct_from_kh(const ScalarGrid& K, const ScalarGrid& H, Branch branch,
                                   GridIndex base, const ReconstructOptions& opts) {
  require_same_grid(K, H, "K and H");
  ScalarGrid a(K.spec()), alpha(K.spec());
  stage("asymptotic invariants", [&] {
    for (std::size_t j = 0; j < K.nv(); ++j)
      for (std::size_t i = 0; i < K.nu(); ++i) {
        try {
          const AsymptoticPair p = ah_from_kh(K(i, j), H(i, j), branch);
          a(i, j) = p.a;
          alpha(i, j) = p.alpha;
        } catch (const Error& e) {
          throw Error(e.code(), fmt::format("node ({}, {}): {}", i, j, e.what()));
        }
      }
    return 0;
  });
  Reconstruction r = reconstruct_from_a_alpha(a, alpha, base, opts);
  r.diagnostics.route = "kh";
  return r;
}

Reconstruction reconstruct_from_invariants(const InvariantField& fld, GridIndex base,
                                           const ReconstructOptions& opts) {
  const GridSpec& g = fld.grid();
  g.validate(2);
  require_base(g, base);
  fld.alpha_sign();
  const ScalarGrid a = fld.component(&InvariantPoint::a);
  const ScalarGrid alpha = fld.component(&InvariantPoint::alpha);
  const ScalarGrid g1 = fld.component(&InvariantPoint::gamma1);
  const ScalarGrid g2 = fld.component(&InvariantPoint::gamma2);
  const ScalarGrid f = f_grid(a, alpha);
  const ScalarGrid a_u = derivative_u(a), a_v = derivative_v(a);
  const ScalarGrid f_u = derivative_u(f), f_v = derivative_v(f);

  ScalarGrid Phi(g), Psi(g);
  std::size_t degenerate = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    InvariantJet jet{g1.data()[k], g2.data()[k], a.data()[k], a_u.data()[k],
                     a_v.data()[k], f_u.data()[k], f_v.data()[k]};
    try {
      const FirstFormRoots r = eg_from_invariants(jet);
      Phi.data()[k] = r.sqrtE;
      Psi.data()[k] = r.sqrtMinusG;
    } catch (const Error&) {
      ++degenerate;
    }
  }
  ReconstructDiagnostics diag;
  if (degenerate == 0) {
    diag.route = "first-form inversion";
  } else {
    bool sampled = true;
    for (const InvariantPoint& p : fld.points()) {
      if (!(p.sqrtE > 0.0) || !(p.sqrtMinusG > 0.0)) sampled = false;
    }
    diag.warnings.push_back(
        fmt::format("first-form inversion degenerate at {} of {} nodes", degenerate, g.size()));
    if (!sampled) {
      Reconstruction r = reconstruct_from_a_alpha(a, alpha, base, opts);
      r.diagnostics.route = "canonical (inversion degenerate)";
      r.diagnostics.warnings.insert(r.diagnostics.warnings.begin(), diag.warnings.begin(),
                                    diag.warnings.end());
      return r;
    }
    diag.route = "sampled first form";
    Phi = fld.component(&InvariantPoint::sqrtE);
    Psi = fld.component(&InvariantPoint::sqrtMinusG);
  }
  return finish(a, alpha, g1, g2, std::move(Phi), std::move(Psi), base, opts, std::move(diag));
}

}  // namespace tlsurf
