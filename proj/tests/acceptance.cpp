// Acceptance criteria, one PASS/FAIL line each.

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "support.hpp"
#include "tlsurf/canonical.hpp"
#include "tlsurf/cli.hpp"
#include "tlsurf/error.hpp"
#include "tlsurf/invariants.hpp"
#include "tlsurf/pde.hpp"
#include "tlsurf/reconstruct.hpp"
#include "tlsurf/surface.hpp"

using namespace tlsurf;
using namespace testsupport;

namespace {

struct Check {
  std::vector<std::string> failures;
  std::vector<std::string> notes;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void note(const std::string& s) { notes.push_back(s); }
};

int exit_of(const std::string& fixture) {
  cli::RunConfig cfg;
  cfg.subcommand = "analyze";
  cfg.inputs = {std::string(TLSURF_FIXTURES) + "/" + fixture};
  std::ostringstream out, err;
  return cli::run(cfg, out, err);
}

std::string report_of(const std::string& fixture) {
  cli::RunConfig cfg;
  cfg.subcommand = "analyze";
  cfg.inputs = {std::string(TLSURF_FIXTURES) + "/" + fixture};
  std::ostringstream out, err;
  cli::run(cfg, out, err);
  return out.str();
}

ScalarGrid enneper_K(const GridSpec& g) {
  return map_grid(g, [&](std::size_t i, std::size_t j) {
    const double w = 1.0 - g.u(i) * g.u(i) + g.v(j) * g.v(j);
    return 16.0 / (w * w * w * w);
  });
}

LorentzMotion random_motion(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-0.5, 0.5);
  LorentzMotion m;
  m.A = boost(0, d(rng)) * rotation12(4.0 * d(rng)) * boost(1, d(rng));
  m.b = {4.0 * d(rng), 4.0 * d(rng), 4.0 * d(rng)};
  return m;
}

SurfacePatch truth_patch(const SurfaceDef& s) {
  SurfacePatch t;
  t.z = sample_positions(s);
  t.base = s.base_index();
  t.base_frame = asymptotic_frame_at(s, s.u0, s.v0);
  return t;
}

// 1. Forms of the positive Enneper surface against the closed forms.
void golden_forms(Check& c) {
  const GridSpec g = square(0.3, 41);
  const SurfaceDef s = enneper_pos(g);
  double e_forms = 0.0, e_K = 0.0, e_H = 0.0;
  for (std::size_t j = 0; j < g.nv; ++j)
    for (std::size_t i = 0; i < g.nu; ++i) {
      const double u = g.u(i), v = g.v(j);
      const FormCoefficients f = forms_at(s, u, v);
      const CurvaturePair k = curvatures(f);
      const EnneperClosedForm o = enneper_closed_form(u, v);
      const double scale = o.E;
      e_forms = std::max({e_forms, std::abs(f.E - o.E) / o.E, std::abs(f.G - o.G) / std::abs(o.G),
                          std::abs(f.F) / scale, std::abs(f.L) / scale, std::abs(f.N) / scale,
                          std::abs(f.M - o.M) / o.M});
      e_K = std::max(e_K, std::abs(k.K - o.K) / o.K);
      e_H = std::max(e_H, std::abs(k.H));
    }
  c.note(fmt::format("forms rel {:.2e}, K rel {:.2e}, |H| {:.2e}", e_forms, e_K, e_H));
  c.expect(e_forms < 1e-10, "forms");
  c.expect(e_K < 1e-9, "K");
  c.expect(e_H < 1e-10, "H");
}

// 2. Classification of the shipped examples.
void classification(Check& c) {
  const GridSpec g = square(0.3, 41);
  const ClassReport neg = classify_patch(enneper_neg(g));
  c.expect(neg.K_sign == Sign::Negative, "enneper_neg K < 0");
  c.expect(exit_of("enneper_neg.surf") == cli::kExitNotApplicable, "enneper_neg exit 3");

  const ClassReport rot = classify_patch(rotational({0.1, 0.7, -0.3, 0.3, 41, 41}));
  c.expect(rot.K_sign == Sign::Positive && rot.K_minus_H2_sign == Sign::Negative,
           "rotational K > 0, K - H^2 < 0");
  c.expect(exit_of("rotational.surf") == cli::kExitNotApplicable, "rotational exit 3");
  c.expect(report_of("rotational.surf").find("K-H^2<0") != std::string::npos,
           "rotational reason K-H^2<0");

  const ClassReport sph = classify_patch(lorentz_sphere(g));
  const double dK = std::max(std::abs(sph.K.min - 1.0), std::abs(sph.K.max - 1.0));
  const double dH = sph.H.max_abs();
  c.note(fmt::format("sphere |K-1| {:.2e}, |H| {:.3f}", dK, dH));
  c.expect(dK < 1e-9, "sphere K = 1");
  c.expect(dH < 1e-10, "sphere H = 0");

  const ClassReport iso = classify_patch(
      make_surface("cosh(u + v)/cosh(u - v)", "tanh(u - v)", "sinh(u + v)/cosh(u - v)", g));
  c.note(fmt::format("rotated sphere max |E| {:.1e}, |G| {:.1e}", iso.E.max_abs(), iso.G.max_abs()));
  c.expect(iso.E.max_abs() < 1e-9 && iso.G.max_abs() < 1e-9 && iso.isotropic, "rotated isotropic");
  c.expect(exit_of("lorentz_sphere_rotated.surf") == cli::kExitNotApplicable, "rotated exit 3");
}

// 3. Gauge functions and canonicalization.
void canonicity(Check& c) {
  const GridSpec g = square(0.3, 61);
  const InvariantField fld = build_invariant_field(enneper_pos(g));
  const Canonicity k = is_canonical(fld, 0.0, 0.0);
  c.note(fmt::format("deviation {:.2e}", k.deviation));
  c.expect(k.deviation < 1e-8, "canonical at base (0,0)");

  SurfaceDef scaled = reparametrize(enneper_pos(g), Expr::number(2.0) * Expr::var_u(), Expr::var_v(),
                                    {-0.15, 0.15, -0.3, 0.3, 61, 61}, 0.0, 0.0);
  const InvariantField sf = build_invariant_field(scaled);
  const GaugePair gp = gauge_functions(sf, 0.0, 0.0);
  double dphi = 0.0;
  for (double x : gp.phi) dphi = std::max(dphi, std::abs(x - 2.0));
  c.note(fmt::format("|phi-2| {:.2e}", dphi));
  c.expect(dphi < 1e-6, "phi = 2 on the scaled patch");
  const CanonicalResult cr = canonicalize(sf, 0.0, 0.0);
  const Canonicity after = is_canonical(cr.field, 0.0, 0.0);
  c.note(fmt::format("after canonicalize {:.2e}", after.deviation));
  c.expect(after.deviation < 1e-5, "canonicalize restores canonicity");
}

// 4. Compatibility residuals and their order.
void compatibility(Check& c) {
  double prev[3] = {0, 0, 0};
  for (std::size_t n : {61u, 121u}) {
    const InvariantField fld = build_invariant_field(enneper_pos(square(0.3, n)));
    const double r[3] = {gauss_residual(fld).max_abs(), codazzi_residual(fld).max_abs(),
                         system_residual(fld).max_abs()};
    if (n == 61) {
      c.note(fmt::format("h=0.01: {:.2e} {:.2e} {:.2e}", r[0], r[1], r[2]));
      for (int k = 0; k < 3; ++k) c.expect(r[k] < 5e-3, fmt::format("residual {} < 5e-3", k));
    } else {
      std::string ratios;
      for (int k = 0; k < 3; ++k) {
        const double q = prev[k] / r[k];
        ratios += fmt::format(" {:.3f}", q);
        c.expect(q >= 3.5 && q <= 4.5, fmt::format("residual {} order 2", k));
      }
      c.note("ratios" + ratios);
    }
    for (int k = 0; k < 3; ++k) prev[k] = r[k];
  }
}

ScalarGrid zero_boundary_omega(std::size_t n) {
  GoursatProblem p;
  p.U = p.V = 0.5;
  p.nu = p.nv = n;
  p.omega_u0.assign(n, 0.0);
  p.omega_0v.assign(n, 0.0);
  return solve_cosh_gordon(p);
}

// 5. Phi/Psi Cauchy problem.
void phi_psi(Check& c) {
  const GridSpec g = square(0.3, 121);
  const ScalarGrid a(g, 0.0);
  const ScalarGrid K = enneper_K(g);
  ScalarGrid alpha(g);
  for (std::size_t k = 0; k < g.size(); ++k) alpha.data()[k] = std::sqrt(K.data()[k]);
  const PhiPsiField pp = solve_phi_psi(a, alpha, {60, 60});
  double e = 0.0;
  for (std::size_t j = 0; j < g.nv; ++j)
    for (std::size_t i = 0; i < g.nu; ++i) {
      const double s = enneper_closed_form(g.u(i), g.v(j)).s;
      e = std::max({e, std::abs(pp.Phi(i, j) - s), std::abs(pp.Psi(i, j) - s)});
    }
  c.note(fmt::format("Enneper |Phi - s| {:.2e}", e));
  c.expect(e < 1e-3, "Enneper Phi, Psi");

  const ScalarGrid w = zero_boundary_omega(51);
  ScalarGrid ca(w.spec()), cal(w.spec());
  for (std::size_t k = 0; k < w.data().size(); ++k) {
    ca.data()[k] = std::sinh(w.data()[k]);
    cal.data()[k] = std::sqrt(1.0 + ca.data()[k] * ca.data()[k]);
  }
  const PhiPsiField cp = solve_phi_psi(ca, cal, {0, 0});
  double d = 0.0;
  for (std::size_t k = 0; k < w.data().size(); ++k) {
    d = std::max({d, std::abs(cp.Phi.data()[k] - 1.0), std::abs(cp.Psi.data()[k] - 1.0)});
  }
  c.note(fmt::format("constant K |Phi - 1| {:.1e}", d));
  c.expect(d < 1e-12, "constant K Phi = Psi = 1");
}

// 6. Round trip from (K, H).
void round_trip(Check& c) {
  const GridSpec g = square(0.3, 121);
  const ScalarGrid K = enneper_K(g);
  const ScalarGrid H(g, 0.0);
  const Reconstruction r = reconstruct_from_kh(K, H, Branch::Plus, {60, 60});
  const SurfacePatch truth = truth_patch(enneper_pos(g));
  const MotionComparison mc = compare_up_to_motion(r.patch, truth);
  const SampledCurvatures sc = curvatures_from_positions(r.patch.z);
  double dk = 0.0, dh = 0.0;
  for (std::size_t j = 1; j + 1 < g.nv; ++j)
    for (std::size_t i = 1; i + 1 < g.nu; ++i) {
      dk = std::max(dk, std::abs(sc.K.values(i, j) - K(i, j)));
      dh = std::max(dh, std::abs(sc.H.values(i, j)));
    }
  const ReconstructDiagnostics& d = r.diagnostics;
  c.note(fmt::format("rms {:.2e}, drift {:.2e}, closure {:.2e}, dK {:.2e}, dH {:.2e}", mc.rms,
                     d.drift, d.closure, dk, dh));
  c.expect(mc.rms < 1e-3, "rms");
  c.expect(d.drift < 1e-6, "drift");
  c.expect(d.closure < 1e-5, "closure");
  c.expect(dk < 1e-2 && dh < 1e-2, "recomputed K, H");
}

// 7. Equivariance under Lorentz motions.
void equivariance(Check& c) {
  const GridSpec g = square(0.3, 61);
  const ScalarGrid K = enneper_K(g);
  const ScalarGrid H(g, 0.0);
  const GridIndex base{30, 30};
  const Reconstruction r0 = reconstruct_from_kh(K, H, Branch::Plus, base);
  std::mt19937_64 rng(20240611);
  double worst = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    const LorentzMotion m = random_motion(rng);
    ReconstructOptions opts;
    opts.frame0 = m.linear(initial_frame(0.0));
    opts.z0 = m(MVec3{});
    const Reconstruction r1 = reconstruct_from_kh(K, H, Branch::Plus, base, opts);
    const LorentzMotion inv = m.inverse();
    double sum = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double e = euclidean_norm(inv(r1.patch.z.data()[k]) - r0.patch.z.data()[k]);
      sum += e * e;
    }
    worst = std::max(worst, std::sqrt(sum / static_cast<double>(g.size())));
  }
  c.note(fmt::format("rms {:.2e}", worst));
  c.expect(worst < 1e-9, "equivariance");
}

// 8. Constant curvature pipeline.
void constant_k(Check& c) {
  const ScalarGrid w1 = zero_boundary_omega(51), w2 = zero_boundary_omega(101);
  const double r1 = cosh_gordon_residual(w1).max_abs(), r2 = cosh_gordon_residual(w2).max_abs();
  ScalarGrid a(w1.spec()), alpha(w1.spec());
  for (std::size_t k = 0; k < w1.data().size(); ++k) {
    a.data()[k] = std::sinh(w1.data()[k]);
    alpha.data()[k] = std::sqrt(1.0 + a.data()[k] * a.data()[k]);
  }
  const double rk = constant_k_residual(a).max_abs();
  const Reconstruction rec = reconstruct_from_a_alpha(a, alpha, {0, 0});
  const SampledCurvatures sc = curvatures_from_positions(rec.patch.z);
  double dk = 0.0;
  for (std::size_t j = 1; j + 1 < w1.nv(); ++j)
    for (std::size_t i = 1; i + 1 < w1.nu(); ++i) dk = std::max(dk, std::abs(sc.K.values(i, j) - 1.0));
  c.note(fmt::format("cosh-Gordon {:.2e} (ratio {:.3f}), constant-K {:.2e}, |K-1| {:.2e}", r1,
                     r1 / r2, rk, dk));
  c.expect(r1 < 5e-3, "cosh-Gordon residual");
  c.expect(r1 / r2 >= 3.5 && r1 / r2 <= 4.5, "cosh-Gordon order 2");
  c.expect(rk < 1e-2, "constant-K residual");
  c.expect(dk < 5e-2, "reconstructed K = 1");
}

// 9. Minimal-case equation.
void minimal_case(Check& c) {
  const GridSpec g = square(0.3, 61);
  const double r = minimal_k_residual(enneper_K(g)).max_abs();
  double e = 0.0;
  for (double k : {0.25, 1.0, 7.0}) {
    const MaskedGrid m = minimal_k_residual(ScalarGrid(g, k));
    for (std::size_t j = 1; j + 1 < g.nv; ++j)
      for (std::size_t i = 1; i + 1 < g.nu; ++i) {
        e = std::max(e, std::abs(m.values(i, j) + 2.0 * std::sqrt(k)));
      }
  }
  c.note(fmt::format("Enneper {:.2e}, constant {:.1e}", r, e));
  c.expect(r < 5e-3, "Enneper minimal residual");
  c.expect(e < 1e-12, "constant K residual");
}

// 10. Invariants under Lorentz motions of the parametrization.
void motion_invariance(Check& c) {
  const GridSpec g = square(0.3, 41);
  const SurfaceDef s = enneper_pos(g);
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    const SurfaceDef t = apply_motion(s, random_motion(rng));
    for (std::size_t j = 0; j < g.nv; ++j)
      for (std::size_t i = 0; i < g.nu; ++i) {
        const double u = g.u(i), v = g.v(j);
        const InvariantPoint p = invariants_at(s, u, v), q = invariants_at(t, u, v);
        const CurvaturePair kp = curvatures(forms_at(s, u, v)), kq = curvatures(forms_at(t, u, v));
        worst = std::max({worst, std::abs(kp.K - kq.K), std::abs(kp.H - kq.H), std::abs(p.a - q.a),
                          std::abs(p.alpha - q.alpha), std::abs(p.gamma1 - q.gamma1),
                          std::abs(p.gamma2 - q.gamma2)});
      }
  }
  c.note(fmt::format("max change {:.2e}", worst));
  c.expect(worst < 1e-9, "invariants unchanged");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"golden forms", golden_forms},
      {"classification fixtures", classification},
      {"canonicity", canonicity},
      {"compatibility residuals", compatibility},
      {"Phi/Psi Cauchy problem", phi_psi},
      {"round trip from (K, H)", round_trip},
      {"equivariance under motions", equivariance},
      {"constant curvature pipeline", constant_k},
      {"minimal-case equation", minimal_case},
      {"motion invariance of invariants", motion_invariance},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    Check c;
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.failures.push_back(fmt::format("exception: {}", e.what()));
    }
    const bool ok = c.failures.empty();
    if (!ok) ++failed;
    std::string detail;
    for (const auto& n : c.notes) detail += (detail.empty() ? "" : "; ") + n;
    std::string fails;
    for (const auto& f : c.failures) fails += (fails.empty() ? "" : ", ") + f;
    std::printf("%s %2d %s: %s%s\n", ok ? "PASS" : "FAIL", index, name.c_str(), detail.c_str(),
                ok ? "" : (" [failed: " + fails + "]").c_str());
  }
  std::printf("%d of %d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
