#include "tlsurf/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "tlsurf/error.hpp"
#include "tlsurf/numerics.hpp"

namespace tlsurf {

namespace {

GridIndex base_node(const GridSpec& g, double u0, double v0) {
  auto i = g.u_node(u0);
  auto j = g.v_node(v0);
  if (!i || !j) {
    throw Error(ErrorCode::InvalidInput, fmt::format("base ({}, {}) is not a grid node", u0, v0));
  }
  return {*i, *j};
}

// Mean of the samples; writes the relative spread into `spread`.
double average(const std::vector<double>& xs, double& spread) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
  for (double x : xs) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    sum += x;
  }
  const double mean = sum / static_cast<double>(xs.size());
  spread = (hi - lo) / std::abs(mean);
  return mean;
}

}  // namespace

GaugePair gauge_functions(const InvariantField& fld, double u0, double v0, const GaugeOptions& opts) {
  const GridSpec& g = fld.grid();
  const GridIndex b = base_node(g, u0, v0);
  const std::size_t nu = g.nu, nv = g.nv;

  // The f_u, f_v parts of the exponents integrate to differences of f, so
  // only the a-coupled terms need quadrature.
  ScalarGrid cu(g), cv(g);  // d/du and d/dv of the extra exponent terms
  for (std::size_t j = 0; j < nv; ++j)
    for (std::size_t i = 0; i < nu; ++i) {
      const InvariantPoint& p = fld.at(i, j);
      if (!(p.sqrtE > 0.0) || !(p.sqrtMinusG > 0.0)) {
        throw Error(ErrorCode::WrongSignature,
                    fmt::format("need sqrtE > 0 and sqrtMinusG > 0 at node ({}, {})", i, j));
      }
      cu(i, j) = -p.a * p.f_v * p.sqrtE / p.sqrtMinusG;
      cv(i, j) = p.a * p.f_u * p.sqrtMinusG / p.sqrtE;
    }

  auto column = [&](const ScalarGrid& s, std::size_t i) {
    std::vector<double> c(nv);
    for (std::size_t j = 0; j < nv; ++j) c[j] = s(i, j);
    return c;
  };
  auto row = [&](const ScalarGrid& s, std::size_t j) {
    std::vector<double> r(nu);
    for (std::size_t i = 0; i < nu; ++i) r[i] = s(i, j);
    return r;
  };

  const std::vector<double> Ju = cumulative_integral(row(cu, b.j), g.hu(), b.i);
  const std::vector<double> Kv = cumulative_integral(column(cv, b.i), g.hv(), b.j);

  GaugePair out;
  out.base = b;
  out.u0 = u0;
  out.v0 = v0;
  out.u.resize(nu);
  out.v.resize(nv);
  for (std::size_t i = 0; i < nu; ++i) out.u[i] = g.u(i);
  for (std::size_t j = 0; j < nv; ++j) out.v[j] = g.v(j);

  auto check_positive = [](double x, const char* name, std::size_t i, std::size_t j) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw Error(ErrorCode::NonPositiveGauge,
                  fmt::format("{} = {} at node ({}, {})", name, x, i, j));
    }
  };

  double worst = 0.0;
  out.phi.resize(nu);
  for (std::size_t i = 0; i < nu; ++i) {
    const std::vector<double> Jv = cumulative_integral(column(cv, i), g.hv(), b.j);
    std::vector<double> vals(nv);
    for (std::size_t j = 0; j < nv; ++j) {
      const InvariantPoint& p = fld.at(i, j);
      vals[j] = p.sqrtE * std::exp(-p.f - Jv[j] - Ju[i]);
      check_positive(vals[j], "phi", i, j);
    }
    double spread = 0.0;
    out.phi[i] = average(vals, spread);
    worst = std::max(worst, spread);
  }
  out.psi.resize(nv);
  for (std::size_t j = 0; j < nv; ++j) {
    const std::vector<double> Ku = cumulative_integral(row(cu, j), g.hu(), b.i);
    std::vector<double> vals(nu);
    for (std::size_t i = 0; i < nu; ++i) {
      const InvariantPoint& p = fld.at(i, j);
      vals[i] = p.sqrtMinusG * std::exp(-p.f - Ku[i] - Kv[j]);
      check_positive(vals[i], "psi", i, j);
    }
    double spread = 0.0;
    out.psi[j] = average(vals, spread);
    worst = std::max(worst, spread);
  }
  out.cross_variation = worst;
  if (worst > opts.cross_variation_tolerance) {
    throw Error(ErrorCode::CrossVariationTooLarge,
                fmt::format("gauge functions vary across lines by {:.3e} (tolerance {:.1e}); data "
                            "are inconsistent with the first-form system",
                            worst, opts.cross_variation_tolerance));
  }
  return out;
}

Canonicity is_canonical(const InvariantField& fld, double u0, double v0, double tol,
                        const GaugeOptions& opts) {
  const GaugePair gp = gauge_functions(fld, u0, v0, opts);
  double dev = 0.0;
  for (double x : gp.phi) dev = std::max(dev, std::abs(x - 1.0));
  for (double x : gp.psi) dev = std::max(dev, std::abs(x - 1.0));
  return {dev < tol, dev};
}

namespace {

struct AxisMap {
  std::vector<double> forward;  // ubar at input nodes
  std::vector<double> out;      // output nodes in ubar
  std::vector<double> inverse;  // u at output nodes
  double h = 0.0;
};

AxisMap axis_map(const std::vector<double>& x, const std::vector<double>& gauge, double h,
                 std::size_t base) {
  const std::size_t n = x.size();
  AxisMap m;
  const std::vector<double> I = cumulative_integral(gauge, h, base);
  m.forward.resize(n);
  for (std::size_t k = 0; k < n; ++k) m.forward[k] = x[base] + I[k];
  if (n < 2) {
    m.out = m.forward;
    m.inverse = x;
    return m;
  }
  const double left = base > 0 ? (x[base] - m.forward.front()) / static_cast<double>(base)
                               : std::numeric_limits<double>::infinity();
  const double right = base + 1 < n ? (m.forward.back() - x[base]) / static_cast<double>(n - 1 - base)
                                    : std::numeric_limits<double>::infinity();
  m.h = std::min(left, right);
  std::vector<double> slopes(n);
  for (std::size_t k = 0; k < n; ++k) slopes[k] = 1.0 / gauge[k];
  const MonotoneCubic inv(m.forward, x, slopes);
  m.out.resize(n);
  m.inverse.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = x[base] + (static_cast<double>(k) - static_cast<double>(base)) * m.h;
    m.out[k] = k == base ? x[base] : t;
    m.inverse[k] = k == base ? x[base] : inv(t);
  }
  return m;
}

}  // namespace

CanonicalResult canonicalize(const InvariantField& fld, double u0, double v0,
                             const GaugeOptions& opts) {
  const GaugePair gp = gauge_functions(fld, u0, v0, opts);
  const GridSpec& g = fld.grid();
  const AxisMap mu = axis_map(gp.u, gp.phi, g.hu(), gp.base.i);
  const AxisMap mv = axis_map(gp.v, gp.psi, g.hv(), gp.base.j);

  GridSpec out_grid = g;
  out_grid.u_min = mu.out.front();
  out_grid.u_max = mu.out.back();
  out_grid.v_min = mv.out.front();
  out_grid.v_max = mv.out.back();

  using M = double InvariantPoint::*;
  static const M members[] = {&InvariantPoint::a,      &InvariantPoint::alpha,
                              &InvariantPoint::f,      &InvariantPoint::gamma1,
                              &InvariantPoint::gamma2, &InvariantPoint::sqrtE,
                              &InvariantPoint::sqrtMinusG, &InvariantPoint::a_u,
                              &InvariantPoint::a_v,    &InvariantPoint::f_u,
                              &InvariantPoint::f_v};
  std::vector<ScalarGrid> comps;
  for (M m : members) comps.push_back(fld.component(m));

  std::vector<InvariantPoint> pts(out_grid.size());
  for (std::size_t j = 0; j < out_grid.nv; ++j) {
    const double v = mv.inverse[j];
    const double psi = interpolate_line(gp.psi, g.v_min, g.hv(), v);
    for (std::size_t i = 0; i < out_grid.nu; ++i) {
      const double u = mu.inverse[i];
      const double phi = interpolate_line(gp.phi, g.u_min, g.hu(), u);
      InvariantPoint p;
      for (std::size_t k = 0; k < std::size(members); ++k) {
        p.*members[k] = interpolate_cubic(comps[k], u, v);
      }
      p.sqrtE /= phi;
      p.a_u /= phi;
      p.f_u /= phi;
      p.sqrtMinusG /= psi;
      p.a_v /= psi;
      p.f_v /= psi;
      p.gamma_crosscheck = std::numeric_limits<double>::quiet_NaN();
      pts[out_grid.index(i, j)] = p;
    }
  }

  CanonicalResult r{ReparamMap{}, InvariantField(out_grid, std::move(pts), fld.derivative_source()),
                    gp};
  r.map.u = gp.u;
  r.map.ubar = mu.forward;
  r.map.v = gp.v;
  r.map.vbar = mv.forward;
  r.map.ubar_out = mu.out;
  r.map.u_of_ubar = mu.inverse;
  r.map.vbar_out = mv.out;
  r.map.v_of_vbar = mv.inverse;
  r.map.u0 = u0;
  r.map.v0 = v0;
  return r;
}

}  // namespace tlsurf
