#include "tlsurf/pde.hpp"

#include <cmath>

#include <fmt/core.h>

#include "tlsurf/error.hpp"

namespace tlsurf {

GoursatProblem GoursatProblem::from_expressions(double U, double V, std::size_t nu, std::size_t nv,
                                                const Expr& bu, const Expr& bv) {
  GoursatProblem p;
  p.U = U;
  p.V = V;
  p.nu = nu;
  p.nv = nv;
  const GridSpec g = p.grid();
  g.validate(2);
  p.omega_u0.resize(nu);
  p.omega_0v.resize(nv);
  for (std::size_t i = 0; i < nu; ++i) p.omega_u0[i] = eval(bu, g.u(i), 0.0);
  for (std::size_t j = 0; j < nv; ++j) p.omega_0v[j] = eval(bv, 0.0, g.v(j));
  return p;
}

void GoursatProblem::validate() const {
  grid().validate(2);
  if (omega_u0.size() != nu || omega_0v.size() != nv) {
    throw Error(ErrorCode::InvalidInput, "boundary data do not match the grid");
  }
  if (std::abs(omega_u0.front() - omega_0v.front()) > 1e-12) {
    throw Error(ErrorCode::InvalidInput,
                fmt::format("corner values disagree: {} vs {}", omega_u0.front(), omega_0v.front()));
  }
}

ScalarGrid solve_cosh_gordon(const GoursatProblem& p, const CoshGordonOptions& opts) {
  p.validate();
  const GridSpec g = p.grid();
  const double h = g.hu(), k = g.hv();
  ScalarGrid w(g);
  for (std::size_t i = 0; i < g.nu; ++i) w(i, 0) = p.omega_u0[i];
  for (std::size_t j = 0; j < g.nv; ++j) w(0, j) = p.omega_0v[j];
  for (std::size_t j = 1; j < g.nv; ++j) {
    for (std::size_t i = 1; i < g.nu; ++i) {
      const double sw = w(i - 1, j - 1), se = w(i, j - 1), nw = w(i - 1, j);
      const double s = p.source ? p.source(g.u(i) - 0.5 * h, g.v(j) - 0.5 * k) : 0.0;
      const double base = se + nw - sw;
      const double pred = base + h * k * (s - std::cosh(0.5 * (se + nw)));
      const double mean = 0.25 * (sw + se + nw + pred);
      const double val = base + h * k * (s - std::cosh(mean));
      if (!(std::abs(val) <= opts.divergence_bound)) {
        throw Error(ErrorCode::Divergence,
                    fmt::format("|omega| = {} exceeds {} in cell ending at ({}, {})", std::abs(val),
                                opts.divergence_bound, g.u(i), g.v(j)));
      }
      w(i, j) = val;
    }
  }
  return w;
}

MaskedGrid cosh_gordon_residual(const ScalarGrid& omega,
                                const std::function<double(double, double)>& source) {
  const GridSpec& g = omega.spec();
  const ScalarGrid w_uv = derivative_uv(omega);
  MaskedGrid r(g);
  for (std::size_t j = 1; j + 1 < g.nv; ++j)
    for (std::size_t i = 1; i + 1 < g.nu; ++i) {
      const double s = source ? source(g.u(i), g.v(j)) : 0.0;
      r.set(i, j, w_uv(i, j) + std::cosh(omega(i, j)) - s);
    }
  return r;
}

MaskedGrid constant_k_residual(const ScalarGrid& a) {
  const GridSpec& g = a.spec();
  const ScalarGrid a_u = derivative_u(a), a_v = derivative_v(a), a_uv = derivative_uv(a);
  MaskedGrid r(g);
  for (std::size_t j = 1; j + 1 < g.nv; ++j)
    for (std::size_t i = 1; i + 1 < g.nu; ++i) {
      const double q = 1.0 + a(i, j) * a(i, j);
      r.set(i, j, a_uv(i, j) / q - a(i, j) * a_u(i, j) * a_v(i, j) / (q * q) + 1.0);
    }
  return r;
}

MaskedGrid minimal_k_residual(const ScalarGrid& K) {
  const GridSpec& g = K.spec();
  ScalarGrid l(g);
  for (std::size_t j = 0; j < g.nv; ++j)
    for (std::size_t i = 0; i < g.nu; ++i) {
      if (!(K(i, j) > 0.0)) {
        throw Error(ErrorCode::NonPositiveK, fmt::format("K = {} at node ({}, {})", K(i, j), i, j));
      }
      l(i, j) = 0.5 * std::log(K(i, j));
    }
  const ScalarGrid l_uu = derivative_uu(l), l_vv = derivative_vv(l);
  MaskedGrid r(g);
  for (std::size_t j = 1; j + 1 < g.nv; ++j)
    for (std::size_t i = 1; i + 1 < g.nu; ++i) {
      r.set(i, j, l_uu(i, j) - l_vv(i, j) - 2.0 * std::sqrt(K(i, j)));
    }
  return r;
}

}  // namespace tlsurf
