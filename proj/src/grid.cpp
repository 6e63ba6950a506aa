#include "tlsurf/grid.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "tlsurf/error.hpp"

namespace tlsurf {

namespace {

std::optional<std::size_t> find_node(double lo, double h, std::size_t n, double value,
                                     double rel_tol) {
  if (n == 1) {
    if (std::abs(value - lo) <= rel_tol * std::max(1.0, std::abs(lo))) return 0;
    return std::nullopt;
  }
  const double t = (value - lo) / h;
  const double k = std::round(t);
  if (k < 0.0 || k > static_cast<double>(n - 1) || std::abs(t - k) > rel_tol) return std::nullopt;
  return static_cast<std::size_t>(k);
}

std::size_t nearest(double lo, double h, std::size_t n, double value) {
  if (n == 1) return 0;
  const double k = std::round((value - lo) / h);
  return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(n - 1)));
}

}  // namespace

std::optional<std::size_t> GridSpec::u_node(double value, double rel_tol) const {
  return find_node(u_min, hu(), nu, value, rel_tol);
}
std::optional<std::size_t> GridSpec::v_node(double value, double rel_tol) const {
  return find_node(v_min, hv(), nv, value, rel_tol);
}
std::size_t GridSpec::nearest_u_node(double value) const { return nearest(u_min, hu(), nu, value); }
std::size_t GridSpec::nearest_v_node(double value) const { return nearest(v_min, hv(), nv, value); }

void GridSpec::validate(std::size_t min_nodes) const {
  if (nu < min_nodes || nv < min_nodes) {
    throw Error(ErrorCode::InvalidInput,
                fmt::format("grid {}x{} needs at least {} nodes per direction", nu, nv, min_nodes));
  }
  const bool u_ok = nu == 1 ? u_max >= u_min : u_max > u_min;
  const bool v_ok = nv == 1 ? v_max >= v_min : v_max > v_min;
  if (!u_ok || !v_ok || !std::isfinite(u_min + u_max + v_min + v_max)) {
    throw Error(ErrorCode::InvalidInput,
                fmt::format("degenerate domain [{}, {}] x [{}, {}]", u_min, u_max, v_min, v_max));
  }
}

std::size_t MaskedGrid::count() const {
  return static_cast<std::size_t>(std::count(present.begin(), present.end(), 1));
}

double MaskedGrid::max_abs() const { return max_abs_inside(0); }

double MaskedGrid::max_abs_inside(std::size_t margin) const {
  const GridSpec& s = values.spec();
  double m = 0.0;
  for (std::size_t j = margin; j + margin < s.nv; ++j)
    for (std::size_t i = margin; i + margin < s.nu; ++i)
      if (has(i, j)) m = std::max(m, std::abs(values(i, j)));
  return m;
}

namespace {

// First derivative along a line of n samples with spacing h. Edge nodes use
// the central stencil with a cubically extrapolated ghost sample, so the
// truncation error stays smooth up to the boundary.
template <class Get>
double d1(Get f, std::size_t k, std::size_t n, double h) {
  if (n < 2) return 0.0;
  if (n == 2) return (f(1) - f(0)) / h;
  if (n == 3) {
    if (k == 0) return (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h);
    if (k == 2) return (3.0 * f(2) - 4.0 * f(1) + f(0)) / (2.0 * h);
  }
  if (k == 0) return (-4.0 * f(0) + 7.0 * f(1) - 4.0 * f(2) + f(3)) / (2.0 * h);
  if (k == n - 1)
    return (4.0 * f(n - 1) - 7.0 * f(n - 2) + 4.0 * f(n - 3) - f(n - 4)) / (2.0 * h);
  return (f(k + 1) - f(k - 1)) / (2.0 * h);
}

template <class Get>
double d2(Get f, std::size_t k, std::size_t n, double h) {
  if (n < 3) return 0.0;
  const double h2 = h * h;
  if (n == 3) return (f(0) - 2.0 * f(1) + f(2)) / h2;
  if (k == 0) return (2.0 * f(0) - 5.0 * f(1) + 4.0 * f(2) - f(3)) / h2;
  if (k == n - 1) return (2.0 * f(n - 1) - 5.0 * f(n - 2) + 4.0 * f(n - 3) - f(n - 4)) / h2;
  return (f(k + 1) - 2.0 * f(k) + f(k - 1)) / h2;
}

}  // namespace

ScalarGrid derivative_u(const ScalarGrid& g) {
  const GridSpec& s = g.spec();
  return map_grid(s, [&](std::size_t i, std::size_t j) {
    return d1([&](std::size_t k) { return g(k, j); }, i, s.nu, s.hu());
  });
}

ScalarGrid derivative_v(const ScalarGrid& g) {
  const GridSpec& s = g.spec();
  return map_grid(s, [&](std::size_t i, std::size_t j) {
    return d1([&](std::size_t k) { return g(i, k); }, j, s.nv, s.hv());
  });
}

ScalarGrid derivative_uu(const ScalarGrid& g) {
  const GridSpec& s = g.spec();
  return map_grid(s, [&](std::size_t i, std::size_t j) {
    return d2([&](std::size_t k) { return g(k, j); }, i, s.nu, s.hu());
  });
}

ScalarGrid derivative_vv(const ScalarGrid& g) {
  const GridSpec& s = g.spec();
  return map_grid(s, [&](std::size_t i, std::size_t j) {
    return d2([&](std::size_t k) { return g(i, k); }, j, s.nv, s.hv());
  });
}

ScalarGrid derivative_uv(const ScalarGrid& g) { return derivative_u(derivative_v(g)); }

}  // namespace tlsurf
