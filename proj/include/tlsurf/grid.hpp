#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace tlsurf {

/// Uniform node lattice over [u_min, u_max] x [v_min, v_max]. Node (i, j)
/// sits at (u_min + i hu, v_min + j hv); storage is v-outer, u-inner.
struct GridSpec {
  double u_min = 0.0;
  double u_max = 1.0;
  double v_min = 0.0;
  double v_max = 1.0;
  std::size_t nu = 2;
  std::size_t nv = 2;

  double hu() const { return nu > 1 ? (u_max - u_min) / static_cast<double>(nu - 1) : 0.0; }
  double hv() const { return nv > 1 ? (v_max - v_min) / static_cast<double>(nv - 1) : 0.0; }
  double u(std::size_t i) const { return nu > 1 ? u_min + static_cast<double>(i) * hu() : u_min; }
  double v(std::size_t j) const { return nv > 1 ? v_min + static_cast<double>(j) * hv() : v_min; }
  std::size_t size() const { return nu * nv; }
  std::size_t index(std::size_t i, std::size_t j) const { return j * nu + i; }
  bool interior(std::size_t i, std::size_t j) const {
    return i > 0 && j > 0 && i + 1 < nu && j + 1 < nv;
  }

  /// Index of the u-node within `rel_tol * hu` of the value, if any.
  std::optional<std::size_t> u_node(double value, double rel_tol = 1e-6) const;
  std::optional<std::size_t> v_node(double value, double rel_tol = 1e-6) const;
  std::size_t nearest_u_node(double value) const;
  std::size_t nearest_v_node(double value) const;

  /// Throws Error(InvalidInput) for empty or inverted ranges.
  void validate(std::size_t min_nodes = 1) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Node position on a grid.
struct GridIndex {
  std::size_t i = 0;
  std::size_t j = 0;
  friend bool operator==(const GridIndex&, const GridIndex&) = default;
};

template <class T>
class Grid {
 public:
  Grid() = default;
  explicit Grid(const GridSpec& spec, const T& fill = T{})
      : spec_(spec), data_(spec.size(), fill) {}

  const GridSpec& spec() const { return spec_; }
  std::size_t nu() const { return spec_.nu; }
  std::size_t nv() const { return spec_.nv; }

  T& operator()(std::size_t i, std::size_t j) { return data_[spec_.index(i, j)]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[spec_.index(i, j)]; }
  T& operator()(const GridIndex& k) { return (*this)(k.i, k.j); }
  const T& operator()(const GridIndex& k) const { return (*this)(k.i, k.j); }

  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

 private:
  GridSpec spec_;
  std::vector<T> data_;
};

using ScalarGrid = Grid<double>;

/// Grid of values of which only some nodes carry data (residuals are only
/// defined where the central stencil fits, some nodes are masked, ...).
struct MaskedGrid {
  ScalarGrid values;
  std::vector<std::uint8_t> present;

  MaskedGrid() = default;
  explicit MaskedGrid(const GridSpec& spec) : values(spec, 0.0), present(spec.size(), 0) {}

  void set(std::size_t i, std::size_t j, double value) {
    values(i, j) = value;
    present[values.spec().index(i, j)] = 1;
  }
  bool has(std::size_t i, std::size_t j) const { return present[values.spec().index(i, j)] != 0; }
  std::size_t count() const;
  /// Max |value| over present nodes; 0 when none are present.
  double max_abs() const;
  /// Max |value| over present nodes at least `margin` nodes from the edge.
  double max_abs_inside(std::size_t margin) const;
};

/// Partial derivatives of grid data. Interior nodes use the central
/// second-order stencil; edge nodes extrapolate a ghost sample with a cubic.
ScalarGrid derivative_u(const ScalarGrid& g);
ScalarGrid derivative_v(const ScalarGrid& g);
ScalarGrid derivative_uu(const ScalarGrid& g);
ScalarGrid derivative_vv(const ScalarGrid& g);
/// derivative_u(derivative_v(g)); equals the 4-point cross stencil inside.
ScalarGrid derivative_uv(const ScalarGrid& g);

template <class F>
ScalarGrid map_grid(const GridSpec& spec, F&& f) {
  ScalarGrid out(spec);
  for (std::size_t j = 0; j < spec.nv; ++j)
    for (std::size_t i = 0; i < spec.nu; ++i) out(i, j) = f(i, j);
  return out;
}

}  // namespace tlsurf
