#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tlsurf/grid.hpp"

namespace tlsurf {

/// I[k] = integral of the sampled f from x_base to x_k (negative for k <
/// base) on a uniform line of spacing h. Even spans use composite Simpson;
/// an odd span adds its last cell with the four-point cubic cell rule, so
/// every node is integrated to fourth order. Lines shorter than four nodes
/// fall back to the trapezoid rule.
std::vector<double> cumulative_integral(std::span<const double> f, double h, std::size_t base);

/// Piecewise cubic Hermite interpolant with Fritsch-Carlson slope limiting,
/// monotone whenever the data are.
class MonotoneCubic {
 public:
  /// Slopes estimated from the data (three-point, then limited).
  MonotoneCubic(std::vector<double> x, std::vector<double> y);
  /// Given slopes, limited where they would break monotonicity.
  MonotoneCubic(std::vector<double> x, std::vector<double> y, std::vector<double> slopes);

  /// Throws Error(InterpolationOutOfRange) outside [x.front(), x.back()].
  double operator()(double t) const;
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

 private:
  void limit();
  std::vector<double> x_, y_, d_;
};

/// Four-point Lagrange interpolation on a uniform line starting at x0.
double interpolate_line(std::span<const double> f, double x0, double h, double t);

/// Tensor-product cubic Lagrange interpolation of grid data. Throws
/// Error(InterpolationOutOfRange) outside the grid rectangle.
double interpolate_cubic(const ScalarGrid& g, double u, double v);

}  // namespace tlsurf
