#include "tlsurf/numerics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "tlsurf/error.hpp"

namespace tlsurf {

namespace {

// Integral over cell [x_c, x_{c+1}] of a line with n samples.
double cell_integral(std::span<const double> f, double h, std::size_t c) {
  const std::size_t n = f.size();
  if (n < 4) return 0.5 * h * (f[c] + f[c + 1]);
  if (c == 0) return h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
  if (c + 2 == n) return h / 24.0 * (f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1]);
  return h / 24.0 * (-f[c - 1] + 13.0 * f[c] + 13.0 * f[c + 1] - f[c + 2]);
}

// Fills out[k] for k >= base.
void integrate_forward(std::span<const double> f, double h, std::size_t base,
                       std::vector<double>& out) {
  const std::size_t n = f.size();
  double simpson = 0.0;  // integral from base to base + 2m
  out[base] = 0.0;
  for (std::size_t k = base + 1; k < n; ++k) {
    const std::size_t m = k - base;
    if (m % 2 == 0) {
      simpson += h / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
      out[k] = simpson;
    } else {
      out[k] = simpson + cell_integral(f, h, k - 1);
    }
  }
}

}  // namespace

std::vector<double> cumulative_integral(std::span<const double> f, double h, std::size_t base) {
  const std::size_t n = f.size();
  if (base >= n) throw Error(ErrorCode::InvalidInput, "integration base outside the line");
  std::vector<double> out(n, 0.0);
  integrate_forward(f, h, base, out);
  if (base > 0) {
    std::vector<double> rev(f.rbegin(), f.rend());
    std::vector<double> back(n, 0.0);
    integrate_forward(rev, h, n - 1 - base, back);
    for (std::size_t k = 0; k < base; ++k) out[k] = -back[n - 1 - k];
  }
  return out;
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw Error(ErrorCode::InvalidInput, "monotone cubic needs >= 2 samples");
  d_.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t a = k == 0 ? 0 : k - 1;
    const std::size_t b = k + 1 == n ? k : k + 1;
    d_[k] = (y_[b] - y_[a]) / (x_[b] - x_[a]);
  }
  limit();
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y, std::vector<double> slopes)
    : x_(std::move(x)), y_(std::move(y)), d_(std::move(slopes)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n || d_.size() != n) {
    throw Error(ErrorCode::InvalidInput, "monotone cubic needs matching samples and slopes");
  }
  limit();
}

void MonotoneCubic::limit() {
  for (std::size_t k = 0; k + 1 < x_.size(); ++k) {
    if (!(x_[k + 1] > x_[k])) throw Error(ErrorCode::InvalidInput, "abscissae must increase strictly");
  }
  for (std::size_t k = 0; k + 1 < x_.size(); ++k) {
    const double delta = (y_[k + 1] - y_[k]) / (x_[k + 1] - x_[k]);
    if (delta == 0.0) {
      d_[k] = 0.0;
      d_[k + 1] = 0.0;
      continue;
    }
    double alpha = d_[k] / delta;
    double beta = d_[k + 1] / delta;
    if (alpha < 0.0) d_[k] = alpha = 0.0;
    if (beta < 0.0) d_[k + 1] = beta = 0.0;
    const double r2 = alpha * alpha + beta * beta;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      d_[k] = tau * alpha * delta;
      d_[k + 1] = tau * beta * delta;
    }
  }
}

double MonotoneCubic::operator()(double t) const {
  const double span = x_.back() - x_.front();
  const double slack = 1e-12 * span;
  if (t < x_.front() - slack || t > x_.back() + slack) {
    throw Error(ErrorCode::InterpolationOutOfRange,
                fmt::format("{} outside [{}, {}]", t, x_.front(), x_.back()));
  }
  t = std::clamp(t, x_.front(), x_.back());
  auto it = std::upper_bound(x_.begin(), x_.end(), t);
  std::size_t k = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  if (k + 1 >= x_.size()) k = x_.size() - 2;
  const double h = x_[k + 1] - x_[k];
  const double s = (t - x_[k]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * y_[k] + h10 * h * d_[k] + h01 * y_[k + 1] + h11 * h * d_[k + 1];
}

namespace {

struct Stencil {
  std::size_t first = 0;
  std::size_t count = 0;
  double w[4] = {0, 0, 0, 0};
};

Stencil line_stencil(std::size_t n, double x0, double h, double t) {
  Stencil s;
  if (n == 1) {
    s.count = 1;
    s.w[0] = 1.0;
    return s;
  }
  const double pos = (t - x0) / h;
  const double last = static_cast<double>(n - 1);
  if (pos < -1e-9 || pos > last + 1e-9) {
    throw Error(ErrorCode::InterpolationOutOfRange,
                fmt::format("{} outside [{}, {}]", t, x0, x0 + last * h));
  }
  const double p = std::clamp(pos, 0.0, last);
  if (n < 4) {
    const std::size_t k = std::min(static_cast<std::size_t>(p), n - 2);
    const double s1 = p - static_cast<double>(k);
    s.first = k;
    s.count = 2;
    s.w[0] = 1.0 - s1;
    s.w[1] = s1;
    return s;
  }
  const double fl = std::floor(p);
  std::size_t k0 = fl < 1.0 ? 0 : static_cast<std::size_t>(fl) - 1;
  k0 = std::min(k0, n - 4);
  s.first = k0;
  s.count = 4;
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b == a) continue;
      w *= (p - static_cast<double>(k0 + b)) / static_cast<double>(a - b);
    }
    s.w[a] = w;
  }
  return s;
}

}  // namespace

double interpolate_line(std::span<const double> f, double x0, double h, double t) {
  const Stencil s = line_stencil(f.size(), x0, h, t);
  double r = 0.0;
  for (std::size_t a = 0; a < s.count; ++a) r += s.w[a] * f[s.first + a];
  return r;
}

double interpolate_cubic(const ScalarGrid& g, double u, double v) {
  const GridSpec& sp = g.spec();
  const Stencil su = line_stencil(sp.nu, sp.u_min, sp.hu(), u);
  const Stencil sv = line_stencil(sp.nv, sp.v_min, sp.hv(), v);
  double r = 0.0;
  for (std::size_t b = 0; b < sv.count; ++b) {
    double row = 0.0;
    for (std::size_t a = 0; a < su.count; ++a) row += su.w[a] * g(su.first + a, sv.first + b);
    r += sv.w[b] * row;
  }
  return r;
}

}  // namespace tlsurf
