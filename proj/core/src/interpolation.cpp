#include "renewal_ld/interpolation.hpp"

#include <algorithm>
#include <cmath>

#include "renewal_ld/errors.hpp"

namespace renewal_ld {
namespace {

// Derivative at x[i] of the Lagrange polynomial through x[lo..lo+n).
double stencil_derivative(const std::vector<double>& x, const std::vector<double>& y,
                          std::size_t lo, std::size_t n, std::size_t i) {
  double total = 0.0;
  for (std::size_t j = lo; j < lo + n; ++j) {
    double w;
    if (j == i) {
      w = 0.0;
      for (std::size_t l = lo; l < lo + n; ++l) {
        if (l != i) w += 1.0 / (x[i] - x[l]);
      }
    } else {
      double num = 1.0;
      double den = 1.0;
      for (std::size_t l = lo; l < lo + n; ++l) {
        if (l == j) continue;
        den *= x[j] - x[l];
        if (l != i) num *= x[i] - x[l];
      }
      w = num / den;
    }
    total += w * y[j];
  }
  return total;
}

}  // namespace

LogLogInterpolant::LogLogInterpolant(std::span<const double> times,
                                     std::span<const double> values, double floor) {
  if (times.size() != values.size() || times.size() < 3 || times[0] != 0.0) {
    throw ContractViolation("LogLogInterpolant: need >= 3 nodes starting at t=0");
  }
  value_at_zero_ = values[0];
  const std::size_t n = times.size() - 1;
  x_.resize(n);
  y_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    x_[i] = std::log(times[i + 1]);
    y_[i] = std::log(std::max(values[i + 1], floor));
  }

  d_.assign(n, 0.0);
  const std::size_t width = std::min<std::size_t>(5, n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = i >= width / 2 ? i - width / 2 : 0;
    lo = std::min(lo, n - width);
    d_[i] = stencil_derivative(x_, y_, lo, width, i);
  }

  // Monotonicity filter: where no secant within two intervals of a knot has
  // the opposite sign, force the derivative to that sign and cap it at three
  // times the smaller adjacent secant. Near a data extremum the stencil value
  // is kept.
  std::vector<double> secant(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    secant[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
  }
  const auto sec = [&](std::ptrdiff_t j) {
    return secant[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
        j, 0, static_cast<std::ptrdiff_t>(n) - 2))];
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    const double left = sec(ii - 1);
    const double right = sec(ii);
    if (left == 0.0 || right == 0.0) {
      d_[i] = 0.0;
      continue;
    }
    const double sign = left > 0.0 ? 1.0 : -1.0;
    bool monotone = true;
    for (std::ptrdiff_t j = ii - 2; j <= ii + 1; ++j) monotone = monotone && sign * sec(j) >= 0.0;
    if (!monotone) continue;
    const double cap = 3.0 * std::min(std::abs(left), std::abs(right));
    d_[i] = sign * std::clamp(sign * d_[i], 0.0, cap);
  }
}

double LogLogInterpolant::operator()(double t) const {
  if (t <= 0.0) return value_at_zero_;
  const double x = std::log(t);
  if (x <= x_.front()) {
    if (value_at_zero_ > 0.0) {
      // Quadratic in t through y(0), matching value and slope at the first knot.
      const double t1 = std::exp(x_.front());
      const double y0 = value_at_zero_;
      const double y1 = std::exp(y_.front());
      const double s1 = d_.front() * y1 / t1;
      const double c = (s1 * t1 - (y1 - y0)) / (t1 * t1);
      const double b = s1 - 2.0 * c * t1;
      const double q = y0 + t * (b + c * t);
      return std::clamp(q, std::min(y0, y1), std::max(y0, y1));
    }
    return std::exp(y_.front() + std::max(d_.front(), 0.0) * (x - x_.front()));
  }
  if (x >= x_.back()) {
    return std::exp(y_.back() + d_.back() * (x - x_.back()));
  }
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const auto i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double h = x_[i + 1] - x_[i];
  const double s = (x - x_[i]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return std::exp(h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1]);
}

}  // namespace renewal_ld
