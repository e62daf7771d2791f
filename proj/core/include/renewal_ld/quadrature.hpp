#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace renewal_ld {

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussLegendreRule& gauss_legendre(std::size_t n);

/// Acceptance test per panel: |G20 - G10| <= max(abs share, rel * |G20|).
struct QuadratureTolerance {
  double abs = 1e-10;
  double rel = 1e-10;
  int max_depth = 30;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // summed panel estimates
  bool converged = true;
  double failed_at = 0.0;  // a panel midpoint that hit max_depth
};

namespace detail {

template <class F>
double apply_rule(const GaussLegendreRule& rule, F& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

template <class F>
void adapt_panel(F& f, double a, double b, double abs_tol, double rel_tol, int depth,
                 QuadratureResult& out) {
  static const GaussLegendreRule& coarse = gauss_legendre(10);
  static const GaussLegendreRule& fine = gauss_legendre(20);
  const double lo = apply_rule(coarse, f, a, b);
  const double hi = apply_rule(fine, f, a, b);
  const double err = std::abs(hi - lo);
  if (err <= abs_tol || err <= rel_tol * std::abs(hi) || depth <= 0) {
    if (depth <= 0 && err > abs_tol && err > rel_tol * std::abs(hi)) {
      out.converged = false;
      out.failed_at = 0.5 * (a + b);
    }
    out.value += hi;
    out.error += err;
    return;
  }
  const double m = 0.5 * (a + b);
  adapt_panel(f, a, m, 0.5 * abs_tol, rel_tol, depth - 1, out);
  adapt_panel(f, m, b, 0.5 * abs_tol, rel_tol, depth - 1, out);
}

}  // namespace detail

/// Adaptive composite Gauss-Legendre on [a, b].
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureTolerance& tol = {}) {
  QuadratureResult out;
  if (!(b > a)) return out;
  detail::adapt_panel(f, a, b, tol.abs, tol.rel, tol.max_depth, out);
  return out;
}

/// Adaptive composite Gauss-Legendre on [a, b] with panels graded
/// geometrically toward `a`: [a, a+w], [a+w, a+2w], [a+2w, a+4w], ...
/// Suited to integrands that vary on unit or smaller scales near `a` and
/// decay algebraically away from it.
template <class F>
QuadratureResult integrate_graded(F&& f, double a, double b, const QuadratureTolerance& tol = {},
                                  double first_width = 1.0 / 1024.0) {
  QuadratureResult out;
  if (!(b > a)) return out;
  const double length = b - a;
  const double w = std::min(first_width, length);
  const int panels = 1 + static_cast<int>(std::ceil(std::log2(std::max(length / w, 1.0))));
  const double share = tol.abs / panels;
  double left = a;
  double offset = w;
  while (left < b) {
    const double right = std::min(a + offset, b);
    detail::adapt_panel(f, left, right, share, tol.rel, tol.max_depth, out);
    left = right;
    offset *= 2.0;
  }
  return out;
}

}  // namespace renewal_ld
