#include "renewal_ld/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "renewal_ld/errors.hpp"
#include "renewal_ld/time_grid.hpp"

namespace renewal_ld {
namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

// J_k(t) = int_0^t (1+x)^-k dx.
double power_integral(int k, double t) {
  if (k == 1) return std::log1p(t);
  return -std::expm1((1.0 - k) * std::log1p(t)) / (k - 1.0);
}

// d^m / (d+t)^m.
double scale_factor(int m, double d, double t) {
  return std::exp(m * (std::log(d) - std::log(d + t)));
}

}  // namespace

void BoundConstants::validate() const {
  if (m < 3) throw ContractViolation("BoundConstants: m must be an integer >= 3");
  if (!(cbar > 0.0) || !std::isfinite(cbar)) throw ContractViolation("BoundConstants: cbar > 0");
  if (!(Cm > 0.0) || !std::isfinite(Cm)) throw ContractViolation("BoundConstants: Cm > 0");
  if (!(d >= 1.0) || !std::isfinite(d)) throw ContractViolation("BoundConstants: d >= 1");
}

int require_integer_exponent(double m) {
  const double r = std::round(m);
  if (r != m || r < 3.0) {
    std::ostringstream os;
    os << "partial-fraction bounds need an integer exponent m >= 3, got m=" << m;
    throw ContractViolation(os.str());
  }
  return static_cast<int>(r);
}

double PartialFractionCoefficients::a(int k, double t) const {
  return A.at(static_cast<std::size_t>(k - 1)) * std::pow(2.0 + t, -(2.0 * m - 1.0 - k));
}

double PartialFractionCoefficients::b(int k, double t) const {
  return B.at(static_cast<std::size_t>(k - 1)) * std::pow(2.0 + t, -(2.0 * m - 1.0 - k));
}

double PartialFractionCoefficients::reconstruct(double s, double t) const {
  double sum = 0.0;
  for (int k = 1; k <= m - 1; ++k) sum += a(k, t) / std::pow(1.0 + s, k);
  for (int k = 1; k <= m; ++k) sum += b(k, t) / std::pow(1.0 + t - s, k);
  return sum;
}

PartialFractionCoefficients partial_fraction_coeffs(int m) {
  if (m < 3) throw ContractViolation("partial_fraction_coeffs: m >= 3");
  PartialFractionCoefficients pf{m, {}, {}};
  // Expand (T-u)^-m resp. (T-v)^-(m-1) around u = 1+s = 0 resp. v = 1+t-s = 0,
  // T = 2 + t: the j-th Taylor coefficients are binomials over T^(m+j).
  for (int k = 1; k <= m - 1; ++k) pf.A.push_back(binomial(2 * m - 2 - k, m - 1 - k));
  for (int k = 1; k <= m; ++k) pf.B.push_back(binomial(2 * m - 2 - k, m - k));
  return pf;
}

double m1_closed_form(int m, double t) {
  if (!(t >= 0.0)) throw ContractViolation("m1_closed_form: t >= 0");
  if (t == 0.0) return 0.0;
  const auto pf = partial_fraction_coeffs(m);
  double sum = 0.0;
  for (int k = 1; k <= m - 1; ++k) sum += pf.a(k, t) * power_integral(k, t);
  for (int k = 1; k <= m; ++k) sum += pf.b(k, t) * power_integral(k, t);
  return (m - 1.0) * sum;
}

double lemma_integral(int m, double d, double t, const QuadratureTolerance& tol) {
  if (!(t > 0.0)) return 0.0;
  const double md = m;
  const auto integrand = [&](double s) {
    return (md - 1.0) * std::exp(-md * (std::log(d + s) + std::log1p(t - s)));
  };
  const double half = 0.5 * t;
  QuadratureTolerance part = tol;
  part.abs *= 0.5;
  const auto left = integrate_graded(integrand, 0.0, half, part);
  const auto right = integrate_graded([&](double u) { return integrand(t - u); }, 0.0, half, part);
  if (!left.converged || !right.converged) {
    throw QuadratureError("lemma_integral: quadrature did not converge", t);
  }
  return left.value + right.value;
}

Lemma1Result lemma1_check(int m, double d, double t, double cbar) {
  if (m < 3 || !(d >= 1.0) || !(t >= 0.0) || !(cbar >= 0.0)) {
    throw ContractViolation("lemma1_check: requires m >= 3, d >= 1, t >= 0, cbar >= 0");
  }
  Lemma1Result r{};
  r.lhs = lemma_integral(m, d, t);
  r.rhs = (1.0 + cbar / d) * std::pow(d + t, -static_cast<double>(m));
  r.satisfied = r.lhs <= r.rhs;
  return r;
}

double prop1_bound(const BoundConstants& bc, int n, double t) {
  bc.validate();
  if (n < 1 || !(t >= 0.0)) throw ContractViolation("prop1_bound: n >= 1, t >= 0");
  return bc.Cm * scale_factor(bc.m, bc.d, t) * std::pow(bc.alpha(), n - 1);
}

double occupation_bound(const BoundConstants& bc, int n, double t, double M0) {
  return M0 + n * prop1_bound(bc, n, t);
}

double tail_sum_bound(const BoundConstants& bc, int n, double t, double M0) {
  return n * M0 + static_cast<double>(n) * n * prop1_bound(bc, n, t);
}

double min_admissible_d(double cbar, double h) {
  if (!(h < 0.0)) throw ContractViolation("min_admissible_d: h < 0");
  return cbar / std::expm1(-h);
}

double thm2_bound(const BoundConstants& bc, double h, double t, double M0) {
  bc.validate();
  if (!(h < 0.0) || !(t >= 0.0)) throw ContractViolation("thm2_bound: h < 0, t >= 0");
  const double z = std::exp(h);
  const double d_min = min_admissible_d(bc.cbar, h);
  const double w = bc.alpha() * z;
  if (!(bc.d > d_min) || !(w < 1.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "thm2_bound: d=" << bc.d << " not admissible for h=" << h << "; need d > " << d_min;
    throw ContractViolation(os.str());
  }
  return M0 / (1.0 - z) + bc.Cm * scale_factor(bc.m, bc.d, t) * w / ((1.0 - w) * (1.0 - w));
}

double tail_sum_k(double w, std::size_t K) {
  if (w == 0.0) return 0.0;
  const double k = static_cast<double>(K);
  const double lead = std::pow(w, k + 1.0);
  return lead * ((k + 1.0) - k * w) / ((1.0 - w) * (1.0 - w));
}

double tail_sum_k2(double w, std::size_t K) {
  if (w == 0.0) return 0.0;
  const double k = static_cast<double>(K);
  const double lead = std::pow(w, k + 1.0);
  const double poly = (k + 1.0) * (k + 1.0) - (2.0 * k * k + 2.0 * k - 1.0) * w + k * k * w * w;
  return lead * poly / ((1.0 - w) * (1.0 - w) * (1.0 - w));
}

double series_remainder_bound(const BoundConstants& bc, double z, std::size_t K, double t,
                              double M0) {
  if (!(z > 0.0 && z < 1.0)) throw ContractViolation("series_remainder_bound: 0 < z < 1");
  const double d_min = bc.cbar * z / (1.0 - z);
  double best = std::numeric_limits<double>::infinity();
  for (double f : {1.01, 1.05, 1.1, 1.25, 1.5, 2.0, 3.0, 5.0, 10.0, 30.0, 100.0, 1e3, 1e4, 1e6}) {
    const double d = std::max(1.0, d_min * f);
    const double alpha = 1.0 + bc.cbar / d;
    const double w = alpha * z;
    if (!(w < 1.0)) continue;
    const double D = scale_factor(bc.m, d, t);
    const double r = (1.0 - z) / z *
                     (M0 * tail_sum_k(z, K) + bc.Cm * D / alpha * tail_sum_k2(w, K));
    best = std::min(best, r);
  }
  return best;
}

EstimatedConstants estimate_constants(int m) {
  if (m < 3) throw ContractViolation("estimate_constants: m >= 3");
  EstimatedConstants out{};
  out.d_grid = {1.0, 2.0, 5.0, 10.0, 100.0, 1000.0};
  out.t_grid = logspace(1e-2, 1e4, 200);
  const double md = m;

  // Lemma slack d * (I_m(d,t) (d+t)^m - 1), tracked with and without the
  // outermost d and t so that growth at the grid edge can be detected.
  double sup_all = -std::numeric_limits<double>::infinity();
  double sup_inner_d = sup_all;
  double sup_inner_t = sup_all;
  for (std::size_t i = 0; i < out.d_grid.size(); ++i) {
    const double d = out.d_grid[i];
    for (double t : out.t_grid) {
      const double I = lemma_integral(m, d, t);
      const double slack = d * (I * std::exp(md * std::log(d + t)) - 1.0);
      if (slack > sup_all) {
        sup_all = slack;
        out.cbar_argmax_d = d;
        out.cbar_argmax_t = t;
      }
      if (i + 1 < out.d_grid.size()) sup_inner_d = std::max(sup_inner_d, slack);
      if (t <= 1e3) sup_inner_t = std::max(sup_inner_t, slack);
    }
  }
  out.cbar_grid = sup_all;
  out.cbar_limit = md / (md - 2.0);
  out.cbar_raw = std::max(sup_all, out.cbar_limit);

  double cm_all = -std::numeric_limits<double>::infinity();
  double cm_inner = cm_all;
  for (double t : out.t_grid) {
    const double m0 = std::exp(-(md - 1.0) * std::log1p(t));
    const double v = (m1_closed_form(m, t) - m0) * std::exp(md * std::log1p(t));
    if (v > cm_all) {
      cm_all = v;
      out.Cm_argmax_t = t;
    }
    if (t <= 1e3) cm_inner = std::max(cm_inner, v);
  }
  out.Cm_raw = cm_all;

  const auto stable = [&](double inner, double all) {
    return inner <= 0.0 || all <= out.safety * inner;
  };
  const bool d_stable = stable(sup_inner_d, sup_all) || sup_all <= out.cbar_limit;
  if (!d_stable || !stable(sup_inner_t, sup_all) || !stable(cm_inner, cm_all)) {
    std::ostringstream os;
    os << "estimate_constants(m=" << m << "): suprema not stabilised on the search grid"
       << " (cbar " << sup_inner_d << "/" << sup_inner_t << " -> " << sup_all << ", Cm "
       << cm_inner << " -> " << cm_all << ")";
    throw ConvergenceError(os.str());
  }

  constexpr double kPositiveFloor = 1e-12;
  out.constants.m = m;
  out.constants.cbar = out.safety * std::max(out.cbar_raw, kPositiveFloor);
  out.constants.Cm = out.safety * std::max(out.Cm_raw, kPositiveFloor);
  out.constants.d = 1.0;
  return out;
}

double feller_ratio(double m_tail, int k, double t, double pSk) {
  if (k < 1 || !(t >= 0.0)) throw ContractViolation("feller_ratio: k >= 1, t >= 0");
  if (t == 0.0) return 0.0;
  return std::pow(t, m_tail - 1.0) * pSk;
}

}  // namespace renewal_ld
