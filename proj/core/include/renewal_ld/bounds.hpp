#pragma once

#include <cstddef>
#include <vector>

#include "renewal_ld/quadrature.hpp"

namespace renewal_ld {

/// Constants of the uniform occupation bounds for an integer Pareto exponent.
struct BoundConstants {
  int m = 3;
  double cbar = 1.0;  // Lemma slack: I_m(d,t) <= (1 + cbar/d) / (d+t)^m
  double Cm = 1.0;    // M1(t) - M0(t) <= Cm d^m / (d+t)^m
  double d = 1.0;

  /// Throws ContractViolation unless m >= 3, cbar > 0, Cm > 0, d >= 1.
  void validate() const;
  double alpha() const { return 1.0 + cbar / d; }
};

/// Rejects non-integer or too small exponents with a ContractViolation.
int require_integer_exponent(double m);

/// Coefficients of
///   1/((1+s)^(m-1) (1+t-s)^m)
///     = sum_{k<m} a_k(t)/(1+s)^k + sum_{k<=m} b_k(t)/(1+t-s)^k,
/// with a_k = A_k / (2+t)^(2m-1-k) and b_k = B_k / (2+t)^(2m-1-k).
struct PartialFractionCoefficients {
  int m;
  std::vector<double> A;  // A[k-1] = A_k, k = 1..m-1
  std::vector<double> B;  // B[k-1] = B_k, k = 1..m

  double a(int k, double t) const;
  double b(int k, double t) const;
  /// Right-hand side of the decomposition at (s, t).
  double reconstruct(double s, double t) const;
};

/// A_k = C(2m-2-k, m-1-k), B_k = C(2m-2-k, m-k); B_m = 1.
PartialFractionCoefficients partial_fraction_coeffs(int m);

/// Exact M1(t) = P[N_t = 1] for Pareto(m) from the partial fractions.
double m1_closed_form(int m, double t);

/// I_m(d,t) = int_0^t (m-1) / ((d+s)^m (1+t-s)^m) ds by graded quadrature.
double lemma_integral(int m, double d, double t, const QuadratureTolerance& tol = {1e-15, 1e-13, 30});

struct Lemma1Result {
  double lhs;
  double rhs;
  bool satisfied;
  double margin() const { return rhs - lhs; }
};

Lemma1Result lemma1_check(int m, double d, double t, double cbar);

/// Cm d^m (d+t)^-m (1 + cbar/d)^(n-1).
double prop1_bound(const BoundConstants& bc, int n, double t);

/// M0(t) + n Cm d^m (d+t)^-m alpha^(n-1): bound on M_n(t).
double occupation_bound(const BoundConstants& bc, int n, double t, double M0);

/// Uniform bound on P[S_n >= t]: n M0 + n^2 Cm d^m (d+t)^-m alpha^(n-1).
double tail_sum_bound(const BoundConstants& bc, int n, double t, double M0);

/// Smallest admissible d for biasing field h < 0: cbar / (e^{-h} - 1).
double min_admissible_d(double cbar, double h);

/// M0/(1-e^h) + Cm d^m/(d+t)^m alpha e^h / (1 - alpha e^h)^2.
/// Throws ContractViolation (naming the minimal d) when d is not admissible.
double thm2_bound(const BoundConstants& bc, double h, double t, double M0);

/// sum_{k>K} k w^k and sum_{k>K} k^2 w^k for 0 <= w < 1.
double tail_sum_k(double w, std::size_t K);
double tail_sum_k2(double w, std::size_t K);

/// Upper bound on (1-z)/z sum_{k>K} z^k P[S_k >= t] from the uniform tail-sum
/// bound, minimised over admissible d. M0 must dominate the survival function
/// of the process at t. Returns +inf when no admissible d exists.
double series_remainder_bound(const BoundConstants& bc, double z, std::size_t K, double t,
                              double M0);

struct EstimatedConstants {
  BoundConstants constants;  // d left at 1
  double cbar_raw;           // max(grid supremum, cbar_limit) before inflation
  double cbar_grid;          // supremum over the search grid
  double cbar_limit;         // d -> infinity limit of the slack, m/(m-2)
  double Cm_raw;
  double cbar_argmax_d, cbar_argmax_t;
  double Cm_argmax_t;
  std::vector<double> d_grid;
  std::vector<double> t_grid;
  double safety = 1.1;
};

/// Grid-certified cbar and Cm for integer m >= 3 (10% inflation). The slack
/// d (I_m(d,t) (d+t)^m - 1) tends to m E[tau] = m/(m-2) as d grows, which is
/// taken as an extra candidate for the cbar supremum. Throws ConvergenceError
/// when a supremum keeps growing at the edge of the grid beyond that limit.
EstimatedConstants estimate_constants(int m);

/// t^(m_tail - 1) * pSk; tends to k for Pareto(m_tail).
double feller_ratio(double m_tail, int k, double t, double pSk);

}  // namespace renewal_ld
