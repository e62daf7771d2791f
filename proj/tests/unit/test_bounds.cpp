#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "renewal_ld/bounds.hpp"
#include "renewal_ld/errors.hpp"
#include "renewal_ld/occupation.hpp"
#include "renewal_ld/time_grid.hpp"

using namespace renewal_ld;

namespace {

// j-th Taylor coefficient at 0 of an analytic f, from the Cauchy integral on
// a circle of radius r (trapezoidal rule converges geometrically).
template <class F>
double taylor_coefficient(F f, int j, double r = 1.0, int nodes = 256) {
  std::complex<double> acc = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double th = 2.0 * std::numbers::pi * i / nodes;
    const auto z = std::polar(r, th);
    acc += f(z) * std::polar(std::pow(r, -j), -j * th);
  }
  return acc.real() / nodes;
}

double oracle_m1(int m, double t) {
  if (t == 0.0) return 0.0;
  const auto f = [&](double s) {
    return std::pow(1.0 + t - s, 1.0 - m) * (m - 1.0) * std::pow(1.0 + s, -m);
  };
  boost::math::quadrature::tanh_sinh<double> q;
  return q.integrate(f, 0.0, t, 1e-14);
}

double oracle_lemma(int m, double d, double t) {
  const auto f = [&](double s) {
    return (m - 1.0) * std::pow(d + s, -m) * std::pow(1.0 + t - s, -m);
  };
  boost::math::quadrature::tanh_sinh<double> q;
  return q.integrate(f, 0.0, t, 1e-14);
}

const EstimatedConstants& constants(int m) {
  static const EstimatedConstants c3 = estimate_constants(3);
  static const EstimatedConstants c4 = estimate_constants(4);
  return m == 3 ? c3 : c4;
}

}  // namespace

TEST(PartialFractions, ReconstructionAtReferencePoint) {
  const auto pf = partial_fraction_coeffs(3);
  const double exact = 1.0 / (std::pow(1.5, 2) * std::pow(2.5, 3));
  EXPECT_NEAR(pf.reconstruct(0.5, 2.0), exact, 1e-12 * exact);
}

TEST(PartialFractions, ReconstructionRandomPoints) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> logt(-2.0, 3.0);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int m = 3; m <= 7; ++m) {
    const auto pf = partial_fraction_coeffs(m);
    for (int i = 0; i < 100; ++i) {
      const double t = std::pow(10.0, logt(gen));
      const double s = t * frac(gen);
      const double exact = std::pow(1.0 + s, 1.0 - m) * std::pow(1.0 + t - s, -m);
      EXPECT_NEAR(pf.reconstruct(s, t), exact, 1e-12 * exact) << "m=" << m << " s=" << s << " t=" << t;
    }
  }
}

TEST(PartialFractions, LastBIsOne) {
  for (int m = 3; m <= 12; ++m) {
    const auto pf = partial_fraction_coeffs(m);
    ASSERT_EQ(pf.A.size(), static_cast<std::size_t>(m - 1));
    ASSERT_EQ(pf.B.size(), static_cast<std::size_t>(m));
    EXPECT_EQ(pf.B.back(), 1.0);
  }
}

TEST(PartialFractions, MatchDerivativeLimitsForM4) {
  constexpr int m = 4;
  const auto pf = partial_fraction_coeffs(m);
  for (double t : {0.0, 0.3, 2.0, 17.0, 400.0}) {
    const double T = 2.0 + t;
    // With u = 1+s the factor multiplying u^-(m-1) is (T-u)^-m; with
    // v = 1+t-s the factor multiplying v^-m is (T-v)^-(m-1).
    const auto f = [&](std::complex<double> u) { return std::pow(T - u, -m); };
    const auto g = [&](std::complex<double> v) { return std::pow(T - v, -(m - 1)); };
    for (int k = 1; k <= m - 1; ++k) {
      const double oracle = taylor_coefficient(f, m - 1 - k, 0.5 * T);
      EXPECT_NEAR(pf.a(k, t), oracle, 1e-13 * std::abs(oracle)) << "a_" << k << " t=" << t;
    }
    for (int k = 1; k <= m; ++k) {
      const double oracle = taylor_coefficient(g, m - k, 0.5 * T);
      EXPECT_NEAR(pf.b(k, t), oracle, 1e-13 * std::abs(oracle)) << "b_" << k << " t=" << t;
    }
  }
}

TEST(PartialFractions, RejectsSmallM) {
  EXPECT_THROW(partial_fraction_coeffs(2), ContractViolation);
  EXPECT_THROW(require_integer_exponent(3.5), ContractViolation);
  EXPECT_THROW(require_integer_exponent(2.0), ContractViolation);
  EXPECT_EQ(require_integer_exponent(4.0), 4);
}

TEST(M1ClosedForm, ZeroAtOrigin) {
  for (int m = 3; m <= 6; ++m) EXPECT_EQ(m1_closed_form(m, 0.0), 0.0);
}

TEST(M1ClosedForm, MatchesIndependentQuadrature) {
  for (int m = 3; m <= 6; ++m) {
    for (double t : logspace(1e-2, 1e3, 26)) {
      const double o = oracle_m1(m, t);
      EXPECT_NEAR(m1_closed_form(m, t), o, 1e-13 + 1e-11 * o) << "m=" << m << " t=" << t;
    }
  }
}

TEST(M1ClosedForm, ExcessOverSurvivalDecaysLikeTminusM) {
  for (int m : {3, 4}) {
    double prev = 0.0;
    for (double t : {1e2, 1e3, 1e4}) {
      const double excess = (m1_closed_form(m, t) - std::pow(1.0 + t, 1.0 - m)) * std::pow(1.0 + t, m);
      EXPECT_GT(excess, 0.0);
      EXPECT_LT(excess, constants(m).constants.Cm);
      if (prev > 0.0) EXPECT_NEAR(excess / prev, 1.0, 0.1);
      prev = excess;
    }
  }
}

TEST(Lemma1, IntegralMatchesOracle) {
  for (int m : {3, 4, 5}) {
    for (double d : {1.0, 3.0, 100.0}) {
      for (double t : {0.01, 1.0, 50.0, 5000.0}) {
        const double o = oracle_lemma(m, d, t);
        EXPECT_NEAR(lemma_integral(m, d, t), o, 1e-11 * o) << m << " " << d << " " << t;
      }
    }
  }
}

TEST(Lemma1, EmptyIntegral) {
  const auto r = lemma1_check(3, 1.0, 0.0, 1.0);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_TRUE(r.satisfied);
}

TEST(Lemma1, SatisfiedWithEstimatedConstant) {
  const double cbar = constants(3).constants.cbar;
  EXPECT_TRUE(lemma1_check(3, 1.0, 10.0, cbar).satisfied);
  EXPECT_TRUE(lemma1_check(3, 1e3, 1e3, cbar).satisfied);
}

TEST(Lemma1, FailsWithoutSlack) {
  bool any_failed = false;
  for (double t : {1.0, 10.0, 100.0}) any_failed |= !lemma1_check(3, 1.0, t, 0.0).satisfied;
  EXPECT_TRUE(any_failed);
}

TEST(EstimateConstants, FinitePositiveAndPlausible) {
  for (int m : {3, 4}) {
    const auto& c = constants(m);
    EXPECT_GT(c.constants.cbar, 0.0);
    EXPECT_GT(c.constants.Cm, 0.0);
    EXPECT_TRUE(std::isfinite(c.constants.cbar));
    EXPECT_NEAR(c.constants.cbar, c.safety * c.cbar_raw, 1e-12 * c.constants.cbar);
    EXPECT_EQ(c.d_grid.size(), 6u);
    EXPECT_EQ(c.t_grid.size(), 200u);
  }
  EXPECT_EQ(constants(3).cbar_limit, 3.0);
  EXPECT_EQ(constants(4).cbar_limit, 2.0);
  EXPECT_EQ(constants(3).cbar_raw, 3.0);
  EXPECT_GT(constants(4).cbar_grid, 2.0);
  for (int m : {3, 4}) {
    const double Cm = constants(m).Cm_raw;
    for (double t : {1e4, 1e6}) {
      EXPECT_LE((m1_closed_form(m, t) - std::pow(1.0 + t, 1.0 - m)) * std::pow(1.0 + t, m), Cm);
    }
  }
}

TEST(EstimateConstants, Lemma1BeyondSearchGrid) {
  const double cbar = constants(3).constants.cbar;
  for (double d : {1e4, 1e5, 1e6}) {
    for (double t : logspace(1.0, 1e8, 60)) EXPECT_TRUE(lemma1_check(3, d, t, cbar).satisfied) << d << " " << t;
  }
}

TEST(EstimateConstants, Lemma1OnDisjointVerificationGrid) {
  for (int m : {3, 4}) {
    const auto& c = constants(m);
    const auto ds = logspace(1.05, 950.0, 100);
    const auto ts = logspace(1.1e-2, 9e3, 100);
    for (double d : ds) {
      for (double t : ts) {
        ASSERT_TRUE(lemma1_check(m, d, t, c.constants.cbar).satisfied) << m << " " << d << " " << t;
      }
    }
  }
}

TEST(EstimateConstants, M1ExcessBoundOnVerificationGrid) {
  for (int m : {3, 4}) {
    const double Cm = constants(m).constants.Cm;
    for (double t : logspace(1.1e-2, 9e3, 100)) {
      const double lhs = m1_closed_form(m, t) - std::pow(1.0 + t, 1.0 - m);
      EXPECT_LE(lhs, Cm * std::pow(1.0 + t, -m)) << m << " " << t;
    }
  }
}

TEST(Prop1, Examples) {
  const BoundConstants bc{3, 2.0, 4.0, 1.0};
  EXPECT_DOUBLE_EQ(prop1_bound(bc, 1, 0.0), 4.0);
  double prev = 0.0;
  for (double d : {1.0, 10.0, 1e3, 1e6, 1e9}) {
    const double v = prop1_bound({3, 2.0, 4.0, d}, 1, 7.0);
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_NEAR(prev, 4.0, 1e-6);
  EXPECT_NEAR(prop1_bound(bc, 3, 1.0), 4.0 * std::pow(0.5, 3) * 9.0, 1e-14);
}

TEST(Prop1, BoundsQuadratureIncrement) {
  const auto dist = WaitingDistribution::pareto(3.0);
  const auto grid = TimeGrid::logarithmic(1e-3, 10.0, 401);
  const auto table = occupation_table(dist, grid, 5);
  BoundConstants bc = constants(3).constants;
  const std::size_t i = grid.size() - 1;
  EXPECT_GE(prop1_bound(bc, 5, 10.0), table.prob(5, i) - table.prob(4, i));
}

TEST(Prop1, ValidatesConstants) {
  EXPECT_THROW(prop1_bound({2, 1.0, 1.0, 1.0}, 1, 1.0), ContractViolation);
  EXPECT_THROW(prop1_bound({3, 0.0, 1.0, 1.0}, 1, 1.0), ContractViolation);
  EXPECT_THROW(prop1_bound({3, 1.0, 1.0, 0.5}, 1, 1.0), ContractViolation);
  EXPECT_THROW(prop1_bound({3, 1.0, 1.0, 1.0}, 0, 1.0), ContractViolation);
}

TEST(Thm2, LimitAndAdmissibility) {
  const BoundConstants bc{3, 3.0, 4.0, 1e6};
  EXPECT_NEAR(thm2_bound(bc, -60.0, 5.0, 0.25), 0.25, 1e-20);
  try {
    thm2_bound({3, 3.0, 4.0, 1.5}, -1.0, 5.0, 0.25);
    FAIL();
  } catch (const ContractViolation& e) {
    EXPECT_NE(std::string(e.what()).find("need d >"), std::string::npos);
  }
  EXPECT_NEAR(min_admissible_d(3.0, -1.0), 3.0 / (std::numbers::e - 1.0), 1e-15);
}

TEST(Thm2, TermOrders) {
  BoundConstants bc = constants(3).constants;
  const double h = -1.0;
  bc.d = 10.0 * bc.cbar;
  const double z = std::exp(h);
  for (double t : {1e3, 1e4, 1e5}) {
    const double m0 = std::pow(1.0 + t, -2.0);
    const double first = m0 / (1.0 - z);
    const double second = thm2_bound(bc, h, t, m0) - first;
    EXPECT_NEAR(first * t * t, 1.0 / (1.0 - z), 0.01);
    EXPECT_GT(second, 0.0);
    // second / first = Cm (d/(d+t))^3 (1+t)^2 (1-z) w / (1-w)^2 <= Cm d^3 (1-z) w / ((1-w)^2 t)
    const double w = bc.alpha() * z;
    EXPECT_LE(second / first, bc.Cm * std::pow(bc.d, 3.0) * (1.0 - z) * w / ((1.0 - w) * (1.0 - w) * t));
    EXPECT_GT(second / first, 0.5 * bc.Cm * std::pow(bc.d, 3.0) * (1.0 - z) * w / ((1.0 - w) * (1.0 - w) * t));
  }
}

TEST(Thm2, DominatesSeries) {
  const auto dist = WaitingDistribution::pareto(3.0);
  const auto grid = TimeGrid::per_decade(1e-2, 1e3, 20);
  const auto table = occupation_table(dist, grid, 60);
  BoundConstants bc = constants(3).constants;
  bc.d = 10.0 * bc.cbar;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto s = mgf_series(table, -1.0, i, &bc);
    EXPECT_LE(s.value + s.truncation_bound, thm2_bound(bc, -1.0, grid[i], dist.survival(grid[i])))
        << "t=" << grid[i];
  }
}

TEST(Eq19And20, Definitions) {
  const BoundConstants bc{3, 3.0, 4.0, 2.0};
  EXPECT_DOUBLE_EQ(occupation_bound(bc, 4, 1.0, 0.25), 0.25 + 4 * prop1_bound(bc, 4, 1.0));
  EXPECT_DOUBLE_EQ(tail_sum_bound(bc, 4, 1.0, 0.25), 4 * 0.25 + 16 * prop1_bound(bc, 4, 1.0));
}

TEST(TailSums, ClosedFormsMatchBruteForce) {
  for (double w : {0.05, 0.3, 0.7, 0.95}) {
    for (std::size_t K : {0u, 1u, 5u, 40u}) {
      long double s1 = 0.0L;
      long double s2 = 0.0L;
      for (std::size_t k = K + 1; k < 5000; ++k) {
        const long double wk = std::pow(static_cast<long double>(w), static_cast<long double>(k));
        s1 += k * wk;
        s2 += static_cast<long double>(k) * k * wk;
      }
      EXPECT_NEAR(tail_sum_k(w, K), static_cast<double>(s1), 1e-12 * static_cast<double>(s1) + 1e-300);
      EXPECT_NEAR(tail_sum_k2(w, K), static_cast<double>(s2), 1e-12 * static_cast<double>(s2) + 1e-300);
    }
  }
  EXPECT_EQ(tail_sum_k(0.0, 3), 0.0);
}

TEST(TailSums, RemainderBoundDominatesTrueRemainder) {
  const auto dist = WaitingDistribution::pareto(3.0);
  const auto grid = TimeGrid::logarithmic(1e-2, 1e3, 161);
  const auto table = occupation_table(dist, grid, 120);
  const BoundConstants bc = constants(3).constants;
  for (double h : {-0.5, -1.0, -2.0}) {
    const double z = std::exp(h);
    for (std::size_t K : {5u, 15u, 30u}) {
      for (std::size_t i : {20u, 80u, 160u}) {
        double actual = 0.0;
        for (std::size_t k = K + 1; k <= table.k_max() + 1; ++k) {
          actual += (1.0 - z) * std::pow(z, k - 1.0) * tail_prob_Sk(table, k, i);
        }
        const double t = grid[i];
        const double bound = series_remainder_bound(bc, z, K, t, std::pow(1.0 + t, -2.0));
        EXPECT_GE(bound, actual) << h << " " << K << " " << t;
      }
    }
  }
}

TEST(Feller, Examples) {
  for (double t : {0.5, 10.0, 1e3}) {
    const double p = WaitingDistribution::pareto(3.0).survival(t);
    EXPECT_NEAR(feller_ratio(3.0, 1, t, p), std::pow(t / (1.0 + t), 2.0), 1e-15);
  }
  EXPECT_EQ(feller_ratio(3.0, 2, 0.0, 1.0), 0.0);
  EXPECT_LT(feller_ratio(3.0, 2, 1e-9, 1.0), 1e-17);
  EXPECT_THROW(feller_ratio(3.0, 0, 1.0, 0.5), ContractViolation);
}
