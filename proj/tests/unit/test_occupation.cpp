#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "renewal_ld/bounds.hpp"
#include "renewal_ld/errors.hpp"
#include "renewal_ld/mc_engine.hpp"
#include "renewal_ld/occupation.hpp"

using namespace renewal_ld;

namespace {

const OccupationTable& pareto3_table() {
  static const OccupationTable table = occupation_table(
      WaitingDistribution::pareto(3.0),
      TimeGrid::per_decade(1e-3, 1e3, 60).merged_with(std::vector<double>{9.0, 50.0, 100.0}), 80);
  return table;
}

std::size_t at(const OccupationTable& table, double t) { return *table.grid().index_of(t); }

}  // namespace

TEST(ConvolveStep, FirstRowMatchesClosedForm) {
  const auto dist = WaitingDistribution::pareto(3.0);
  const auto grid = TimeGrid::logarithmic(1e-2, 1e3, 200).merged_with(std::vector<double>{1.0});
  std::vector<double> m0;
  for (double t : grid.times()) m0.push_back(dist.survival(t));
  const auto m1 = convolve_step(m0, dist, grid);
  EXPECT_EQ(m1[0], 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(m1[i], m1_closed_form(3, grid[i]), 1e-8) << grid[i];
  }
  EXPECT_NEAR(m1[*grid.index_of(1.0)], m1_closed_form(3, 1.0), 1e-8);
}

TEST(ConvolveStep, ZeroInZeroOut) {
  const auto grid = TimeGrid::logarithmic(1e-2, 10.0, 20);
  const std::vector<double> zero(grid.size(), 0.0);
  for (double v : convolve_step(zero, WaitingDistribution::pareto(3.0), grid)) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(convolve_step(std::vector<double>(3, 0.0), WaitingDistribution::pareto(3.0), grid),
               ContractViolation);
}

TEST(ConvolveStep, ReportsNonConvergence) {
  const auto grid = TimeGrid::logarithmic(1.0, 10.0, 3);
  ConvolutionOptions opts;
  opts.tol = {1e-300, 0.0, 1};
  const std::function<double(double)> rough = [](double u) { return u < 0.37 ? 1.0 : 0.0; };
  EXPECT_THROW(convolve_step(rough, WaitingDistribution::pareto(3.0), grid, opts), QuadratureError);
}

TEST(ConvolveStep, ThreadCountDoesNotChangeOutput) {
  const auto dist = WaitingDistribution::inverse_rayleigh(1.0);
  const auto grid = TimeGrid::logarithmic(1e-2, 100.0, 120);
  ConvolutionOptions one;
  ConvolutionOptions four;
  four.threads = 4;
  EXPECT_EQ(occupation_table(dist, grid, 4, one).row(4)[77],
            occupation_table(dist, grid, 4, four).row(4)[77]);
  const auto a = occupation_table(dist, grid, 3, one);
  const auto b = occupation_table(dist, grid, 3, four);
  for (std::size_t k = 0; k <= 3; ++k) {
    for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(a.prob(k, i), b.prob(k, i));
  }
}

TEST(OccupationTable, RowZeroIsSurvival) {
  const auto dist = WaitingDistribution::pareto(3.0);
  const auto grid = TimeGrid::logarithmic(1e-2, 100.0, 30);
  const auto table = occupation_table(dist, grid, 0);
  EXPECT_EQ(table.k_max(), 0u);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_DOUBLE_EQ(table.prob(0, i), std::pow(1.0 + grid[i], -2.0));
  }
  EXPECT_EQ(table.provenance(), Provenance::quadrature);
}

TEST(OccupationTable, TimeZeroColumn) {
  const auto& table = pareto3_table();
  EXPECT_EQ(table.prob(0, 0), 1.0);
  for (std::size_t k = 1; k <= table.k_max(); ++k) EXPECT_EQ(table.prob(k, 0), 0.0);
}

TEST(OccupationTable, EntriesAreProbabilities) {
  const auto& table = pareto3_table();
  for (std::size_t i = 0; i < table.grid().size(); ++i) {
    double sum = 0.0;
    for (std::size_t k = 0; k <= table.k_max(); ++k) {
      EXPECT_GE(table.prob(k, i), 0.0);
      EXPECT_LE(table.prob(k, i), 1.0);
      sum += table.prob(k, i);
    }
    EXPECT_LE(sum, 1.0 + 1e-9);
  }
  for (std::size_t i = 1; i < table.grid().size(); ++i) {
    EXPECT_LE(table.prob(0, i), table.prob(0, i - 1));
  }
}

TEST(OccupationTable, RowSumDeficitMatchesMonteCarlo) {
  const auto& table = pareto3_table();
  const auto dist = WaitingDistribution::pareto(3.0);
  SimulationConfig cfg{dist, TimeGrid::from_points({100.0}), 200000, 3, 10000};
  const auto hist = simulate_counts(cfg);
  std::uint64_t above = 0;
  for (std::size_t k = 0; k < hist.counts(1).size(); ++k) {
    if (k > 80) above += hist.counts(1)[k];
  }
  double sum = 0.0;
  for (std::size_t k = 0; k <= table.k_max(); ++k) sum += table.prob(k, at(table, 100.0));
  const double p = static_cast<double>(above) / 200000.0;
  EXPECT_NEAR(1.0 - sum, p, 4.0 * std::sqrt(p * (1.0 - p) / 200000.0) + 1e-6);
}

TEST(OccupationTable, TelescopingIdentity) {
  const auto& table = pareto3_table();
  for (std::size_t i = 0; i < table.grid().size(); i += 7) {
    for (std::size_t n : {1u, 10u, 40u}) {
      double recon = table.prob(0, i);
      for (std::size_t k = 1; k <= n; ++k) recon += table.prob(k, i) - table.prob(k - 1, i);
      EXPECT_NEAR(recon, table.prob(n, i), 1e-10);
    }
  }
}

TEST(OccupationTable, AgreesWithMonteCarloAtT50) {
  const auto& table = pareto3_table();
  SimulationConfig cfg{WaitingDistribution::pareto(3.0), TimeGrid::from_points({50.0}), 200000, 17,
                       5000};
  const auto hist = simulate_counts(cfg);
  const auto pmf = estimate_pmf(hist, 1);
  ASSERT_GT(pmf.size(), 3u);
  EXPECT_NEAR(pmf[3].estimate.value, table.prob(3, at(table, 50.0)), 3.0 * pmf[3].estimate.std_error);
}

TEST(OccupationTable, ExtendAppendsRows) {
  const auto dist = WaitingDistribution::lognormal(0.0, 1.5);
  const auto grid = TimeGrid::logarithmic(1e-2, 10.0, 60);
  auto table = occupation_table(dist, grid, 2);
  extend_occupation_table(table, dist, 4);
  const auto full = occupation_table(dist, grid, 4);
  ASSERT_EQ(table.k_max(), 4u);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(table.prob(4, i), full.prob(4, i));
}

TEST(TailProb, Examples) {
  const auto& table = pareto3_table();
  EXPECT_NEAR(tail_prob_Sk(table, 1, at(table, 9.0)), 0.01, 1e-16);
  for (std::size_t k = 1; k <= 5; ++k) EXPECT_EQ(tail_prob_Sk(table, k, 0), 1.0);
  const double t = 100.0;
  EXPECT_NEAR(t * t * tail_prob_Sk(table, 2, at(table, t)), 2.0, 0.1);
  EXPECT_THROW(tail_prob_Sk(table, 0, 1), ContractViolation);
  EXPECT_THROW(tail_prob_Sk(table, table.k_max() + 2, 1), ContractViolation);
}

TEST(TailProb, FellerLimitIntegerAndRealM) {
  const auto& table = pareto3_table();
  const std::size_t i = table.grid().size() - 1;
  for (std::size_t k = 1; k <= 5; ++k) {
    EXPECT_NEAR(feller_ratio(3.0, static_cast<int>(k), 1e3, tail_prob_Sk(table, k, i)),
                static_cast<double>(k), 0.05 * k);
  }
  const auto real = occupation_table(WaitingDistribution::pareto(3.5),
                                     TimeGrid::per_decade(1e-3, 1e3, 40), 5);
  const std::size_t j = real.grid().size() - 1;
  for (std::size_t k = 1; k <= 5; ++k) {
    EXPECT_NEAR(feller_ratio(3.5, static_cast<int>(k), 1e3, tail_prob_Sk(real, k, j)),
                static_cast<double>(k), 0.05 * k);
  }
}

TEST(ProbCountBelow, MatchesRowSum) {
  const auto& table = pareto3_table();
  const std::size_t i = at(table, 100.0);
  double direct = 0.0;
  for (std::size_t k = 0; k < 50; ++k) direct += table.prob(k, i);
  EXPECT_DOUBLE_EQ(prob_count_below(table, 0.5, i), direct);
  EXPECT_THROW(prob_count_below(table, 0.9, i), ContractViolation);
  EXPECT_EQ(prob_count_below(table, 0.5, 0), 0.0);
}

TEST(MgfSeries, SpecialFields) {
  const auto& table = pareto3_table();
  const std::size_t i = at(table, 50.0);
  EXPECT_EQ(mgf_series(table, 0.0, i).value, 1.0);
  EXPECT_EQ(mgf_series(table, -800.0, i).value, table.prob(0, i));
  EXPECT_NEAR(mgf_series(table, -40.0, i).value, table.prob(0, i), 1e-15);
  EXPECT_THROW(mgf_series(table, 0.5, i), ContractViolation);
}

TEST(MgfSeries, RatioNearLimitAtT1000) {
  const auto& table = pareto3_table();
  const std::size_t i = table.grid().size() - 1;
  const double v = mgf_series(table, -1.0, i).value;
  EXPECT_NEAR(1e6 * v, 1.0 / (1.0 - std::exp(-1.0)), 0.02 * 1.58198);
}

TEST(MgfSeries, AgreesWithDirectSum) {
  const auto& table = pareto3_table();
  const double z = std::exp(-0.5);
  for (std::size_t i = 0; i < table.grid().size(); ++i) {
    const auto s = mgf_series(table, -0.5, i);
    // The two forms differ by exactly z^(k_max+1) P[S_(k_max+1) >= t].
    const double tail = std::pow(z, table.k_max() + 1.0) * tail_prob_Sk(table, table.k_max() + 1, i);
    EXPECT_NEAR(s.value, mgf_direct(table, -0.5, i) + tail, 1e-15);
    EXPECT_NEAR(s.value, mgf_direct(table, -0.5, i), 1e-12);
  }
}

TEST(MgfSeries, TruncationErrorReportsRequiredDepth) {
  const auto dist = WaitingDistribution::pareto(3.0);
  const auto grid = TimeGrid::logarithmic(1e-2, 100.0, 50);
  const auto table = occupation_table(dist, grid, 3);
  try {
    mgf_series(table, -0.1, grid.size() - 1);
    FAIL();
  } catch (const TruncationError& e) {
    EXPECT_GT(e.required_k_max(), 3u);
    const double z = std::exp(-0.1);
    EXPECT_LE(std::pow(z, e.required_k_max() + 1.0), 1e-8 * mgf_direct(table, -0.1, grid.size() - 1) * 1.5);
  }
}

TEST(MgfSeries, UniformBoundShortensSeries) {
  const BoundConstants bc = estimate_constants(3).constants;
  EXPECT_LE(required_k_max(-0.2, 1e3, 1e-14, &bc), required_k_max(-0.2, 1e3, 1e-14, nullptr));
  const std::size_t plain = required_k_max(-0.2, 1e6, 1e-14, nullptr);
  const std::size_t bounded = required_k_max(-0.2, 1e6, 1e-14, &bc);
  EXPECT_LT(bounded, plain);
}
