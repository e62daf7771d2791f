#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "renewal_ld/errors.hpp"
#include "renewal_ld/interpolation.hpp"
#include "renewal_ld/parallel.hpp"
#include "renewal_ld/quadrature.hpp"
#include "renewal_ld/time_grid.hpp"

using namespace renewal_ld;

TEST(TimeGrid, LogspaceEndpointsExact) {
  const auto v = logspace(1e-3, 1e3, 601);
  ASSERT_EQ(v.size(), 601u);
  EXPECT_EQ(v.front(), 1e-3);
  EXPECT_EQ(v.back(), 1e3);
  EXPECT_NEAR(v[300], 1.0, 1e-15);
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_GT(v[i], v[i - 1]);
}

TEST(TimeGrid, Linspace) {
  const auto v = linspace(-3.0, -0.5, 6);
  ASSERT_EQ(v.size(), 6u);
  EXPECT_EQ(v.front(), -3.0);
  EXPECT_EQ(v.back(), -0.5);
  EXPECT_NEAR(v[1], -2.5, 1e-15);
}

TEST(TimeGrid, LogarithmicStartsAtZero) {
  const auto g = TimeGrid::logarithmic(0.1, 100.0, 4);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g[1], 0.1);
  EXPECT_EQ(g.t_max(), 100.0);
  EXPECT_EQ(g.style(), GridStyle::logarithmic);
}

TEST(TimeGrid, Uniform) {
  const auto g = TimeGrid::uniform(10.0, 5);
  ASSERT_EQ(g.size(), 6u);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_DOUBLE_EQ(g[1], 2.0);
  EXPECT_EQ(g.t_max(), 10.0);
}

TEST(TimeGrid, PerDecade) {
  const auto g = TimeGrid::per_decade(1e-2, 1e3, 10);
  EXPECT_EQ(g.size(), 52u);
  EXPECT_EQ(g.t_max(), 1e3);
  EXPECT_TRUE(g.index_of(1.0));
  EXPECT_TRUE(g.index_of(100.0));
}

TEST(TimeGrid, FromPointsValidates) {
  EXPECT_EQ(TimeGrid::from_points({1.0, 2.0})[0], 0.0);
  EXPECT_EQ(TimeGrid::from_points({0.0, 1.0}).size(), 2u);
  EXPECT_THROW(TimeGrid::from_points({2.0, 1.0}), ContractViolation);
  EXPECT_THROW(TimeGrid::from_points({1.0, 1.0}), ContractViolation);
  EXPECT_THROW(TimeGrid::from_points({-1.0, 1.0}), ContractViolation);
  EXPECT_THROW(TimeGrid::from_points({1.0, INFINITY}), ContractViolation);
}

TEST(TimeGrid, JsonForms) {
  const auto a = TimeGrid::from_json(nlohmann::json::parse(
      R"({"style":"log","t_min":1,"t_max":1000,"points":31})"));
  EXPECT_EQ(a.size(), 32u);
  const auto b = TimeGrid::from_json(nlohmann::json::parse(
      R"({"style":"uniform","t_max":100,"points":100})"));
  EXPECT_EQ(b.size(), 101u);
  const auto c = TimeGrid::from_json(nlohmann::json::parse(R"({"times":[10,100,1000]})"));
  EXPECT_EQ(c.size(), 4u);
  for (const auto& g : {a, b, c}) {
    const auto back = TimeGrid::from_json(g.to_json());
    ASSERT_EQ(back.size(), g.size());
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(back[i], g[i]);
  }
  EXPECT_THROW(TimeGrid::from_json(nlohmann::json::parse(R"({"style":"spiral"})")), ConfigError);
  EXPECT_THROW(TimeGrid::from_json(nlohmann::json::parse(R"({"style":"log","t_min":10,"t_max":1,"points":3})")),
               ConfigError);
}

TEST(TimeGrid, MergedWithPinsExtraTimes) {
  const auto g = TimeGrid::logarithmic(1.0, 1000.0, 7).merged_with(std::vector<double>{10.0, 50.0});
  ASSERT_TRUE(g.index_of(10.0, 0.0));
  ASSERT_TRUE(g.index_of(50.0, 0.0));
  EXPECT_EQ(g[*g.index_of(10.0, 0.0)], 10.0);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g[i], g[i - 1]);
  EXPECT_EQ(g.nearest_index(49.0), *g.index_of(50.0));
}

TEST(Interpolation, ReproducesPowerLawsExactly) {
  std::vector<double> t{0.0};
  for (double v : logspace(1e-2, 1e3, 51)) t.push_back(v);
  std::vector<double> y;
  for (double v : t) y.push_back(v == 0.0 ? 0.0 : 3.0 * std::pow(v, 1.7));
  const LogLogInterpolant f(t, y);
  for (double q : {0.011, 0.37, 5.5, 123.4, 999.0}) {
    EXPECT_NEAR(f(q), 3.0 * std::pow(q, 1.7), 1e-12 * f(q));
  }
  EXPECT_NEAR(f(1e-3), 3.0 * std::pow(1e-3, 1.7), 1e-10 * f(1e-3));
  EXPECT_NEAR(f(2e3), 3.0 * std::pow(2e3, 1.7), 1e-10 * f(2e3));
  EXPECT_EQ(f(0.0), 0.0);
  std::vector<double> falling;
  for (double v : t) falling.push_back(std::pow(1.0 + v, -2.0));
  const LogLogInterpolant g(t, falling);
  for (double q : {1e-4, 3e-3, 9e-3}) EXPECT_NEAR(g(q), std::pow(1.0 + q, -2.0), 5e-6);
  EXPECT_LE(g(1e-4), 1.0);
}

TEST(Interpolation, SmoothCurveAccuracy) {
  std::vector<double> t{0.0};
  for (double v : logspace(1e-3, 1e3, 601)) t.push_back(v);
  const auto g = [](double s) { return std::pow(1.0 + s, -2.0) * (1.0 + std::log1p(s)); };
  std::vector<double> y;
  for (double v : t) y.push_back(g(v));
  const LogLogInterpolant f(t, y);
  double worst = 0.0;
  for (double q : logspace(1.1e-3, 9e2, 997)) worst = std::max(worst, std::abs(f(q) / g(q) - 1.0));
  EXPECT_LT(worst, 5e-10);
}

TEST(Interpolation, MonotoneDataStaysMonotone) {
  std::vector<double> t{0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  std::vector<double> y{1.0, 1.0, 1.0, 0.5, 0.49, 0.48, 1e-6};
  const LogLogInterpolant f(t, y);
  double prev = f(1.0);
  for (double q = 1.0; q <= 6.0; q += 0.01) {
    EXPECT_LE(f(q), prev * (1.0 + 1e-14));
    prev = f(q);
  }
}

TEST(Interpolation, ZeroValuesAreFloored) {
  std::vector<double> t{0.0, 1.0, 2.0, 3.0};
  std::vector<double> y{0.0, 0.0, 0.0, 0.0};
  const LogLogInterpolant f(t, y);
  EXPECT_LE(f(1.5), 1e-299);
  EXPECT_EQ(f(0.0), 0.0);
}

TEST(Quadrature, GaussLegendreNodes) {
  const auto& r = gauss_legendre(20);
  double sum = 0.0;
  for (double w : r.weights) sum += w;
  EXPECT_NEAR(sum, 2.0, 1e-15);
  // Integrates x^38 exactly.
  double moment = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) moment += r.weights[i] * std::pow(r.nodes[i], 38);
  EXPECT_NEAR(moment, 2.0 / 39.0, 1e-15);
  EXPECT_NEAR(gauss_legendre(2).nodes[1], 1.0 / std::sqrt(3.0), 2e-16);
}

TEST(Quadrature, AdaptiveKnownIntegrals) {
  auto r = integrate([](double x) { return std::exp(x); }, 0.0, 1.0);
  EXPECT_NEAR(r.value, std::numbers::e - 1.0, 1e-14);
  EXPECT_TRUE(r.converged);
  r = integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0, {1e-13, 1e-13, 40});
  EXPECT_NEAR(r.value, 2.0 / 3.0, 1e-12);
  r = integrate_graded([](double x) { return std::pow(1.0 + x, -3.0); }, 0.0, 1e6);
  EXPECT_NEAR(r.value, 0.5 * (1.0 - std::pow(1.0 + 1e6, -2.0)), 1e-13);
  r = integrate_graded([](double x) { return 100.0 * std::exp(-100.0 * x); }, 0.0, 50.0);
  EXPECT_NEAR(r.value, 1.0, 1e-12);
}

TEST(Quadrature, EmptyInterval) {
  EXPECT_EQ(integrate([](double) { return 1.0; }, 1.0, 1.0).value, 0.0);
  EXPECT_EQ(integrate_graded([](double) { return 1.0; }, 2.0, 1.0).value, 0.0);
}

TEST(Quadrature, ReportsNonConvergence) {
  const auto r = integrate([](double x) { return x < 0.3 ? 0.0 : 1.0; }, 0.0, 1.0, {1e-30, 0.0, 3});
  EXPECT_FALSE(r.converged);
  EXPECT_NEAR(r.value, 0.7, 1e-2);
}

TEST(Parallel, VisitsEveryIndexOnce) {
  for (std::size_t threads : {1u, 3u, 16u}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), threads, [&](std::size_t i, std::size_t w) {
      EXPECT_LT(w, threads);
      hits[i]++;
    });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(Parallel, RethrowsLowestFailingIndex) {
  try {
    parallel_for(100, 4, [](std::size_t i, std::size_t) {
      if (i == 17 || i == 60) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "17");
  }
}
