#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "irf/measure.hpp"
#include "irf/process.hpp"
#include "oracles.hpp"

using namespace irf;

namespace {

SampledPath from_function(double t0, double dt, std::size_t n, auto&& f) {
  std::vector<double> v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = f(t0 + static_cast<double>(j) * dt);
  return SampledPath(t0, dt, std::move(v));
}

std::vector<double> times_of(const SampledPath& p) {
  std::vector<double> t(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) t[j] = p.time(j);
  return t;
}

}  // namespace

TEST(SampledPath, Validation) {
  EXPECT_THROW(SampledPath(0, 0, {1.0}), ValidationError);
  EXPECT_THROW(SampledPath(0, 1, {}), ValidationError);
  EXPECT_THROW(SampledPath(0, 1, {1.0, INFINITY}), ValidationError);
}

TEST(Difference, Examples) {
  const SampledPath p(0, 1, {1, 2, 3, 4});
  const SampledPath d = difference(p, 1, 1);
  EXPECT_EQ(std::vector<double>(d.values().begin(), d.values().end()), (std::vector<double>{1, 1, 1}));
  EXPECT_EQ(d.t0(), 1.0);

  const SampledPath sq = from_function(-3, 1, 10, [](double t) { return t * t; });
  const SampledPath d2 = difference(sq, 2, 1);
  ASSERT_EQ(d2.size(), 8u);
  for (double v : d2.values()) EXPECT_EQ(v, 2.0);

  EXPECT_EQ(difference(p, 0, 3), p);
}

TEST(Difference, ReanchorsAndDecrementsOrder) {
  PathMeta meta;
  meta.order_d = 1;
  const SampledPath p(2.0, 0.5, {0, 1, 4, 9, 16, 25}, meta);
  const SampledPath d = difference(p, 2, 2);
  EXPECT_EQ(d.t0(), 4.0);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0], 16 - 2 * 4 + 0);
  EXPECT_EQ(d.meta().order_d, 0);
}

TEST(Difference, TooShort) {
  const SampledPath p(0, 1, {1, 2, 3});
  EXPECT_THROW(difference(p, 2, 2), LengthError);
  EXPECT_THROW(difference(p, 3, 1), LengthError);
  EXPECT_THROW(difference(p, 1, 0), ValidationError);
}

TEST(Difference, Linearity) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(50), y(50), z(50);
    const double a = n01(rng), b = n01(rng);
    for (int j = 0; j < 50; ++j) {
      x[j] = n01(rng);
      y[j] = n01(rng);
      z[j] = a * x[j] + b * y[j];
    }
    const int d = 1 + trial % 3, m = 1 + trial % 2;
    const auto dx = difference(SampledPath(0, 1, x), d, m);
    const auto dy = difference(SampledPath(0, 1, y), d, m);
    const auto dz = difference(SampledPath(0, 1, z), d, m);
    for (std::size_t j = 0; j < dz.size(); ++j) {
      const double expect = a * dx[j] + b * dy[j];
      EXPECT_NEAR(dz[j], expect, 1e-12 * (std::abs(a * dx[j]) + std::abs(b * dy[j]) + 1e-300));
    }
  }
}

TEST(Difference, Composition) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n01;
  std::vector<double> x(40);
  for (auto& v : x) v = n01(rng);
  const SampledPath p(0, 0.1, x);
  for (int d = 1; d <= 4; ++d) {
    for (int m = 1; m <= 3; ++m) {
      const auto direct = difference(p, d, m);
      const auto nested = difference(difference(p, 1, m), d - 1, m);
      ASSERT_EQ(direct.size(), nested.size());
      EXPECT_NEAR(direct.t0(), nested.t0(), 1e-12);
      for (std::size_t j = 0; j < direct.size(); ++j) EXPECT_NEAR(direct[j], nested[j], 1e-12);
    }
  }
}

TEST(Difference, ReducesPolynomialDegree) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> coef(-1, 1);
  for (int deg = 1; deg <= 6; ++deg) {
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> a(deg + 1);
      for (auto& c : a) c = coef(rng);
      a[deg] = a[deg] >= 0 ? a[deg] + 0.5 : a[deg] - 0.5;
      const PolynomialTrend p(a);
      const SampledPath path = from_function(-1.0, 0.05, 41, p);
      const auto once = difference(path, 1, 1);
      const std::vector<double> y(once.values().begin(), once.values().end());
      EXPECT_LE(oracle::poly_fit_residual(times_of(once), y, deg - 1), 1e-8) << "degree " << deg;
      // one degree lower does not fit: the reduction is exactly one
      if (deg >= 2) {
        EXPECT_GT(oracle::poly_fit_residual(times_of(once), y, deg - 2), 1e-6);
      }
    }
  }
}

TEST(Difference, AnnihilatesDegreeBelowOrder) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> coef(-1, 1);
  for (int d = 1; d <= 6; ++d) {
    std::vector<double> a(d);
    for (auto& c : a) c = coef(rng);
    const SampledPath path = from_function(-1.0, 0.1, 30, PolynomialTrend(a));
    const SampledPath diff = difference(path, d, 1);
    for (double v : diff.values()) EXPECT_NEAR(v, 0.0, 1e-10);
  }
}

TEST(EvalTrend, Examples) {
  EXPECT_EQ(eval_trend(PolynomialTrend({1, 2}), 3), 7.0);
  EXPECT_EQ(eval_trend(PolynomialTrend{}, 12.5), 0.0);
  EXPECT_EQ(eval_trend(PolynomialTrend({0, 0, 1}), -2), 4.0);
  EXPECT_EQ(PolynomialTrend({0, 0, 1, 0}).degree(), 2);
  EXPECT_EQ(PolynomialTrend{}.degree(), -1);
}

TEST(ApplyMeasureToPath, Examples) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n01;
  std::vector<double> x(20);
  for (auto& v : x) v = n01(rng);
  const SampledPath p(1.0, 0.25, x);
  const auto diff = difference(p, 1, 1);
  for (std::size_t j = 0; j < diff.size(); ++j) {
    const Measure m = finite_difference_measure(1, 0.25, diff.time(j));
    EXPECT_DOUBLE_EQ(apply_measure_to_path(m, p), diff[j]);
  }
  EXPECT_EQ(apply_measure_to_path(Measure({{p.time(5), 1.0}}), p), x[5]);
  EXPECT_THROW(apply_measure_to_path(Measure({{1.0 + 0.5 * 0.25, 1.0}}), p), AlignmentError);
  EXPECT_THROW(apply_measure_to_path(Measure({{100.0, 1.0}}), p), AlignmentError);
}

TEST(EmpiricalStructureFunction, ConstantPathsGiveZero) {
  std::vector<SampledPath> paths(3, SampledPath(0, 1, std::vector<double>(30, 4.2)));
  const int lags[] = {0, 1, 5};
  for (const auto& e : empirical_structure_function(paths, 1, 1, lags)) {
    EXPECT_EQ(e.estimate, 0.0);
    EXPECT_EQ(e.se, 0.0);
  }
}

TEST(EmpiricalStructureFunction, WhiteNoiseVariance) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n01;
  std::vector<SampledPath> paths;
  for (int r = 0; r < 200; ++r) {
    std::vector<double> x(500);
    for (auto& v : x) v = n01(rng);
    paths.emplace_back(0, 1, std::move(x));
  }
  const int lags[] = {0, 3};
  const auto est = empirical_structure_function(paths, 0, 1, lags);
  EXPECT_LE(std::abs(est[0].estimate - 1.0), 3 * est[0].se);
  EXPECT_LE(std::abs(est[1].estimate), 3 * est[1].se);
}

TEST(EmpiricalStructureFunction, BrownianVariogram) {
  std::mt19937_64 rng(9);
  const double C = 2.0, dt = 0.01;
  std::vector<SampledPath> paths;
  for (int r = 0; r < 200; ++r) paths.emplace_back(0, dt, oracle::brownian_walk(rng, 400, dt, C));
  const int lags[] = {0, 1};
  const auto est = empirical_structure_function(paths, 1, 1, lags);
  EXPECT_LE(std::abs(est[0].estimate - C * dt), 3 * est[0].se);
  EXPECT_LE(std::abs(est[1].estimate), 3 * est[1].se);
}

TEST(EmpiricalStructureFunction, SymmetricInLag) {
  std::mt19937_64 rng(10);
  std::vector<SampledPath> paths;
  for (int r = 0; r < 5; ++r) paths.emplace_back(0, 0.5, oracle::brownian_walk(rng, 100, 0.5, 1.0));
  const int lags[] = {-7, 7, -1, 1};
  const auto est = empirical_structure_function(paths, 2, 2, lags);
  EXPECT_EQ(est[0].estimate, est[1].estimate);
  EXPECT_EQ(est[2].estimate, est[3].estimate);
  EXPECT_EQ(est[0].h, -3.5);
}

TEST(EmpiricalStructureFunction, Errors) {
  const int lags[] = {0};
  EXPECT_THROW(empirical_structure_function({}, 1, 1, lags), ValidationError);
  std::vector<SampledPath> paths{SampledPath(0, 1, std::vector<double>(10, 0.0))};
  const int big[] = {9};
  EXPECT_THROW(empirical_structure_function(paths, 1, 1, big), LengthError);
  paths.emplace_back(0, 1, std::vector<double>(11, 0.0));
  EXPECT_THROW(empirical_structure_function(paths, 1, 1, lags), ValidationError);
  // single replicate: no between-replicate error available
  std::vector<SampledPath> one{SampledPath(0, 1, {1, 2, 4, 7})};
  EXPECT_TRUE(std::isnan(empirical_structure_function(one, 1, 1, lags)[0].se));
}
