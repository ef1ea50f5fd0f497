#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "irf/covariance.hpp"
#include "irf/measure.hpp"
#include "irf/spectral.hpp"

using namespace irf;

namespace {

double abs_double_sum(const IntrinsicCovariance& K, const Measure& a, const Measure& b) {
  double s = 0;
  for (const auto& x : a.atoms()) {
    for (const auto& y : b.atoms()) s += std::abs(x.weight * y.weight * K(x.location - y.location));
  }
  return s;
}

}  // namespace

TEST(BrownianCov, Examples) {
  EXPECT_EQ(brownian_cov(1, 2, 1), 1.0);
  EXPECT_EQ(brownian_cov(-1, 2, 5), 0.0);
  EXPECT_EQ(brownian_cov(2, -1, 5), 0.0);
  EXPECT_EQ(brownian_cov(-3, -2, 2), 4.0);
  EXPECT_EQ(brownian_cov(0.7, 0.7, 3), 3 * 0.7);
  EXPECT_EQ(brownian_cov(0, 5, 3), 0.0);
  EXPECT_THROW(brownian_cov(1, 1, 0), ValidationError);
}

TEST(BrownianCov, IncrementVarianceSameSign) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 10);
  for (int i = 0; i < 200; ++i) {
    const double C = 0.5 + u(rng);
    double t = u(rng), s = u(rng);
    if (i % 2) {
      t = -t;
      s = -s;
    }
    const double v = brownian_cov(t, t, C) + brownian_cov(s, s, C) - 2 * brownian_cov(t, s, C);
    EXPECT_NEAR(v, C * std::abs(t - s), 1e-12 * C * 20);
  }
  // opposite signs: independent branches, variance adds
  EXPECT_EQ(brownian_cov(2, 2, 1) + brownian_cov(-3, -3, 1) - 2 * brownian_cov(2, -3, 1), 5.0);
}

TEST(Variogram, Examples) {
  EXPECT_EQ(variogram_brownian(0, 1), 0.0);
  EXPECT_EQ(variogram_brownian(2, 3), 6.0);
  EXPECT_EQ(variogram_brownian(-2, 3), 6.0);
  EXPECT_THROW(variogram_brownian(1, -1), ValidationError);
}

TEST(Icf, Symmetry) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-5, 5);
  const SpectralModel m{1, ExponentialCovDensity{}, {}};
  const FrequencyGrid fg{1e-3, 100, 512};
  const auto kinds = {IntrinsicCovariance::brownian(2.0), IntrinsicCovariance::from_spectral(m, fg),
                      IntrinsicCovariance::stationary(GaussianDensity{1, 2}),
                      IntrinsicCovariance::tabulated({0, 1, 2, 10}, {1, 0.5, 0.2, 0})};
  for (const auto& K : kinds) {
    for (int i = 0; i < 50; ++i) {
      const double h = u(rng);
      EXPECT_EQ(icf_eval(K, h), icf_eval(K, -h)) << to_string(K.kind());
    }
  }
}

TEST(Icf, StationaryPeakAtZero) {
  const auto K = IntrinsicCovariance::stationary(ExponentialCovDensity{2.0, 1.5});
  EXPECT_EQ(K(0), 2.0);
  for (double h : {0.1, 1.0, 7.0}) EXPECT_LT(K(h), K(0));
  EXPECT_EQ(K.order(), 0);
  EXPECT_THROW(IntrinsicCovariance::stationary(BandlimitedWhiteDensity{}), ValidationError);
}

TEST(Icf, BrownianForm) {
  const auto K = IntrinsicCovariance::brownian(3.0);
  EXPECT_EQ(K(2.0), -3.0);
  EXPECT_EQ(K.order(), 1);
  EXPECT_EQ(K.kind(), IcfKind::brownian);
  EXPECT_THROW(IntrinsicCovariance::brownian(0), ValidationError);
}

TEST(Icf, FromSpectralBandlimited) {
  const SpectralModel m{0, BandlimitedWhiteDensity{1.0, 1.0, 2.0}, {}};
  const auto K = IntrinsicCovariance::from_spectral(m, {1.0, 2.0, 4097, Spacing::linear});
  EXPECT_NEAR(K(1.0), 0.13565288403557037749, 1e-7);
  EXPECT_EQ(K.kind(), IcfKind::from_spectral);
}

TEST(Icf, FromSpectralMatchesStationaryQuadrature) {
  const FrequencyGrid fg;
  const GaussianDensity g{1.0, 0.8};
  const auto K = IntrinsicCovariance::from_spectral({0, g, {}}, fg);
  for (double h : {0.0, 0.5, 2.0}) EXPECT_NEAR(K(h), theoretical_stationary_cov(g, fg, h), 1e-12);
}

TEST(Icf, TabulatedInterpolatesAndRefusesExtrapolation) {
  const auto K = IntrinsicCovariance::tabulated({0, 1, 3}, {2, 1, 0});
  EXPECT_EQ(K(0.5), 1.5);
  EXPECT_EQ(K(-2.0), 0.5);
  EXPECT_EQ(K(3.0), 0.0);
  EXPECT_THROW(K(3.5), RangeError);
  const auto A = IntrinsicCovariance::tabulated({-1, 0, 1}, {0, 1, 0});
  EXPECT_EQ(A(-0.5), 0.5);
  EXPECT_THROW(A(-1.5), RangeError);
  EXPECT_THROW(IntrinsicCovariance::tabulated({0, 1}, {1}), LengthError);
  EXPECT_THROW(IntrinsicCovariance::tabulated({0, 0}, {1, 1}), ValidationError);
  EXPECT_THROW(IntrinsicCovariance::tabulated({0}, {1}), ValidationError);
  EXPECT_THROW(IntrinsicCovariance::tabulated({0, NAN}, {1, 1}), ValidationError);
}

TEST(CovBetweenMeasures, FirstDifferenceStationary) {
  const auto K = IntrinsicCovariance::stationary(ExponentialCovDensity{1.0, 1.0});
  const Measure d1 = finite_difference_measure(1, 1.0, 0.0);
  EXPECT_NEAR(cov_between_measures(K, d1, d1), 2 * K(0) - 2 * K(1), 1e-15);
}

TEST(CovBetweenMeasures, FarApartSupportsDecorrelate) {
  const auto K = IntrinsicCovariance::stationary(GaussianDensity{1.0, 0.5});
  const Measure a = finite_difference_measure(2, 0.3, 0.0);
  const Measure b = finite_difference_measure(2, 0.3, 50.0);
  EXPECT_NEAR(cov_between_measures(K, a, b), 0.0, 1e-300);
}

TEST(CovBetweenMeasures, RequiresAllowable) {
  const auto K = IntrinsicCovariance::brownian(1.0);
  const Measure point({{1.0, 1.0}});
  const Measure d1 = finite_difference_measure(1, 1.0, 0.0);
  EXPECT_THROW(cov_between_measures(K, point, d1), OrderError);
  EXPECT_THROW(cov_between_measures(K, d1, point), OrderError);
  EXPECT_NO_THROW(cov_between_measures(IntrinsicCovariance::stationary(GaussianDensity{}), point, point));
}

TEST(CovBetweenMeasures, BrownianIncrementVariance) {
  const auto K = IntrinsicCovariance::brownian(2.5);
  for (double iota : {0.1, 1.0, 4.0}) {
    const Measure d = finite_difference_measure(1, iota, 3.0);
    EXPECT_NEAR(cov_between_measures(K, d, d), variogram_brownian(iota, 2.5), 1e-14 * iota);
  }
}

TEST(CovBetweenMeasures, ShiftInvariant) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3, 3);
  const auto K = IntrinsicCovariance::brownian(1.0);
  for (int i = 0; i < 50; ++i) {
    const Measure a = finite_difference_measure(1 + i % 3, 0.5, u(rng));
    const Measure b = finite_difference_measure(1 + i % 2, 0.25, u(rng));
    const double h = 0.5 * std::round(4 * u(rng));
    const double base = cov_between_measures(K, a, b);
    const double moved = cov_between_measures(K, shift_measure(a, h), shift_measure(b, h));
    EXPECT_NEAR(moved, base, 1e-12 * abs_double_sum(K, a, b));
  }
}

TEST(StructureFromIcf, RemarkExample) {
  const auto K = IntrinsicCovariance::stationary(GaussianDensity{1.0, 1.3});
  for (double tau : {-1.0, 0.0, 0.4, 2.0}) {
    EXPECT_NEAR(structure_from_icf(K, 1, 1, 1, tau), 2 * K(tau) - K(tau + 1) - K(tau - 1), 1e-15);
  }
}

TEST(StructureFromIcf, ConstantKernelVanishes) {
  const auto K = IntrinsicCovariance::tabulated({0, 100}, {3.0, 3.0});
  for (int d = 1; d <= 4; ++d) EXPECT_NEAR(structure_from_icf(K, d, 0.7, 1.1, 0.3), 0.0, 1e-12);
  EXPECT_THROW(structure_from_icf(K, 0, 1, 1, 0), ValidationError);
}

TEST(StructureFromIcf, BridgeIdentity) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ut(-5, 5), ui(0.05, 2);
  const SpectralModel m{1, GaussianDensity{}, {}};
  const auto kernels = {IntrinsicCovariance::brownian(1.7),
                        IntrinsicCovariance::stationary(ExponentialCovDensity{1, 2}),
                        IntrinsicCovariance::from_spectral(m, {1e-3, 50, 256})};
  for (const auto& K : kernels) {
    for (int i = 0; i < 100; ++i) {
      const int d = 1 + i % 3;
      const double t = ut(rng), s = ut(rng), i1 = ui(rng), i2 = ui(rng);
      const Measure a = finite_difference_measure(d, i1, t);
      const Measure b = finite_difference_measure(d, i2, s);
      const double direct = cov_between_measures(K, a, b);
      const double bridge = structure_from_icf(K, d, i1, i2, t - s);
      EXPECT_NEAR(bridge, direct, 1e-12 * abs_double_sum(K, a, b)) << to_string(K.kind());
    }
  }
}

TEST(StructureFromIcf, MatchesSpectralQuadratureAtOrderOne) {
  const FrequencyGrid fg;
  for (const SpectralDensity& f :
       {SpectralDensity{GaussianDensity{}}, SpectralDensity{ExponentialCovDensity{1.0, 2.0}}}) {
    const SpectralModel m{1, f, {}};
    const auto K = IntrinsicCovariance::from_spectral(m, fg);
    for (double iota : {0.5, 1.0, 2.0}) {
      for (double h : {0.0, 1.0, 3.0}) {
        const double a = structure_from_icf(K, 1, iota, iota, h);
        const double b = theoretical_structure_function(m, iota, iota, h, fg);
        const double scale = theoretical_structure_function(m, iota, iota, 0.0, fg);
        EXPECT_NEAR(a, b, 1e-6 * scale);
      }
    }
  }
}

TEST(PsdCheck, Examples) {
  Eigen::MatrixXd one(1, 1);
  one << 0.3;
  EXPECT_TRUE(psd_check(one).psd);
  Eigen::MatrixXd bad(2, 2);
  bad << 1, 2, 2, 1;
  const auto r = psd_check(bad);
  EXPECT_FALSE(r.psd);
  EXPECT_NEAR(r.min_eigenvalue, -1.0, 1e-12);
  EXPECT_NEAR(r.max_eigenvalue, 3.0, 1e-12);
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 0, 1, 1;
  EXPECT_THROW(psd_check(asym), ValidationError);
  EXPECT_THROW(psd_check(Eigen::MatrixXd(2, 3)), ValidationError);
}

TEST(PsdCheck, GramOfShiftedDifferences) {
  for (const auto& K : {IntrinsicCovariance::brownian(1.0),
                        IntrinsicCovariance::stationary(GaussianDensity{1.0, 0.7})}) {
    std::vector<Measure> ms;
    for (int k = 0; k < 10; ++k) ms.push_back(finite_difference_measure(2, 0.5, 0.3 * k));
    const auto g = covariance_gram(K, ms);
    const auto r = psd_check(g);
    EXPECT_TRUE(r.psd) << to_string(K.kind()) << " min " << r.min_eigenvalue;
    const Measure d = finite_difference_measure(1, 1.0, 0.0);
    EXPECT_GE(structure_from_icf(K, 1, 1, 1, 0), 0.0);
    EXPECT_TRUE(psd_check(covariance_gram(K, std::vector<Measure>{d})).psd);
  }
}
