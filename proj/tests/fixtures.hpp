#pragma once

// Random problem generators shared by the unit suites and the acceptance run.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "irf/covariance.hpp"
#include "irf/kriging.hpp"

namespace irf::fixture {

// Sorted locations with pairwise spacing >= min_gap on roughly [-span, span].
inline std::vector<double> spaced_points(std::mt19937_64& rng, int n, double span, double min_gap) {
  std::uniform_real_distribution<double> gap(min_gap, min_gap + 2.0 * span / n);
  std::uniform_real_distribution<double> start(-span, 0.0);
  std::vector<double> t(n);
  t[0] = start(rng);
  for (int i = 1; i < n; ++i) t[i] = t[i - 1] + gap(rng);
  return t;
}

// n in [d, 12], d in [1, 3], kernel alternating exponential / brownian,
// nugget from {0, 0.1, 1}, t0 off the observation set.
inline KrigingProblem random_problem(std::mt19937_64& rng, int index) {
  const int d = 1 + index % 3;
  std::uniform_int_distribution<int> un(d, 12);
  const int n = std::max(d, un(rng));
  const double nuggets[] = {0.0, 0.1, 1.0};
  std::uniform_real_distribution<double> ul(0.5, 3.0);
  const double scale = ul(rng);
  IntrinsicCovariance K = (index / 3) % 2 == 0
                              ? IntrinsicCovariance::stationary(ExponentialCovDensity{1.0, scale})
                              : IntrinsicCovariance::brownian(scale);
  KrigingProblem p{spaced_points(rng, n, 5.0, 0.1), std::vector<double>(n), d, K,
                   nuggets[(index / 6) % 3]};
  std::normal_distribution<double> n01;
  for (auto& x : p.obs_x) x = n01(rng);
  return p;
}

inline double random_target(std::mt19937_64& rng, const KrigingProblem& p) {
  std::uniform_real_distribution<double> u(p.obs_t.front() - 1.0, p.obs_t.back() + 1.0);
  for (;;) {
    const double t0 = u(rng);
    bool clear = true;
    for (double t : p.obs_t) clear = clear && std::abs(t - t0) > 1e-3;
    if (clear) return t0;
  }
}

// Orthogonal projector onto the null space of Q'.
inline Eigen::MatrixXd null_projector(const Eigen::MatrixXd& Q) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Q);
  const Eigen::MatrixXd basis = qr.householderQ() * Eigen::MatrixXd::Identity(Q.rows(), Q.cols());
  return Eigen::MatrixXd::Identity(Q.rows(), Q.rows()) - basis * basis.transpose();
}

inline double rel_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

}  // namespace irf::fixture
