#pragma once

// Universal kriging on the real line with polynomial drift 1, t, ..., t^(d-1).
//
// The predictor sum_i eta_i X(t_i) minimizes
//   M(eta) = s2 eta'eta + eta' Psi eta - 2 eta' phi + K(0) + 2 (eta'Q - q0') rho
// subject to Q'eta = q0, i.e. the measure sum_i eta_i delta_{t_i} - delta_{t0}
// is allowable at order d. Two independent solvers are provided: the
// closed form (two factorizations) and the augmented KKT system.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "irf/covariance.hpp"
#include "irf/error.hpp"
#include "irf/numeric.hpp"
#include "irf/parallel.hpp"

namespace irf {

struct KrigingProblem {
  std::vector<double> obs_t;
  std::vector<double> obs_x;
  int d = 1;
  IntrinsicCovariance K;
  double nugget = 0.0;

  void validate() const {
    if (obs_t.size() != obs_x.size()) throw LengthError("obs_t and obs_x differ in length");
    if (d < 1) throw ValidationError("drift order d must be >= 1");
    if (obs_t.size() < static_cast<std::size_t>(d)) {
      throw ValidationError("need at least d = " + std::to_string(d) + " observations, got " +
                            std::to_string(obs_t.size()));
    }
    if (!(nugget >= 0) || !std::isfinite(nugget)) throw ValidationError("nugget must be >= 0");
    for (std::size_t i = 0; i < obs_t.size(); ++i) {
      if (!std::isfinite(obs_t[i]) || !std::isfinite(obs_x[i])) {
        throw ValidationError("observations must be finite");
      }
      if (i > 0 && !(obs_t[i] > obs_t[i - 1])) {
        throw ValidationError("observation locations must be strictly increasing");
      }
    }
  }
};

// Drift basis ((t - center) / scale)^l. The identity frame reproduces plain
// monomials.
struct DriftFrame {
  double center = 0.0;
  double scale = 1.0;
};

struct KrigingSystem {
  Eigen::MatrixXd psi;  // K(t_i - t_j)
  Eigen::VectorXd phi;  // K(t_i - t0)
  Eigen::MatrixXd Q;    // drift basis at t_i, n x d
  Eigen::VectorXd q0;   // drift basis at t0
  double k0 = 0.0;      // K(0)
  DriftFrame frame;
};

inline KrigingSystem build_system(const KrigingProblem& p, double t0, DriftFrame frame = {}) {
  p.validate();
  if (!std::isfinite(t0)) throw ValidationError("t0 must be finite");
  const auto n = static_cast<Eigen::Index>(p.obs_t.size());
  KrigingSystem s;
  s.frame = frame;
  s.k0 = p.K(0.0);
  s.psi.resize(n, n);
  s.phi.resize(n);
  s.Q.resize(n, p.d);
  s.q0.resize(p.d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) s.psi(i, j) = p.K(p.obs_t[i] - p.obs_t[j]);
    s.phi(i) = p.K(p.obs_t[i] - t0);
    const double u = (p.obs_t[i] - frame.center) / frame.scale;
    for (int l = 0; l < p.d; ++l) s.Q(i, l) = ipow(u, l);
  }
  const double u0 = (t0 - frame.center) / frame.scale;
  for (int l = 0; l < p.d; ++l) s.q0(l) = ipow(u0, l);
  return s;
}

struct KrigingWeights {
  Eigen::VectorXd eta;
  Eigen::VectorXd rho;
  bool jittered = false;
};

namespace detail {

inline double covariance_scale(const KrigingSystem& s) {
  const double k0 = std::abs(s.k0);
  return k0 > 0 ? k0 : std::max(1.0, s.psi.cwiseAbs().maxCoeff());
}

inline void check_shapes(const KrigingSystem& s) {
  const auto n = s.psi.rows();
  if (s.psi.cols() != n || s.phi.size() != n || s.Q.rows() != n || s.q0.size() != s.Q.cols()) {
    throw ValidationError("kriging system has inconsistent shapes");
  }
}

}  // namespace detail

// eta = A^{-1} [phi + Q S^{-1} (q0 - Q'A^{-1} phi)], S = Q'A^{-1}Q, A = Psi + s2 I.
// If A does not factor, 1e-10 K(0) is added to its diagonal once; the
// jittered factorization then serves as a preconditioner for a few steps of
// iterative refinement against the unperturbed system.
inline KrigingWeights solve_closed_form(const KrigingSystem& s, double nugget) {
  detail::check_shapes(s);
  Eigen::MatrixXd a = s.psi;
  a.diagonal().array() += nugget;

  KrigingWeights out;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  auto usable = [](const Eigen::PartialPivLU<Eigen::MatrixXd>& f) {
    const double rc = f.rcond();
    return std::isfinite(rc) && rc > 1e-13;
  };
  if (!usable(lu)) {
    Eigen::MatrixXd b = a;
    b.diagonal().array() += 1e-10 * detail::covariance_scale(s);
    lu.compute(b);
    out.jittered = true;
    if (!usable(lu)) {
      throw SingularSystemError("covariance",
                                "covariance block Psi + nugget*I is singular even after jitter");
    }
  }
  const Eigen::MatrixXd a_q = lu.solve(s.Q);
  const Eigen::MatrixXd schur = s.Q.transpose() * a_q;

  Eigen::FullPivLU<Eigen::MatrixXd> slu(schur);
  slu.setThreshold(1e-12);
  if (!slu.isInvertible()) {
    throw SingularSystemError("drift", "drift block Q'(Psi + nugget*I)^{-1}Q is singular (rank " +
                                           std::to_string(slu.rank()) + " of " +
                                           std::to_string(schur.rows()) + ")");
  }
  // For right-hand side (f, g): rho = S^{-1}(Q'A^{-1}f - g), eta = A^{-1}(f - Q rho).
  auto apply = [&](const Eigen::VectorXd& f, const Eigen::VectorXd& g, Eigen::VectorXd& eta,
                   Eigen::VectorXd& rho) {
    const Eigen::VectorXd a_f = lu.solve(f);
    rho = slu.solve(s.Q.transpose() * a_f - g);
    eta = a_f - a_q * rho;
  };
  apply(s.phi, s.q0, out.eta, out.rho);
  if (out.jittered) {
    for (int step = 0; step < 4; ++step) {
      const Eigen::VectorXd rf = s.phi - a * out.eta - s.Q * out.rho;
      const Eigen::VectorXd rg = s.q0 - s.Q.transpose() * out.eta;
      Eigen::VectorXd de, dr;
      apply(rf, rg, de, dr);
      out.eta += de;
      out.rho += dr;
    }
  }
  return out;
}

// Solves [[Psi + s2 I, Q], [Q', 0]] (eta, rho) = (phi, q0) directly.
inline KrigingWeights solve_kkt(const KrigingSystem& s, double nugget) {
  detail::check_shapes(s);
  const auto n = s.psi.rows();
  const auto d = s.Q.cols();
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + d, n + d);
  kkt.topLeftCorner(n, n) = s.psi;
  kkt.topLeftCorner(n, n).diagonal().array() += nugget;
  kkt.topRightCorner(n, d) = s.Q;
  kkt.bottomLeftCorner(d, n) = s.Q.transpose();
  Eigen::VectorXd rhs(n + d);
  rhs << s.phi, s.q0;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  lu.setThreshold(1e-13);
  if (!lu.isInvertible()) {
    throw SingularSystemError("augmented", "augmented KKT matrix is singular (rank " +
                                               std::to_string(lu.rank()) + " of " +
                                               std::to_string(n + d) + ")");
  }
  const Eigen::VectorXd sol = lu.solve(rhs);
  KrigingWeights out;
  out.eta = sol.head(n);
  out.rho = sol.tail(d);
  return out;
}

// M(eta) including the multiplier term.
inline double objective(const KrigingSystem& s, double nugget, const Eigen::VectorXd& eta,
                        const Eigen::VectorXd& rho) {
  detail::check_shapes(s);
  if (eta.size() != s.psi.rows() || rho.size() != s.Q.cols()) {
    throw ValidationError("objective: eta or rho has the wrong length");
  }
  return nugget * eta.squaredNorm() + eta.dot(s.psi * eta) - 2.0 * eta.dot(s.phi) + s.k0 +
         2.0 * (s.Q.transpose() * eta - s.q0).dot(rho);
}

struct KrigingSolution {
  Eigen::VectorXd weights;
  Eigen::VectorXd multipliers;  // in the plain monomial basis
  double prediction = 0.0;
  double kriging_variance = 0.0;
  bool jittered = false;
};

namespace detail {

// rho for the plain basis from rho in frame basis: Q_frame = Q_plain B with
// B(j, l) = C(l, j) (-c)^(l-j) / s^l, hence rho_plain = B rho_frame.
inline Eigen::VectorXd multipliers_to_plain(const Eigen::VectorXd& rho, DriftFrame f) {
  const auto d = rho.size();
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index l = 0; l < d; ++l) {
    for (Eigen::Index j = 0; j <= l; ++j) {
      b(j, l) = binomial(static_cast<int>(l), static_cast<int>(j)) *
                ipow(-f.center, static_cast<int>(l - j)) / ipow(f.scale, static_cast<int>(l));
    }
  }
  return b * rho;
}

inline DriftFrame centered_frame(std::span<const double> t) {
  double c = 0.0;
  for (double v : t) c += v;
  c /= static_cast<double>(t.size());
  double s = 0.0;
  for (double v : t) s = std::max(s, std::abs(v - c));
  return {c, s > 0 ? s : 1.0};
}

}  // namespace detail

// Best linear unbiased prediction at t0. The drift basis is re-centered and
// scaled to the observation span before solving. With no nugget and t0 on an
// observation, the weights are the unit vector of that observation.
inline KrigingSolution predict(const KrigingProblem& p, double t0) {
  p.validate();
  const auto frame = detail::centered_frame(p.obs_t);
  const KrigingSystem sys = build_system(p, t0, frame);
  const auto n = sys.psi.rows();

  KrigingWeights w;
  std::ptrdiff_t hit = -1;
  if (p.nugget == 0.0) {
    for (std::size_t i = 0; i < p.obs_t.size(); ++i) {
      if (std::abs(p.obs_t[i] - t0) < kAtomMergeTol) hit = static_cast<std::ptrdiff_t>(i);
    }
  }
  if (hit >= 0) {
    w.eta = Eigen::VectorXd::Unit(n, hit);
    w.rho = Eigen::VectorXd::Zero(p.d);
  } else {
    w = solve_closed_form(sys, p.nugget);
  }

  KrigingSolution sol;
  sol.weights = w.eta;
  sol.multipliers = detail::multipliers_to_plain(w.rho, frame);
  sol.jittered = w.jittered;
  for (Eigen::Index i = 0; i < n; ++i) sol.prediction += w.eta(i) * p.obs_x[i];
  sol.kriging_variance = objective(sys, p.nugget, w.eta, Eigen::VectorXd::Zero(p.d));
  return sol;
}

inline std::vector<KrigingSolution> predict_many(const KrigingProblem& p,
                                                 std::span<const double> targets,
                                                 unsigned jobs = 1) {
  p.validate();
  std::vector<KrigingSolution> out(targets.size());
  parallel_for(targets.size(), jobs, [&](std::size_t i) { out[i] = predict(p, targets[i]); });
  return out;
}

}  // namespace irf
