#pragma once

// Finite discrete signed measures on the real line and the allowable classes
// Lambda_d: measures that annihilate every polynomial of degree < d.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "irf/error.hpp"
#include "irf/numeric.hpp"

namespace irf {

struct Atom {
  double location = 0.0;
  double weight = 0.0;

  friend bool operator==(const Atom&, const Atom&) = default;
};

inline constexpr double kAnnihilationTol = 1e-10;
inline constexpr double kAtomMergeTol = 1e-12;

class Measure;
double annihilation_defect(const Measure& m, int degree);
double annihilation_scale(const Measure& m, int degree);

// Immutable sum of weighted Dirac masses. Atoms are kept sorted by location;
// atoms closer than kAtomMergeTol are merged by summing their weights. A
// claimed order d >= 1 is checked against the annihilation tolerance.
class Measure {
 public:
  explicit Measure(std::vector<Atom> atoms, int order = 0) : order_(order) {
    if (order < 0) throw ValidationError("measure order must be nonnegative");
    for (const auto& a : atoms) {
      if (!std::isfinite(a.location) || !std::isfinite(a.weight)) {
        throw ValidationError("measure atoms must be finite");
      }
    }
    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const Atom& a, const Atom& b) { return a.location < b.location; });
    for (const auto& a : atoms) {
      if (!atoms_.empty() && a.location - atoms_.back().location < kAtomMergeTol) {
        atoms_.back().weight += a.weight;
      } else {
        atoms_.push_back(a);
      }
    }
    if (std::none_of(atoms_.begin(), atoms_.end(), [](const Atom& a) { return a.weight != 0.0; })) {
      throw ValidationError("measure must have at least one nonzero weight");
    }
    for (int l = 0; l < order_; ++l) {
      const double defect = annihilation_defect(*this, l);
      if (std::abs(defect) > kAnnihilationTol * annihilation_scale(*this, l)) {
        throw OrderError("measure does not annihilate degree " + std::to_string(l) +
                         " (claimed order " + std::to_string(order_) + ")");
      }
    }
  }

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  int order() const noexcept { return order_; }

  friend bool operator==(const Measure&, const Measure&) = default;

 private:
  std::vector<Atom> atoms_;
  int order_ = 0;
};

// Sum_i w_i f(x_i).
template <class F>
double apply_measure(const Measure& m, F&& f) {
  double s = 0.0;
  for (const auto& a : m.atoms()) {
    const double v = f(a.location);
    if (!std::isfinite(v)) {
      throw EvaluationError("function is not finite at x = " + format_double(a.location));
    }
    s += a.weight * v;
  }
  return s;
}

// Sum_i w_i x_i^l.
inline double annihilation_defect(const Measure& m, int degree) {
  if (degree < 0) throw ValidationError("degree must be nonnegative");
  double s = 0.0;
  for (const auto& a : m.atoms()) {
    const double p = ipow(a.location, degree);
    if (!std::isfinite(p)) {
      throw EvaluationError("overflow evaluating x^" + std::to_string(degree) +
                            " at x = " + format_double(a.location));
    }
    s += a.weight * p;
  }
  return s;
}

// Sum_i |w_i| max(1, |x_i|)^l, the magnitude against which defects are judged.
inline double annihilation_scale(const Measure& m, int degree) {
  double s = 0.0;
  for (const auto& a : m.atoms()) {
    s += std::abs(a.weight) * ipow(std::max(1.0, std::abs(a.location)), degree);
  }
  return s;
}

struct DegreeDefect {
  int degree = 0;
  double defect = 0.0;
  double scale = 0.0;
  double normalized = 0.0;
};

struct AllowabilityReport {
  bool allowable = true;
  std::vector<DegreeDefect> defects;

  explicit operator bool() const noexcept { return allowable; }
};

inline AllowabilityReport is_allowable(const Measure& m, int d, double tol = kAnnihilationTol) {
  if (d < 1) throw ValidationError("allowability order must be >= 1");
  if (!(tol > 0)) throw ValidationError("tolerance must be positive");
  AllowabilityReport report;
  for (int l = 0; l < d; ++l) {
    DegreeDefect dd;
    dd.degree = l;
    dd.defect = annihilation_defect(m, l);
    dd.scale = annihilation_scale(m, l);
    dd.normalized = std::abs(dd.defect) / dd.scale;
    if (!(dd.normalized <= tol)) report.allowable = false;
    report.defects.push_back(dd);
  }
  return report;
}

// Largest d such that m is allowable at order d (0 if it annihilates nothing).
// A measure with n atoms cannot annihilate degree n - 1 unless it is zero.
inline int max_allowable_order(const Measure& m, double tol = kAnnihilationTol) {
  int d = 0;
  while (d < static_cast<int>(m.size())) {
    const double defect = annihilation_defect(m, d);
    if (std::abs(defect) > tol * annihilation_scale(m, d)) break;
    ++d;
  }
  return d;
}

// Translation tau_h: atoms move to x_i + h.
inline Measure shift_measure(const Measure& m, double h) {
  std::vector<Atom> atoms(m.atoms().begin(), m.atoms().end());
  for (auto& a : atoms) a.location += h;
  // Rounding in x + h can push a far-from-origin measure past the tolerance,
  // so the claimed order is re-derived rather than enforced.
  Measure shifted(std::move(atoms), 0);
  const int order = std::min(m.order(), max_allowable_order(shifted));
  return Measure(std::vector<Atom>(shifted.atoms().begin(), shifted.atoms().end()), order);
}

// The measure of the order-d difference operator at t with lag iota:
// atoms t - k*iota carrying (-1)^k C(d, k), k = 0..d.
inline Measure finite_difference_measure(int d, double iota, double t) {
  if (d < 0) throw ValidationError("difference order must be nonnegative");
  if (!(iota > 0) || !std::isfinite(iota)) throw ValidationError("lag iota must be positive");
  std::vector<Atom> atoms;
  atoms.reserve(d + 1);
  for (int k = 0; k <= d; ++k) atoms.push_back({t - k * iota, difference_weight(d, k)});
  return Measure(std::move(atoms), d);
}

// A canonical member of Lambda_d supported on the given points: the
// minimum-norm weight vector annihilating degrees < d with positive degree-d
// moment, scaled to unit Euclidean norm. Computed on affinely rescaled points
// in a Chebyshev basis; both leave the null space and the sign unchanged.
inline Measure construct_allowable(std::span<const double> points, int d) {
  if (d < 1) throw ValidationError("order must be >= 1");
  std::vector<double> x(points.begin(), points.end());
  for (double v : x) {
    if (!std::isfinite(v)) throw ValidationError("support points must be finite");
  }
  std::sort(x.begin(), x.end());
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] - x[i - 1] < kAtomMergeTol) {
      throw ValidationError("duplicate support point " + format_double(x[i]));
    }
  }
  const auto n = static_cast<Eigen::Index>(x.size());
  if (n <= d) {
    throw InfeasibleSupportError("need at least " + std::to_string(d + 1) + " points for order " +
                                 std::to_string(d) + ", got " + std::to_string(n));
  }

  const double mid = 0.5 * (x.front() + x.back());
  const double half = 0.5 * (x.back() - x.front());
  // basis(i, l) = T_l(u_i), u in [-1, 1]
  Eigen::MatrixXd basis(n, d + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = (x[i] - mid) / half;
    basis(i, 0) = 1.0;
    if (d >= 1) basis(i, 1) = u;
    for (int l = 2; l <= d; ++l) basis(i, l) = 2.0 * u * basis(i, l - 1) - basis(i, l - 2);
  }

  const Eigen::MatrixXd constraints = basis.leftCols(d);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(constraints);
  const Eigen::Index rank = qr.rank();
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd null_space = q.rightCols(n - rank);
  Eigen::VectorXd w = null_space * (null_space.transpose() * basis.col(d));
  const double norm = w.norm();
  if (!(norm > 0)) throw InfeasibleSupportError("support admits no allowable measure");
  w /= norm;
  if (w.dot(basis.col(d)) < 0) w = -w;

  std::vector<Atom> atoms;
  atoms.reserve(x.size());
  for (Eigen::Index i = 0; i < n; ++i) atoms.push_back({x[i], w(i)});
  return Measure(std::move(atoms), d);
}

// lambda_{t0} = sum_i eta_i delta_{t_i} - delta_{t0}; the order is the
// largest one it satisfies.
inline Measure kriging_measure(std::span<const double> weights, std::span<const double> obs_t,
                               double t0) {
  if (weights.size() != obs_t.size()) throw LengthError("weights and locations differ in length");
  if (!std::isfinite(t0)) throw ValidationError("t0 must be finite");
  std::vector<Atom> atoms;
  atoms.reserve(obs_t.size() + 1);
  for (std::size_t i = 0; i < obs_t.size(); ++i) atoms.push_back({obs_t[i], weights[i]});
  atoms.push_back({t0, -1.0});
  Measure m(std::move(atoms), 0);
  const int order = max_allowable_order(m);
  return Measure(std::vector<Atom>(m.atoms().begin(), m.atoms().end()), order);
}

}  // namespace irf
