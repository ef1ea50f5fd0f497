#pragma once

// Intrinsic (generalized) covariance functions K and the identities that tie
// them to structure functions of differenced processes.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "irf/error.hpp"
#include "irf/measure.hpp"
#include "irf/numeric.hpp"
#include "irf/spectral.hpp"

namespace irf {

enum class IcfKind { brownian, from_spectral, tabulated, stationary };

inline std::string to_string(IcfKind k) {
  switch (k) {
    case IcfKind::brownian: return "brownian";
    case IcfKind::from_spectral: return "from-spectral";
    case IcfKind::tabulated: return "tabulated";
    case IcfKind::stationary: return "stationary";
  }
  return "unknown";
}

// A stationary kernel K(h) together with the order d of the allowable
// measures it is meant to act on. Cheap to copy; the evaluator is shared.
class IntrinsicCovariance {
 public:
  // K(h) = -C |h| / 2, the order-1 generalized covariance of Brownian motion.
  static IntrinsicCovariance brownian(double C) {
    if (!(C > 0) || !std::isfinite(C)) throw ValidationError("brownian C must be positive");
    IntrinsicCovariance k(IcfKind::brownian, 1, [C](double h) { return -0.5 * C * std::abs(h); });
    k.brownian_c_ = C;
    return k;
  }

  // K(h) = int e^{iwh} f(w) dw with f the induced density of the model,
  // on the same grid the synthesis uses.
  static IntrinsicCovariance from_spectral(const SpectralModel& model, const FrequencyGrid& grid) {
    model.validate();
    auto bins = std::make_shared<FrequencyBins>(make_bins(grid));
    auto f = std::make_shared<std::vector<double>>(bins->omega.size());
    for (std::size_t b = 0; b < f->size(); ++b) (*f)[b] = model.induced_density(bins->omega[b]);
    IntrinsicCovariance k(IcfKind::from_spectral, model.order_d, [bins, f](double h) {
      double s = 0.0;
      for (std::size_t b = 0; b < bins->omega.size(); ++b) {
        s += bins->weight[b] * std::cos(bins->omega[b] * h) * (*f)[b];
      }
      return 2.0 * s;
    });
    k.model_ = model;
    k.grid_ = grid;
    return k;
  }

  // Linear interpolation between knots, no extrapolation. When every knot is
  // nonnegative the table is read as K(|h|).
  static IntrinsicCovariance tabulated(std::vector<double> h, std::vector<double> values,
                                       int order = 0) {
    if (h.size() != values.size()) throw LengthError("tabulated ICF: h and K differ in length");
    if (h.size() < 2) throw ValidationError("tabulated ICF needs at least two knots");
    if (order < 0) throw ValidationError("ICF order must be nonnegative");
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (!std::isfinite(h[i]) || !std::isfinite(values[i])) {
        throw ValidationError("tabulated ICF entries must be finite");
      }
      if (i > 0 && !(h[i] > h[i - 1])) {
        throw ValidationError("tabulated ICF knots must be strictly increasing");
      }
    }
    auto knots = std::make_shared<const std::vector<double>>(std::move(h));
    auto vals = std::make_shared<const std::vector<double>>(std::move(values));
    const bool even = knots->front() >= 0.0;
    IntrinsicCovariance k(IcfKind::tabulated, order, [knots, vals, even](double x) {
      const double q = even ? std::abs(x) : x;
      if (!(q >= knots->front() && q <= knots->back())) {
        throw RangeError("tabulated ICF evaluated at " + format_double(x) + " outside [" +
                         format_double(knots->front()) + ", " + format_double(knots->back()) + "]");
      }
      auto it = std::upper_bound(knots->begin(), knots->end(), q);
      if (it == knots->end()) return vals->back();
      const auto i = static_cast<std::size_t>(it - knots->begin());
      const double a = (*knots)[i - 1], b = (*knots)[i];
      const double s = (q - a) / (b - a);
      return (1.0 - s) * (*vals)[i - 1] + s * (*vals)[i];
    });
    k.table_h_ = knots;
    k.table_k_ = vals;
    return k;
  }

  // Closed-form covariance of a stationary density family (order 0).
  static IntrinsicCovariance stationary(const SpectralDensity& density) {
    validate_density(density);
    std::function<double(double)> eval;
    if (const auto* g = std::get_if<GaussianDensity>(&density)) {
      eval = [g = *g](double h) { return g.covariance(h); };
    } else if (const auto* e = std::get_if<ExponentialCovDensity>(&density)) {
      eval = [e = *e](double h) { return e.covariance(h); };
    } else {
      throw ValidationError("no closed-form covariance for family '" + family_name(density) + "'");
    }
    IntrinsicCovariance k(IcfKind::stationary, 0, std::move(eval));
    k.density_ = density;
    return k;
  }

  double operator()(double h) const {
    const double v = eval_(h);
    if (!std::isfinite(v)) throw EvaluationError("ICF is not finite at h = " + format_double(h));
    return v;
  }

  IcfKind kind() const noexcept { return kind_; }
  int order() const noexcept { return order_; }

  // Parameters, for serialization.
  double brownian_c() const noexcept { return brownian_c_; }
  const std::optional<SpectralModel>& model() const noexcept { return model_; }
  const std::optional<FrequencyGrid>& grid() const noexcept { return grid_; }
  const std::optional<SpectralDensity>& density() const noexcept { return density_; }
  std::span<const double> table_h() const noexcept {
    return table_h_ ? std::span<const double>(*table_h_) : std::span<const double>{};
  }
  std::span<const double> table_k() const noexcept {
    return table_k_ ? std::span<const double>(*table_k_) : std::span<const double>{};
  }

 private:
  IntrinsicCovariance(IcfKind kind, int order, std::function<double(double)> eval)
      : kind_(kind), order_(order), eval_(std::move(eval)) {}

  IcfKind kind_;
  int order_;
  std::function<double(double)> eval_;
  double brownian_c_ = 0.0;
  std::optional<SpectralModel> model_;
  std::optional<FrequencyGrid> grid_;
  std::optional<SpectralDensity> density_;
  std::shared_ptr<const std::vector<double>> table_h_;
  std::shared_ptr<const std::vector<double>> table_k_;
};

inline double icf_eval(const IntrinsicCovariance& K, double h) { return K(h); }

// Cov(X(l1), X(l2)) = sum_i sum_j w1_i w2_j K(x1_i - x2_j). Both measures
// must be allowable at the kernel's order.
inline double cov_between_measures(const IntrinsicCovariance& K, const Measure& l1,
                                   const Measure& l2) {
  if (K.order() >= 1) {
    if (!is_allowable(l1, K.order())) {
      throw OrderError("first measure is not allowable at order " + std::to_string(K.order()));
    }
    if (!is_allowable(l2, K.order())) {
      throw OrderError("second measure is not allowable at order " + std::to_string(K.order()));
    }
  }
  double s = 0.0;
  for (const auto& a : l1.atoms()) {
    for (const auto& b : l2.atoms()) s += a.weight * b.weight * K(a.location - b.location);
  }
  return s;
}

// Covariance of two order-d differences at lags iota1, iota2 whose anchors
// are tau apart: sum_{k1,k2} (-1)^{k1+k2} C(d,k1) C(d,k2) K(tau - k1 iota1 + k2 iota2).
inline double structure_from_icf(const IntrinsicCovariance& K, int d, double iota1, double iota2,
                                 double tau) {
  if (d < 1) throw ValidationError("structure_from_icf needs d >= 1");
  double s = 0.0;
  for (int k1 = 0; k1 <= d; ++k1) {
    for (int k2 = 0; k2 <= d; ++k2) {
      s += difference_weight(d, k1) * difference_weight(d, k2) * K(tau - k1 * iota1 + k2 * iota2);
    }
  }
  return s;
}

// Cov(X(t), X(s)) of Brownian motion started at 0.
inline double brownian_cov(double t, double s, double C) {
  if (!(C > 0)) throw ValidationError("brownian C must be positive");
  if (t * s < 0) return 0.0;
  return C * std::min(std::abs(t), std::abs(s));
}

inline double variogram_brownian(double iota, double C) {
  if (!(C > 0)) throw ValidationError("brownian C must be positive");
  return C * std::abs(iota);
}

struct PsdReport {
  bool psd = false;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;

  explicit operator bool() const noexcept { return psd; }
};

inline PsdReport psd_check(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw ValidationError("PSD check needs a square matrix");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw ValidationError("PSD check needs a symmetric matrix");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  PsdReport r;
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  r.max_eigenvalue = es.eigenvalues().maxCoeff();
  r.psd = r.min_eigenvalue >= -1e-8 * std::max(r.max_eigenvalue, 0.0);
  return r;
}

// Gram matrix G_ij = cov_between_measures(K, m_i, m_j).
inline Eigen::MatrixXd covariance_gram(const IntrinsicCovariance& K, std::span<const Measure> ms) {
  const auto n = static_cast<Eigen::Index>(ms.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      g(i, j) = g(j, i) = cov_between_measures(K, ms[i], ms[j]);
    }
  }
  return g;
}

}  // namespace irf
