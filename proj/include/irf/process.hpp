#pragma once

// Uniformly gridded sample paths, the differencing operator on grids, and
// the empirical structure-function estimator.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "irf/error.hpp"
#include "irf/measure.hpp"
#include "irf/numeric.hpp"

namespace irf {

struct PathMeta {
  int order_d = 0;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> model_id;

  friend bool operator==(const PathMeta&, const PathMeta&) = default;
};

// Realization X(t0 + j*dt), j = 0..n-1.
class SampledPath {
 public:
  SampledPath(double t0, double dt, std::vector<double> values, PathMeta meta = {})
      : t0_(t0), dt_(dt), values_(std::move(values)), meta_(std::move(meta)) {
    if (!std::isfinite(t0_)) throw ValidationError("path origin must be finite");
    if (!(dt_ > 0) || !std::isfinite(dt_)) throw ValidationError("path step dt must be positive");
    if (values_.empty()) throw ValidationError("path must have at least one value");
    for (std::size_t j = 0; j < values_.size(); ++j) {
      if (!std::isfinite(values_[j])) {
        throw ValidationError("path value at index " + std::to_string(j) + " is not finite");
      }
    }
  }

  double t0() const noexcept { return t0_; }
  double dt() const noexcept { return dt_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }
  double time(std::size_t j) const noexcept { return t0_ + static_cast<double>(j) * dt_; }
  const PathMeta& meta() const noexcept { return meta_; }

  friend bool operator==(const SampledPath&, const SampledPath&) = default;

 private:
  double t0_;
  double dt_;
  std::vector<double> values_;
  PathMeta meta_;
};

// p(t) = sum_i a_i t^i.
class PolynomialTrend {
 public:
  PolynomialTrend() = default;
  explicit PolynomialTrend(std::vector<double> coefficients)
      : coefficients_(std::move(coefficients)) {}

  std::span<const double> coefficients() const noexcept { return coefficients_; }

  // Index of the highest nonzero coefficient, -1 for the zero polynomial.
  int degree() const noexcept {
    for (int i = static_cast<int>(coefficients_.size()) - 1; i >= 0; --i) {
      if (coefficients_[i] != 0.0) return i;
    }
    return -1;
  }

  double operator()(double t) const noexcept { return eval_trend(*this, t); }

  friend double eval_trend(const PolynomialTrend& p, double t) noexcept {
    double r = 0.0;
    for (auto it = p.coefficients_.rbegin(); it != p.coefficients_.rend(); ++it) r = r * t + *it;
    return r;
  }

 private:
  std::vector<double> coefficients_;
};

// Order-d difference with lag iota = m*dt. The result starts at
// t0 + d*m*dt and has n - d*m values.
inline SampledPath difference(const SampledPath& path, int d, int m) {
  if (d < 0) throw ValidationError("difference order must be nonnegative");
  if (m < 1) throw ValidationError("lag multiple m must be positive");
  if (d == 0) return path;
  const std::size_t span = static_cast<std::size_t>(d) * static_cast<std::size_t>(m);
  if (path.size() <= span) {
    throw LengthError("path of length " + std::to_string(path.size()) +
                      " too short for difference of order " + std::to_string(d) + " at lag " +
                      std::to_string(m));
  }
  std::vector<double> weights(d + 1);
  for (int k = 0; k <= d; ++k) weights[k] = difference_weight(d, k);

  const auto x = path.values();
  std::vector<double> out(path.size() - span);
  for (std::size_t j = span; j < path.size(); ++j) {
    double s = 0.0;
    for (int k = 0; k <= d; ++k) s += weights[k] * x[j - static_cast<std::size_t>(k) * m];
    out[j - span] = s;
  }
  PathMeta meta = path.meta();
  meta.order_d = std::max(0, meta.order_d - d);
  return SampledPath(path.time(span), path.dt(), std::move(out), std::move(meta));
}

// Grid index of location x, or nullopt when x is off-grid by more than
// 1e-9*dt or outside the path.
inline std::optional<std::size_t> grid_index(const SampledPath& path, double x) {
  const double pos = (x - path.t0()) / path.dt();
  const double k = std::round(pos);
  if (std::abs(pos - k) > 1e-9) return std::nullopt;
  if (k < 0 || k >= static_cast<double>(path.size())) return std::nullopt;
  return static_cast<std::size_t>(k);
}

// X(lambda) = sum_i w_i X(x_i) over a path; atoms must sit on the grid.
inline double apply_measure_to_path(const Measure& m, const SampledPath& path) {
  double s = 0.0;
  for (const auto& a : m.atoms()) {
    const auto idx = grid_index(path, a.location);
    if (!idx) {
      throw AlignmentError("atom at " + format_double(a.location) +
                           " is not on the path grid (t0 = " + format_double(path.t0()) +
                           ", dt = " + format_double(path.dt()) + ", n = " +
                           std::to_string(path.size()) + ")");
    }
    s += a.weight * path[*idx];
  }
  return s;
}

struct StructureEstimate {
  int lag = 0;          // in grid steps
  double h = 0.0;       // lag * dt
  double estimate = 0.0;
  double se = 0.0;      // between-replicate standard error, NaN for one replicate
};

// Mean over replicates and over t of D(t+h) D(t), where D is the order-d
// difference at lag m*dt. Standard errors use replicate means only.
inline std::vector<StructureEstimate> empirical_structure_function(
    std::span<const SampledPath> paths, int d, int m, std::span<const int> lags) {
  if (paths.empty()) throw ValidationError("empirical structure function needs at least one path");
  const double dt = paths.front().dt();
  const std::size_t n = paths.front().size();
  for (const auto& p : paths) {
    if (p.size() != n || std::abs(p.dt() - dt) > 1e-9 * dt) {
      throw ValidationError("all paths must share dt and length");
    }
  }
  std::vector<SampledPath> diffs;
  diffs.reserve(paths.size());
  for (const auto& p : paths) diffs.push_back(difference(p, d, m));
  const std::size_t nd = diffs.front().size();

  std::vector<StructureEstimate> out;
  out.reserve(lags.size());
  const double reps = static_cast<double>(diffs.size());
  for (int lag : lags) {
    const std::size_t a = static_cast<std::size_t>(std::abs(lag));
    if (a >= nd) {
      throw LengthError("lag " + std::to_string(lag) + " exceeds differenced length " +
                        std::to_string(nd));
    }
    // h and -h pair the same products; summing in |h| order makes them equal.
    std::vector<double> rep_means(diffs.size());
    for (std::size_t r = 0; r < diffs.size(); ++r) {
      const auto v = diffs[r].values();
      double s = 0.0;
      for (std::size_t j = 0; j + a < nd; ++j) s += v[j + a] * v[j];
      rep_means[r] = s / static_cast<double>(nd - a);
    }
    double mean = 0.0;
    for (double v : rep_means) mean += v;
    mean /= reps;
    double se = std::numeric_limits<double>::quiet_NaN();
    if (diffs.size() >= 2) {
      double ss = 0.0;
      for (double v : rep_means) ss += (v - mean) * (v - mean);
      se = std::sqrt(ss / (reps - 1.0) / reps);
    }
    out.push_back({lag, lag * dt, mean, se});
  }
  return out;
}

}  // namespace irf
