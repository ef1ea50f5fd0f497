#pragma once

// Monte Carlo checks that an I(d) process behaves as an IRF(d): images
// X(tau_h lambda) under allowable measures have shift-invariant first and
// second moments, differenced paths look stationary window by window, and
// a non-allowable measure on a trended process is caught.
//
// Every comparison is a paired standardized gap between two groups computed
// from the same replicates: z = mean(v_g - v_g') / se(v_g - v_g').

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "irf/error.hpp"
#include "irf/measure.hpp"
#include "irf/parallel.hpp"
#include "irf/process.hpp"
#include "irf/spectral.hpp"

namespace irf {

inline constexpr double kDefaultZThreshold = 4.0;

enum class Statistic { mean, lag_cov };

inline std::string to_string(Statistic s) { return s == Statistic::mean ? "mean" : "lag-cov"; }

struct GroupEstimate {
  double position = 0.0;  // shift h, or window start time
  double lag = 0.0;       // 0 for the mean statistic
  double estimate = 0.0;
  double se = 0.0;
};

struct PairComparison {
  std::size_t first = 0;  // indices into groups
  std::size_t second = 0;
  double gap = 0.0;
  double se = 0.0;
  double z = 0.0;
};

struct InvarianceReport {
  Statistic statistic = Statistic::mean;
  std::vector<GroupEstimate> groups;
  std::vector<PairComparison> pairs;
  double max_z = 0.0;
  double z_threshold = kDefaultZThreshold;
  bool pass = true;
  int n_replicates = 0;
  std::uint64_t seed = 0;
};

struct HarnessResult {
  std::vector<InvarianceReport> reports;
  bool pass = true;
};

struct HarnessConfig {
  TimeGrid grid{0.0, 1.0, 64};
  FrequencyGrid fgrid{};
  double z_threshold = kDefaultZThreshold;
  unsigned jobs = 1;
  int windows = 4;                       // differenced-stationarity windows
  std::vector<int> window_lags{0, 1};    // in grid steps
};

// Replicate r of a run seeded with `seed` uses seed_base + r, where seed_base
// scrambles the master seed so neighbouring master seeds share no streams.
inline std::uint64_t seed_base(std::uint64_t seed) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace detail {

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

inline Moments moments(std::span<const double> v) {
  Moments m;
  const double n = static_cast<double>(v.size());
  for (double x : v) m.mean += x;
  m.mean /= n;
  if (v.size() >= 2) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return m;
}

inline double standardized(double gap, double se) {
  if (se > 0) return gap / se;
  return gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

// samples[g][r]: value of group g in replicate r. Groups with equal `lag`
// are compared pairwise.
inline InvarianceReport compare_groups(Statistic stat, std::vector<GroupEstimate> groups,
                                       const std::vector<std::vector<double>>& samples,
                                       double z_threshold, std::uint64_t seed) {
  InvarianceReport rep;
  rep.statistic = stat;
  rep.z_threshold = z_threshold;
  rep.seed = seed;
  rep.n_replicates = samples.empty() ? 0 : static_cast<int>(samples.front().size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto m = moments(samples[g]);
    groups[g].estimate = m.mean;
    groups[g].se = m.se;
  }
  std::vector<double> diff(rep.n_replicates);
  for (std::size_t a = 0; a < groups.size(); ++a) {
    for (std::size_t b = a + 1; b < groups.size(); ++b) {
      if (groups[a].lag != groups[b].lag) continue;
      for (std::size_t r = 0; r < diff.size(); ++r) diff[r] = samples[a][r] - samples[b][r];
      const auto m = moments(diff);
      PairComparison pc{a, b, m.mean, m.se, standardized(m.mean, m.se)};
      rep.max_z = std::max(rep.max_z, std::abs(pc.z));
      rep.pairs.push_back(pc);
    }
  }
  rep.groups = std::move(groups);
  rep.pass = rep.max_z <= z_threshold;
  return rep;
}

inline std::vector<SampledPath> simulate_replicates(const SpectralModel& model,
                                                    const HarnessConfig& cfg, int n_reps,
                                                    std::uint64_t seed) {
  const std::uint64_t base = seed_base(seed);
  std::vector<std::optional<SampledPath>> slots(static_cast<std::size_t>(n_reps));
  parallel_for(slots.size(), cfg.jobs, [&](std::size_t r) {
    slots[r] = simulate_id_path(model, cfg.grid, cfg.fgrid, base + r);
  });
  std::vector<SampledPath> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

inline double grid_steps(double v, double dt, const char* what) {
  const double k = std::round(v / dt);
  if (std::abs(v / dt - k) > 1e-9) {
    throw AlignmentError(std::string(what) + " " + format_double(v) +
                         " is not a multiple of the grid step " + format_double(dt));
  }
  return k;
}

// Mean of X(tau_h lambda) for each shift h, without any allowability check.
inline InvarianceReport shift_mean_report(const std::vector<SampledPath>& paths, const Measure& m,
                                          std::span<const double> shifts, double z_threshold,
                                          std::uint64_t seed) {
  std::vector<GroupEstimate> groups;
  std::vector<std::vector<double>> samples;
  for (double h : shifts) {
    const Measure shifted = shift_measure(m, h);
    std::vector<double> v(paths.size());
    for (std::size_t r = 0; r < paths.size(); ++r) v[r] = apply_measure_to_path(shifted, paths[r]);
    groups.push_back({h, 0.0, 0.0, 0.0});
    samples.push_back(std::move(v));
  }
  return compare_groups(Statistic::mean, std::move(groups), samples, z_threshold, seed);
}

}  // namespace detail

// Compares mean and lagged products X(tau_h lambda) X(tau_{h+u} lambda)
// across the shifts h, for each lag u.
inline HarnessResult shift_invariance_test(const SpectralModel& model, const Measure& lambda,
                                           std::span<const double> shifts,
                                           std::span<const double> lags, int n_reps,
                                           std::uint64_t seed, const HarnessConfig& cfg = {}) {
  if (n_reps < 1) throw ValidationError("n_reps must be >= 1");
  if (shifts.size() < 2) throw ValidationError("need at least two shifts to compare");
  if (model.order_d >= 1 && !is_allowable(lambda, model.order_d)) {
    throw PreconditionError("measure is not allowable at the model order " +
                            std::to_string(model.order_d) + "; use negative_control");
  }
  for (double h : shifts) detail::grid_steps(h, cfg.grid.dt, "shift");
  for (double u : lags) detail::grid_steps(u, cfg.grid.dt, "lag");

  const auto paths = detail::simulate_replicates(model, cfg, n_reps, seed);
  HarnessResult res;
  res.reports.push_back(detail::shift_mean_report(paths, lambda, shifts, cfg.z_threshold, seed));

  if (!lags.empty()) {
    std::vector<GroupEstimate> groups;
    std::vector<std::vector<double>> samples;
    for (double u : lags) {
      for (double h : shifts) {
        const Measure a = shift_measure(lambda, h);
        const Measure b = shift_measure(lambda, h + u);
        std::vector<double> v(paths.size());
        for (std::size_t r = 0; r < paths.size(); ++r) {
          v[r] = apply_measure_to_path(a, paths[r]) * apply_measure_to_path(b, paths[r]);
        }
        groups.push_back({h, u, 0.0, 0.0});
        samples.push_back(std::move(v));
      }
    }
    res.reports.push_back(detail::compare_groups(Statistic::lag_cov, std::move(groups), samples,
                                                 cfg.z_threshold, seed));
  }
  res.pass = std::all_of(res.reports.begin(), res.reports.end(),
                         [](const InvarianceReport& r) { return r.pass; });
  return res;
}

namespace detail {

inline HarnessResult window_stationarity(const std::vector<SampledPath>& diffs,
                                         const HarnessConfig& cfg, std::uint64_t seed) {
  const std::size_t nd = diffs.front().size();
  const auto w = static_cast<std::size_t>(cfg.windows);
  if (cfg.windows < 3) throw ValidationError("need at least 3 windows");
  const std::size_t len = nd / w;
  int max_lag = 0;
  for (int u : cfg.window_lags) {
    if (u < 0) throw ValidationError("window lags must be nonnegative");
    max_lag = std::max(max_lag, u);
  }
  if (len < 2 || len <= static_cast<std::size_t>(max_lag)) {
    throw LengthError("differenced path of length " + std::to_string(nd) + " is too short for " +
                      std::to_string(cfg.windows) + " windows");
  }

  std::vector<GroupEstimate> mean_groups;
  std::vector<std::vector<double>> mean_samples;
  std::vector<GroupEstimate> cov_groups;
  std::vector<std::vector<double>> cov_samples;
  for (std::size_t k = 0; k < w; ++k) {
    const std::size_t begin = k * len;
    const double start = diffs.front().time(begin);
    std::vector<double> means(diffs.size());
    for (std::size_t r = 0; r < diffs.size(); ++r) {
      const auto v = diffs[r].values();
      double s = 0.0;
      for (std::size_t j = begin; j < begin + len; ++j) s += v[j];
      means[r] = s / static_cast<double>(len);
    }
    mean_groups.push_back({start, 0.0, 0.0, 0.0});
    mean_samples.push_back(std::move(means));
  }
  for (int u : cfg.window_lags) {
    const auto a = static_cast<std::size_t>(u);
    for (std::size_t k = 0; k < w; ++k) {
      const std::size_t begin = k * len;
      std::vector<double> prods(diffs.size());
      for (std::size_t r = 0; r < diffs.size(); ++r) {
        const auto v = diffs[r].values();
        double s = 0.0;
        for (std::size_t j = begin; j + a < begin + len; ++j) s += v[j] * v[j + a];
        prods[r] = s / static_cast<double>(len - a);
      }
      cov_groups.push_back({diffs.front().time(begin), u * diffs.front().dt(), 0.0, 0.0});
      cov_samples.push_back(std::move(prods));
    }
  }
  HarnessResult res;
  res.reports.push_back(
      compare_groups(Statistic::mean, std::move(mean_groups), mean_samples, cfg.z_threshold, seed));
  res.reports.push_back(compare_groups(Statistic::lag_cov, std::move(cov_groups), cov_samples,
                                       cfg.z_threshold, seed));
  res.pass = res.reports[0].pass && res.reports[1].pass;
  return res;
}

}  // namespace detail

// Differences each simulated path at lag iota with order d, cuts the result
// into cfg.windows disjoint windows and compares window means and lagged
// products across windows.
inline HarnessResult differenced_stationarity_test(const SpectralModel& model, int d, double iota,
                                                   int n_reps, std::uint64_t seed,
                                                   const HarnessConfig& cfg = {}) {
  if (n_reps < 1) throw ValidationError("n_reps must be >= 1");
  if (d < 0) throw ValidationError("difference order must be nonnegative");
  const int m = static_cast<int>(detail::grid_steps(iota, cfg.grid.dt, "lag iota"));
  if (m < 1) throw ValidationError("lag iota must be positive");
  const auto paths = detail::simulate_replicates(model, cfg, n_reps, seed);
  std::vector<SampledPath> diffs;
  diffs.reserve(paths.size());
  for (const auto& p : paths) diffs.push_back(difference(p, d, m));
  return detail::window_stationarity(diffs, cfg, seed);
}

// Same comparison on caller-supplied paths (e.g. loaded from disk).
inline HarnessResult differenced_stationarity_test(std::span<const SampledPath> paths, int d, int m,
                                                   std::uint64_t seed, const HarnessConfig& cfg = {}) {
  if (paths.empty()) throw ValidationError("need at least one path");
  std::vector<SampledPath> diffs;
  for (const auto& p : paths) diffs.push_back(difference(p, d, m));
  return detail::window_stationarity(diffs, cfg, seed);
}

// Shift-invariance of the mean of X(tau_h lambda_bad) on a process carrying
// a deterministic trend. The caller expects failure when lambda_bad does not
// annihilate the trend and the induced mean drift is large; a zero trend or an
// allowable measure should pass.
inline InvarianceReport negative_control(const SpectralModel& model, const PolynomialTrend& trend,
                                         const Measure& lambda_bad, std::span<const double> shifts,
                                         int n_reps, std::uint64_t seed,
                                         const HarnessConfig& cfg = {}) {
  if (n_reps < 1) throw ValidationError("n_reps must be >= 1");
  if (shifts.size() < 2) throw ValidationError("need at least two shifts to compare");
  for (double h : shifts) detail::grid_steps(h, cfg.grid.dt, "shift");
  SpectralModel trended = model;
  trended.trend = trend;
  const auto paths = detail::simulate_replicates(trended, cfg, n_reps, seed);
  return detail::shift_mean_report(paths, lambda_bad, shifts, cfg.z_threshold, seed);
}

// Slope a1 of a linear trend a1*t whose mean drift a1 * sum(w) * (h_b - h_a)
// across the two most distant shifts equals `n_se` paired standard errors of
// the trend-free run with the same seed.
inline double negative_control_slope(const SpectralModel& model, const Measure& lambda_bad,
                                     std::span<const double> shifts, int n_reps,
                                     std::uint64_t seed, const HarnessConfig& cfg = {},
                                     double n_se = 8.0) {
  double mass = 0.0;
  for (const auto& a : lambda_bad.atoms()) mass += a.weight;
  if (mass == 0.0) {
    throw PreconditionError("measure annihilates constants; a linear trend cannot move its mean");
  }
  const auto pilot = negative_control(model, PolynomialTrend{}, lambda_bad, shifts, n_reps, seed, cfg);
  const PairComparison* widest = nullptr;
  double widest_gap = -1.0;
  for (const auto& pc : pilot.pairs) {
    const double dh = std::abs(pilot.groups[pc.second].position - pilot.groups[pc.first].position);
    if (dh > widest_gap) {
      widest_gap = dh;
      widest = &pc;
    }
  }
  if (!widest || widest_gap == 0.0) throw PreconditionError("shifts must be distinct");
  return n_se * widest->se / (std::abs(mass) * widest_gap);
}

}  // namespace irf
