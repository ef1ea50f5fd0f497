#pragma once

// Spectral description of I(d) processes: the density f_y of the stationary
// d-th derivative, the induced density f(w) = f_y(w) / w^(2d), harmonic
// synthesis of sample paths through the truncated exponential kernel, and
// trapezoid quadratures of covariances and structure functions.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "irf/error.hpp"
#include "irf/numeric.hpp"
#include "irf/process.hpp"

namespace irf {

// f_y(w) = variance * scale / sqrt(2 pi) * exp(-(scale w)^2 / 2);
// C_y(h) = variance * exp(-h^2 / (2 scale^2)).
struct GaussianDensity {
  double variance = 1.0;
  double scale = 1.0;

  double operator()(double w) const noexcept {
    const double u = scale * w;
    return variance * scale / std::sqrt(2.0 * std::numbers::pi) * std::exp(-0.5 * u * u);
  }
  double covariance(double h) const noexcept {
    return variance * std::exp(-0.5 * h * h / (scale * scale));
  }
};

// f_y(w) = variance * scale / (pi (1 + (scale w)^2)); C_y(h) = variance * exp(-|h| / scale).
struct ExponentialCovDensity {
  double variance = 1.0;
  double scale = 1.0;

  double operator()(double w) const noexcept {
    const double u = scale * w;
    return variance * scale / (std::numbers::pi * (1.0 + u * u));
  }
  double covariance(double h) const noexcept { return variance * std::exp(-std::abs(h) / scale); }
};

// f_y(w) = level for lo <= |w| <= hi, zero elsewhere.
struct BandlimitedWhiteDensity {
  double level = 1.0;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();

  double operator()(double w) const noexcept {
    const double a = std::abs(w);
    return (a >= lo && a <= hi) ? level : 0.0;
  }
};

// White f_y = C / (2 pi); at order 1 the induced process has variogram C |iota|.
struct BrownianDensity {
  double C = 1.0;

  double operator()(double) const noexcept { return C / (2.0 * std::numbers::pi); }
};

// f_y(w) = amplitude * |w|^(-exponent).
struct PowerLawDensity {
  double amplitude = 1.0;
  double exponent = 1.0;

  double operator()(double w) const noexcept { return amplitude * std::pow(std::abs(w), -exponent); }
};

using SpectralDensity = std::variant<GaussianDensity, ExponentialCovDensity,
                                     BandlimitedWhiteDensity, BrownianDensity, PowerLawDensity>;

inline double density_at(const SpectralDensity& f, double w) {
  return std::visit([w](const auto& g) { return g(w); }, f);
}

inline std::string family_name(const SpectralDensity& f) {
  return std::visit(
      [](const auto& g) -> std::string {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, GaussianDensity>) return "gaussian";
        if constexpr (std::is_same_v<T, ExponentialCovDensity>) return "exponential-cov";
        if constexpr (std::is_same_v<T, BandlimitedWhiteDensity>) return "bandlimited-white";
        if constexpr (std::is_same_v<T, BrownianDensity>) return "brownian";
        if constexpr (std::is_same_v<T, PowerLawDensity>) return "power-law";
      },
      f);
}

inline void validate_density(const SpectralDensity& f) {
  std::visit(
      [](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        auto positive = [](double v, const char* name) {
          if (!(v > 0) || !std::isfinite(v)) {
            throw ValidationError(std::string("density parameter '") + name + "' must be positive");
          }
        };
        auto nonneg = [](double v, const char* name) {
          if (!(v >= 0) || !std::isfinite(v)) {
            throw ValidationError(std::string("density parameter '") + name +
                                  "' must be nonnegative");
          }
        };
        if constexpr (std::is_same_v<T, GaussianDensity> || std::is_same_v<T, ExponentialCovDensity>) {
          nonneg(g.variance, "variance");
          positive(g.scale, "scale");
        } else if constexpr (std::is_same_v<T, BandlimitedWhiteDensity>) {
          nonneg(g.level, "level");
          nonneg(g.lo, "lo");
          if (!(g.hi >= g.lo)) throw ValidationError("bandlimited-white needs hi >= lo");
        } else if constexpr (std::is_same_v<T, BrownianDensity>) {
          nonneg(g.C, "C");
        } else {
          nonneg(g.amplitude, "amplitude");
          if (!std::isfinite(g.exponent)) throw ValidationError("power-law exponent must be finite");
        }
      },
      f);
}

struct SpectralModel {
  int order_d = 1;
  SpectralDensity f_y = GaussianDensity{};
  // Deterministic drift added to synthesized paths. Zero in every valid
  // model; only negative-control runs set it.
  std::optional<PolynomialTrend> trend;

  // f(w) = f_y(w) / w^(2d), w != 0.
  double induced_density(double w) const {
    return density_at(f_y, w) / ipow(w * w, order_d);
  }

  void validate() const {
    if (order_d < 0) throw ValidationError("model order d must be nonnegative");
    validate_density(f_y);
  }
};

enum class Spacing { log, linear };

// Symmetric grid {-w_k} U {w_k}, eps = w_0 < ... < w_{n-1} = T; 0 excluded.
struct FrequencyGrid {
  double eps = 1e-4;
  double T = 1e3;
  int n_per_side = 4096;
  Spacing spacing = Spacing::log;

  void validate() const {
    if (!(eps > 0) || !std::isfinite(eps)) throw ValidationError("frequency grid eps must be positive");
    if (!(T > eps) || !std::isfinite(T)) throw ValidationError("frequency grid needs eps < T < inf");
    if (n_per_side < 2) throw ValidationError("frequency grid needs n >= 2 per side");
  }
};

// Positive-side nodes with trapezoid weights.
struct FrequencyBins {
  std::vector<double> omega;
  std::vector<double> weight;
};

inline FrequencyBins make_bins(const FrequencyGrid& g) {
  g.validate();
  const auto n = static_cast<std::size_t>(g.n_per_side);
  FrequencyBins bins;
  bins.omega.resize(n);
  bins.weight.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(n - 1);
    bins.omega[i] = g.spacing == Spacing::log ? g.eps * std::pow(g.T / g.eps, s)
                                              : g.eps + (g.T - g.eps) * s;
  }
  bins.omega.front() = g.eps;
  bins.omega.back() = g.T;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double half = 0.5 * (bins.omega[i + 1] - bins.omega[i]);
    bins.weight[i] += half;
    bins.weight[i + 1] += half;
  }
  return bins;
}

struct TimeGrid {
  double t0 = 0.0;
  double dt = 1.0;
  std::size_t n = 1;

  void validate() const {
    if (!std::isfinite(t0)) throw ValidationError("time grid origin must be finite");
    if (!(dt > 0) || !std::isfinite(dt)) throw ValidationError("time grid dt must be positive");
    if (n < 1) throw ValidationError("time grid needs at least one point");
  }
};

namespace detail {

// Sum_{k<d} (i x)^k / k!
inline std::complex<double> exp_head(int d, double x) {
  std::complex<double> term(1.0, 0.0), sum(0.0, 0.0);
  for (int k = 0; k < d; ++k) {
    sum += term;
    term *= std::complex<double>(0.0, x / (k + 1));
  }
  return sum;
}

}  // namespace detail

// g_d(t, w) = e^{itw} - sum_{k<d} (itw)^k / k!. For |tw| < 1e-3 the Taylor
// tail sum_{k>=d} (itw)^k / k! is summed instead to avoid cancellation.
inline std::complex<double> kernel_g(int d, double t, double w) {
  if (d < 0) throw ValidationError("kernel order must be nonnegative");
  const double x = t * w;
  if (d == 0) return {std::cos(x), std::sin(x)};
  if (std::abs(x) < 1e-3) {
    if (x == 0.0) return {0.0, 0.0};
    std::complex<double> term(1.0, 0.0);
    for (int k = 1; k <= d; ++k) term *= std::complex<double>(0.0, x / k);
    std::complex<double> sum = term;
    for (int k = d + 1; k < d + 40; ++k) {
      term *= std::complex<double>(0.0, x / k);
      sum += term;
      if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    return sum;
  }
  return std::complex<double>(std::cos(x), std::sin(x)) - detail::exp_head(d, x);
}

namespace detail {

// Harmonic superposition X(t_j) = sqrt(2) sum_b [a_b Re k(t_j, w_b) - b_b Im k(t_j, w_b)]
// with a_b, b_b ~ N(0, var_b). Bins are consumed in increasing w, a before b.
inline std::vector<double> synthesize(int d, const std::vector<double>& variance,
                                      const FrequencyBins& bins, const TimeGrid& grid,
                                      std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> acc(grid.n, 0.0);
  constexpr std::size_t kReanchor = 128;

  for (std::size_t b = 0; b < bins.omega.size(); ++b) {
    const double sd = std::sqrt(variance[b]);
    const double ca = normal(engine) * sd;
    const double cb = normal(engine) * sd;
    if (sd == 0.0) continue;
    const double w = bins.omega[b];
    const double step_re = std::cos(w * grid.dt), step_im = std::sin(w * grid.dt);
    double z_re = 0.0, z_im = 0.0;
    for (std::size_t j = 0; j < grid.n; ++j) {
      const double t = grid.t0 + static_cast<double>(j) * grid.dt;
      const double x = t * w;
      if (j % kReanchor == 0) {
        z_re = std::cos(x);
        z_im = std::sin(x);
      }
      double g_re, g_im;
      if (d > 0 && std::abs(x) < 1e-3) {
        const auto g = kernel_g(d, t, w);
        g_re = g.real();
        g_im = g.imag();
      } else {
        g_re = z_re;
        g_im = z_im;
        if (d > 0) {
          // subtract sum_{k<d} (ix)^k / k!
          double p_re = 1.0, p_im = 0.0, term_re = 1.0, term_im = 0.0;
          for (int k = 1; k < d; ++k) {
            const double s = x / k;
            const double nr = -term_im * s, ni = term_re * s;
            term_re = nr;
            term_im = ni;
            p_re += term_re;
            p_im += term_im;
          }
          g_re -= p_re;
          g_im -= p_im;
        }
      }
      acc[j] += ca * g_re - cb * g_im;
      const double nr = z_re * step_re - z_im * step_im;
      const double ni = z_re * step_im + z_im * step_re;
      z_re = nr;
      z_im = ni;
    }
  }
  for (auto& v : acc) v *= std::numbers::sqrt2;
  return acc;
}

inline std::vector<double> bin_variances(const FrequencyBins& bins, auto&& density) {
  std::vector<double> var(bins.omega.size());
  double total = 0.0;
  for (std::size_t b = 0; b < var.size(); ++b) {
    var[b] = density(bins.omega[b]) * bins.weight[b];
    if (!(var[b] >= 0.0)) {
      throw ModelError("spectral density is negative or undefined at w = " +
                       format_double(bins.omega[b]));
    }
    total += var[b];
  }
  if (!std::isfinite(total)) throw ModelError("spectral mass over the frequency grid overflows");
  return var;
}

}  // namespace detail

// I(d) path synthesized from the kernel g_d against the induced density;
// the drift variables of the general representation are zero.
inline SampledPath simulate_id_path(const SpectralModel& model, const TimeGrid& grid,
                                    const FrequencyGrid& fgrid, std::uint64_t seed) {
  model.validate();
  grid.validate();
  const auto bins = make_bins(fgrid);
  const auto var =
      detail::bin_variances(bins, [&](double w) { return model.induced_density(w); });
  auto values = detail::synthesize(model.order_d, var, bins, grid, seed);
  if (model.trend) {
    for (std::size_t j = 0; j < grid.n; ++j) {
      values[j] += (*model.trend)(grid.t0 + static_cast<double>(j) * grid.dt);
    }
  }
  PathMeta meta;
  meta.order_d = model.order_d;
  meta.seed = seed;
  meta.model_id = family_name(model.f_y);
  return SampledPath(grid.t0, grid.dt, std::move(values), std::move(meta));
}

inline SampledPath simulate_stationary_path(const SpectralDensity& f_y, const TimeGrid& grid,
                                            const FrequencyGrid& fgrid, std::uint64_t seed) {
  validate_density(f_y);
  grid.validate();
  const auto bins = make_bins(fgrid);
  const auto var = detail::bin_variances(bins, [&](double w) { return density_at(f_y, w); });
  auto values = detail::synthesize(0, var, bins, grid, seed);
  PathMeta meta;
  meta.order_d = 0;
  meta.seed = seed;
  meta.model_id = family_name(f_y);
  return SampledPath(grid.t0, grid.dt, std::move(values), std::move(meta));
}

// 2 int_eps^T cos(w h) f(w) dw on the grid, for any even density f.
template <class Density>
double cosine_quadrature(const FrequencyBins& bins, Density&& f, double h) {
  double s = 0.0;
  for (std::size_t b = 0; b < bins.omega.size(); ++b) {
    s += bins.weight[b] * std::cos(bins.omega[b] * h) * f(bins.omega[b]);
  }
  return 2.0 * s;
}

// C_y(h) = int e^{iwh} f_y(w) dw.
inline double theoretical_stationary_cov(const SpectralDensity& f_y, const FrequencyGrid& fgrid,
                                         double h) {
  validate_density(f_y);
  const auto bins = make_bins(fgrid);
  return cosine_quadrature(bins, [&](double w) { return density_at(f_y, w); }, h);
}

namespace detail {

// (1 - e^{-i w iota}) / w without cancellation: iota (2 sin^2(x/2) / x + i sin(x) / x), x = w iota.
inline std::complex<double> scaled_increment(double w, double iota) {
  const double x = w * iota;
  if (x == 0.0) return {0.0, iota};
  const double s = std::sin(0.5 * x);
  return {2.0 * s * s / w, std::sin(x) / w};
}

}  // namespace detail

// D(h; iota1, iota2) = int e^{iwh} (1 - e^{-iw iota1})^d (1 - e^{iw iota2})^d f(w) dw,
// with the w^{-2d} of f absorbed into the two increment factors.
inline double theoretical_structure_function(const SpectralModel& model, double iota1,
                                             double iota2, double h, const FrequencyGrid& fgrid) {
  model.validate();
  if (!(iota1 >= 0) || !(iota2 >= 0)) throw ValidationError("lags iota must be nonnegative");
  const auto bins = make_bins(fgrid);
  const int d = model.order_d;
  double re = 0.0, im = 0.0, mag = 0.0;
  for (std::size_t b = 0; b < bins.omega.size(); ++b) {
    const double fy = density_at(model.f_y, bins.omega[b]);
    if (fy == 0.0) continue;
    for (double w : {bins.omega[b], -bins.omega[b]}) {
      const auto a1 = detail::scaled_increment(w, iota1);
      const auto a2 = std::conj(detail::scaled_increment(w, iota2));
      std::complex<double> v(std::cos(w * h), std::sin(w * h));
      for (int k = 0; k < d; ++k) v *= a1 * a2;
      v *= fy * bins.weight[b];
      re += v.real();
      im += v.imag();
      mag += std::abs(v);
    }
  }
  if (!std::isfinite(re)) throw QuadratureError("structure-function quadrature is not finite");
  if (std::abs(im) > 1e-8 * mag) {
    throw QuadratureError("structure-function quadrature left imaginary residual " +
                          format_double(im) + " against magnitude " + format_double(mag));
  }
  return re;
}

struct IntegralCheck {
  double value = 0.0;
  bool finite = true;
  bool divergent = false;
};

struct ModelReport {
  IntegralCheck mass;          // int f_y
  IntegralCheck square;        // int f_y^2
  IntegralCheck kernel_energy; // int |g_d(1, w)|^2 f(w), the variance of X(1)
  bool pass = true;
};

namespace detail {

// Cauchy test on the two end decades of the grid: an end is divergent when
// its outermost decade adds more than 1e-3 of the partial sum and does not
// shrink relative to the neighbouring decade.
inline IntegralCheck integral_check(const FrequencyBins& bins, auto&& integrand) {
  IntegralCheck c;
  const double lo = bins.omega.front(), hi = bins.omega.back();
  double total = 0.0, inner1 = 0.0, inner2 = 0.0, outer1 = 0.0, outer2 = 0.0;
  for (std::size_t b = 0; b < bins.omega.size(); ++b) {
    const double w = bins.omega[b];
    const double v = 2.0 * bins.weight[b] * integrand(w);
    total += v;
    if (w <= 10 * lo) inner1 += v;
    else if (w <= 100 * lo) inner2 += v;
    if (w >= hi / 10) outer1 += v;
    else if (w >= hi / 100) outer2 += v;
  }
  c.value = total;
  c.finite = std::isfinite(total);
  if (!c.finite) {
    c.divergent = true;
    return c;
  }
  if (hi / lo >= 100.0 && total > 0.0) {
    const auto end_diverges = [&](double last, double prev) {
      return last > 1e-3 * total && last >= 0.5 * prev;
    };
    c.divergent = end_diverges(inner1, inner2) || end_diverges(outer1, outer2);
  }
  return c;
}

}  // namespace detail

// Finite-variance and square-integrability diagnostics for a model on a grid.
inline ModelReport validate_model(const SpectralModel& model, const FrequencyGrid& fgrid) {
  model.validate();
  const auto bins = make_bins(fgrid);
  ModelReport r;
  r.mass = detail::integral_check(bins, [&](double w) { return density_at(model.f_y, w); });
  r.square = detail::integral_check(bins, [&](double w) {
    const double f = density_at(model.f_y, w);
    return f * f;
  });
  r.kernel_energy = detail::integral_check(bins, [&](double w) {
    return std::norm(kernel_g(model.order_d, 1.0, w)) * model.induced_density(w);
  });
  r.pass = r.mass.finite && !r.mass.divergent && r.square.finite && !r.square.divergent &&
           r.kernel_energy.finite && !r.kernel_energy.divergent;
  return r;
}

}  // namespace irf
