#pragma once

// JSON and CSV forms of measures, models, grids, kernels, kriging problems,
// harness reports and sample paths.

#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "irf/covariance.hpp"
#include "irf/equivalence.hpp"
#include "irf/error.hpp"
#include "irf/kriging.hpp"
#include "irf/measure.hpp"
#include "irf/numeric.hpp"
#include "irf/process.hpp"
#include "irf/spectral.hpp"

namespace irf::io {

using nlohmann::json;

namespace detail {

inline const json& require(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError(std::string(what) + ": missing field '" + key + "'");
  }
  return j.at(key);
}

inline double number(const json& j, const char* what) {
  if (!j.is_number()) throw ValidationError(std::string(what) + " must be a number");
  return j.get<double>();
}

inline int integer(const json& j, const char* what) {
  if (!j.is_number_integer()) throw ValidationError(std::string(what) + " must be an integer");
  return j.get<int>();
}

inline std::vector<double> numbers(const json& j, const char* what) {
  if (!j.is_array()) throw ValidationError(std::string(what) + " must be an array of numbers");
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& e : j) v.push_back(number(e, what));
  return v;
}

// Reads the named params into a map, rejecting unknown keys.
inline std::map<std::string, double> params(const json& j, const std::set<std::string>& allowed,
                                            const std::string& family) {
  std::map<std::string, double> out;
  if (j.is_null()) return out;
  if (!j.is_object()) throw ValidationError("params must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) {
      throw ValidationError("unknown parameter '" + k + "' for family '" + family + "'");
    }
    if (v.is_string() && (v == "inf" || v == "infinity")) {
      out[k] = std::numeric_limits<double>::infinity();
    } else {
      out[k] = number(v, k.c_str());
    }
  }
  return out;
}

inline double get(const std::map<std::string, double>& m, const std::string& k, double dflt) {
  auto it = m.find(k);
  return it == m.end() ? dflt : it->second;
}

inline json finite_or_string(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return json(v);
}

}  // namespace detail

// ---- parse helpers ------------------------------------------------------

inline json parse_json(std::istream& in, const std::string& source) {
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("invalid JSON in " + source + ": " + e.what());
  }
}

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid JSON: ") + e.what());
  }
}

// ---- Measure ------------------------------------------------------------

inline json to_json(const Measure& m) {
  json atoms = json::array();
  for (const auto& a : m.atoms()) atoms.push_back(json::array({a.location, a.weight}));
  return json{{"order", m.order()}, {"atoms", atoms}};
}

inline Measure measure_from_json(const json& j) {
  const auto& atoms = detail::require(j, "atoms", "measure");
  if (!atoms.is_array()) throw ValidationError("measure: atoms must be an array");
  std::vector<Atom> v;
  for (const auto& a : atoms) {
    if (!a.is_array() || a.size() != 2) throw ValidationError("measure: each atom must be [x, w]");
    v.push_back({detail::number(a[0], "atom location"), detail::number(a[1], "atom weight")});
  }
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i].location > v[i - 1].location)) {
      throw ValidationError("measure: atoms must be sorted by strictly increasing location");
    }
  }
  const int order = j.contains("order") ? detail::integer(j.at("order"), "order") : 0;
  return Measure(std::move(v), order);
}

// ---- Spectral model and grid --------------------------------------------

inline json to_json(const SpectralDensity& f) {
  json p = std::visit(
      [](const auto& g) -> json {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, GaussianDensity> || std::is_same_v<T, ExponentialCovDensity>) {
          return json{{"variance", g.variance}, {"scale", g.scale}};
        } else if constexpr (std::is_same_v<T, BandlimitedWhiteDensity>) {
          return json{{"level", g.level}, {"lo", g.lo}, {"hi", detail::finite_or_string(g.hi)}};
        } else if constexpr (std::is_same_v<T, BrownianDensity>) {
          return json{{"C", g.C}};
        } else {
          return json{{"amplitude", g.amplitude}, {"exponent", g.exponent}};
        }
      },
      f);
  return json{{"family", family_name(f)}, {"params", p}};
}

inline SpectralDensity density_from_json(const json& j) {
  const auto& fam = detail::require(j, "family", "spectral model");
  if (!fam.is_string()) throw ValidationError("family must be a string");
  const std::string name = fam.get<std::string>();
  const json p = j.contains("params") ? j.at("params") : json(nullptr);
  SpectralDensity out;
  if (name == "gaussian" || name == "exponential-cov") {
    const auto m = detail::params(p, {"variance", "scale"}, name);
    if (name == "gaussian") {
      out = GaussianDensity{detail::get(m, "variance", 1.0), detail::get(m, "scale", 1.0)};
    } else {
      out = ExponentialCovDensity{detail::get(m, "variance", 1.0), detail::get(m, "scale", 1.0)};
    }
  } else if (name == "bandlimited-white") {
    const auto m = detail::params(p, {"level", "lo", "hi"}, name);
    out = BandlimitedWhiteDensity{detail::get(m, "level", 1.0), detail::get(m, "lo", 0.0),
                                  detail::get(m, "hi", std::numeric_limits<double>::infinity())};
  } else if (name == "brownian") {
    const auto m = detail::params(p, {"C"}, name);
    out = BrownianDensity{detail::get(m, "C", 1.0)};
  } else if (name == "power-law") {
    const auto m = detail::params(p, {"amplitude", "exponent"}, name);
    out = PowerLawDensity{detail::get(m, "amplitude", 1.0), detail::get(m, "exponent", 1.0)};
  } else {
    throw ValidationError("unknown spectral family '" + name + "'");
  }
  validate_density(out);
  return out;
}

inline json to_json(const SpectralModel& m) {
  json j = to_json(m.f_y);
  j["d"] = m.order_d;
  if (m.trend) {
    j["trend"] = std::vector<double>(m.trend->coefficients().begin(), m.trend->coefficients().end());
  }
  return j;
}

inline SpectralModel model_from_json(const json& j) {
  SpectralModel m;
  m.order_d = detail::integer(detail::require(j, "d", "spectral model"), "d");
  m.f_y = density_from_json(j);
  if (j.contains("trend")) m.trend = PolynomialTrend(detail::numbers(j.at("trend"), "trend"));
  m.validate();
  return m;
}

inline json to_json(const FrequencyGrid& g) {
  return json{{"eps", g.eps},
              {"T", g.T},
              {"n", g.n_per_side},
              {"spacing", g.spacing == Spacing::log ? "log" : "linear"}};
}

inline FrequencyGrid grid_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("frequency grid must be an object");
  FrequencyGrid g;
  if (j.contains("eps")) g.eps = detail::number(j.at("eps"), "eps");
  if (j.contains("T")) g.T = detail::number(j.at("T"), "T");
  if (j.contains("n")) g.n_per_side = detail::integer(j.at("n"), "n");
  if (j.contains("spacing")) {
    const auto s = j.at("spacing");
    if (s == "log") g.spacing = Spacing::log;
    else if (s == "linear") g.spacing = Spacing::linear;
    else throw ValidationError("spacing must be \"log\" or \"linear\"");
  }
  g.validate();
  return g;
}

// ---- Intrinsic covariance -----------------------------------------------

inline json to_json(const IntrinsicCovariance& k) {
  switch (k.kind()) {
    case IcfKind::brownian:
      return json{{"kind", "brownian"}, {"C", k.brownian_c()}};
    case IcfKind::from_spectral:
      return json{{"kind", "from-spectral"}, {"model", to_json(*k.model())}, {"grid", to_json(*k.grid())}};
    case IcfKind::tabulated:
      return json{{"kind", "tabulated"},
                  {"h", std::vector<double>(k.table_h().begin(), k.table_h().end())},
                  {"K", std::vector<double>(k.table_k().begin(), k.table_k().end())},
                  {"order", k.order()}};
    case IcfKind::stationary: {
      json j = to_json(*k.density());
      j["kind"] = "stationary";
      return j;
    }
  }
  return json{};
}

inline IntrinsicCovariance icf_from_json(const json& j) {
  const auto& kind = detail::require(j, "kind", "ICF");
  if (kind == "brownian") {
    return IntrinsicCovariance::brownian(detail::number(detail::require(j, "C", "ICF"), "C"));
  }
  if (kind == "tabulated") {
    const int order = j.contains("order") ? detail::integer(j.at("order"), "order") : 0;
    return IntrinsicCovariance::tabulated(detail::numbers(detail::require(j, "h", "ICF"), "h"),
                                          detail::numbers(detail::require(j, "K", "ICF"), "K"), order);
  }
  if (kind == "from-spectral") {
    const FrequencyGrid g = j.contains("grid") ? grid_from_json(j.at("grid")) : FrequencyGrid{};
    return IntrinsicCovariance::from_spectral(model_from_json(detail::require(j, "model", "ICF")), g);
  }
  if (kind == "stationary") return IntrinsicCovariance::stationary(density_from_json(j));
  throw ValidationError("unknown ICF kind " + kind.dump());
}

// ---- Kriging problem ----------------------------------------------------

inline KrigingProblem problem_from_json(const json& j) {
  KrigingProblem p{detail::numbers(detail::require(j, "t", "problem"), "t"),
                   detail::numbers(detail::require(j, "x", "problem"), "x"),
                   detail::integer(detail::require(j, "d", "problem"), "d"),
                   icf_from_json(detail::require(j, "icf", "problem")),
                   j.contains("nugget") ? detail::number(j.at("nugget"), "nugget") : 0.0};
  p.validate();
  return p;
}

inline json to_json(const KrigingProblem& p) {
  return json{{"t", p.obs_t}, {"x", p.obs_x}, {"d", p.d}, {"icf", to_json(p.K)}, {"nugget", p.nugget}};
}

// ---- Harness reports ----------------------------------------------------

inline json to_json(const InvarianceReport& r) {
  json groups = json::array();
  for (const auto& g : r.groups) {
    groups.push_back({{"position", g.position}, {"lag", g.lag}, {"estimate", g.estimate}, {"se", g.se}});
  }
  json pairs = json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back({{"first", p.first}, {"second", p.second}, {"gap", p.gap}, {"se", p.se},
                     {"z", detail::finite_or_string(p.z)}});
  }
  return json{{"statistic", to_string(r.statistic)},
              {"groups", groups},
              {"pairs", pairs},
              {"max_z", detail::finite_or_string(r.max_z)},
              {"threshold", r.z_threshold},
              {"pass", r.pass},
              {"n_replicates", r.n_replicates},
              {"seed", r.seed}};
}

inline json to_json(const HarnessResult& h) {
  json reps = json::array();
  for (const auto& r : h.reports) reps.push_back(to_json(r));
  return json{{"reports", reps}, {"pass", h.pass}};
}

// ---- Path CSV -----------------------------------------------------------

// `t,value` for a single path, `replicate,t,value` otherwise (or when forced).
inline void write_paths_csv(std::ostream& out, std::span<const SampledPath> paths,
                            bool with_replicate = true) {
  if (paths.size() != 1) with_replicate = true;
  out << (with_replicate ? "replicate,t,value\n" : "t,value\n");
  for (std::size_t r = 0; r < paths.size(); ++r) {
    const auto& p = paths[r];
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (with_replicate) out << r << ',';
      out << format_double(p.time(j)) << ',' << format_double(p[j]) << '\n';
    }
  }
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline SampledPath path_from_samples(const std::vector<double>& t, std::vector<double> v,
                                     const std::string& where) {
  if (t.empty()) throw ValidationError(where + ": no rows");
  double dt = 1.0;
  if (t.size() >= 2) {
    dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    if (!(dt > 0)) throw ValidationError(where + ": times must increase");
    for (std::size_t j = 0; j < t.size(); ++j) {
      const double expect = t.front() + static_cast<double>(j) * dt;
      if (std::abs(t[j] - expect) > 1e-9 * dt * std::max(1.0, static_cast<double>(j))) {
        throw ValidationError(where + ": non-uniform spacing at row " + std::to_string(j + 1));
      }
    }
  }
  return SampledPath(t.front(), dt, std::move(v));
}

}  // namespace detail

inline std::vector<SampledPath> read_paths_csv(std::istream& in, const std::string& source = "csv") {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(source + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = detail::split_csv(line);
  bool multi;
  if (header == std::vector<std::string>{"t", "value"}) {
    multi = false;
  } else if (header == std::vector<std::string>{"replicate", "t", "value"}) {
    multi = true;
  } else {
    throw ValidationError(source + ": header must be 't,value' or 'replicate,t,value'");
  }
  std::vector<std::vector<double>> times, values;
  long long current = -1;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split_csv(line);
    if (cells.size() != (multi ? 3u : 2u)) {
      throw ValidationError(source + ": wrong number of columns at line " + std::to_string(row));
    }
    std::size_t c = 0;
    long long rep = 0;
    if (multi) {
      double r;
      if (!parse_double(cells[c++], r) || r != std::floor(r) || r < 0) {
        throw ValidationError(source + ": bad replicate index at line " + std::to_string(row));
      }
      rep = static_cast<long long>(r);
    }
    double t, v;
    if (!parse_double(cells[c], t) || !parse_double(cells[c + 1], v)) {
      throw ValidationError(source + ": bad number at line " + std::to_string(row));
    }
    if (rep != current) {
      if (rep != current + 1) {
        throw ValidationError(source + ": replicates must be contiguous and numbered from 0");
      }
      current = rep;
      times.emplace_back();
      values.emplace_back();
    }
    times.back().push_back(t);
    values.back().push_back(v);
  }
  if (times.empty()) throw ValidationError(source + ": no data rows");
  std::vector<SampledPath> out;
  for (std::size_t r = 0; r < times.size(); ++r) {
    out.push_back(detail::path_from_samples(times[r], std::move(values[r]),
                                            source + " replicate " + std::to_string(r)));
  }
  return out;
}

}  // namespace irf::io
