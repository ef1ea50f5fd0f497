// irf: command-line front end for simulation, differencing, structure
// functions, kriging, measure utilities and the verification harness.
//
// Exit codes: 0 success, 1 verification outcome differs from expectation,
// 2 usage or input error, 3 numerical failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "irf/io.hpp"
#include "irf/irf.hpp"

namespace {

using irf::io::json;

constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

// Reads CLI11 config from JSON: top-level keys are global options, nested
// objects are subcommand sections.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      j = json::parse(input);
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const json& v, const std::string& name) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("config value for '" + name + "' must be a scalar or array");
  }

  static void collect(const json& j, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto sub = parents;
        sub.push_back(key);
        collect(value, sub, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& e : value) item.inputs.push_back(scalar(e, key));
      } else {
        item.inputs.push_back(scalar(value, key));
      }
      items.push_back(std::move(item));
    }
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw irf::ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const std::string& path) {
  std::istringstream in(read_file(path));
  return irf::io::parse_json(in, path);
}

// Output sink: stdout for "-", otherwise a file plus a sidecar
// `<file>.config.json` holding the resolved configuration.
class Output {
 public:
  explicit Output(std::string path) : path_(std::move(path)) {}

  std::ostream& stream() {
    if (path_ == "-") return std::cout;
    if (!file_.is_open()) {
      file_.open(path_, std::ios::binary | std::ios::trunc);
      if (!file_) throw irf::ValidationError("cannot write '" + path_ + "'");
    }
    return file_;
  }

  void finish(const json& resolved) {
    std::cerr << "irf: resolved config " << resolved.dump() << '\n';
    if (path_ == "-") {
      std::cout.flush();
      return;
    }
    file_.close();
    std::ofstream side(path_ + ".config.json", std::ios::binary | std::ios::trunc);
    if (!side) throw irf::ValidationError("cannot write '" + path_ + ".config.json'");
    side << resolved.dump(2) << '\n';
  }

 private:
  std::string path_;
  std::ofstream file_;
};

struct Globals {
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

struct GridOptions {
  std::string file;
  std::optional<double> eps, T;
  std::optional<int> n;
  std::optional<std::string> spacing;

  void add(CLI::App* sub) {
    sub->add_option("--grid", file, "frequency grid JSON file");
    sub->add_option("--eps", eps, "inner frequency cutoff");
    sub->add_option("--T", T, "outer frequency cutoff");
    sub->add_option("--nfreq", n, "frequency nodes per side");
    sub->add_option("--spacing", spacing, "log or linear")->check(CLI::IsMember({"log", "linear"}));
  }

  irf::FrequencyGrid resolve() const {
    json j = file.empty() ? json::object() : read_json_file(file);
    if (!j.is_object()) throw irf::ValidationError("frequency grid file must hold an object");
    if (eps) j["eps"] = *eps;
    if (T) j["T"] = *T;
    if (n) j["n"] = *n;
    if (spacing) j["spacing"] = *spacing;
    return irf::io::grid_from_json(j);
  }
};

json base_config(const std::string& command, const Globals& g) {
  return json{{"command", command}, {"seed", g.seed}, {"jobs", g.jobs}};
}

std::vector<irf::SampledPath> read_paths(const std::string& path) {
  std::istringstream in(read_file(path));
  return irf::io::read_paths_csv(in, path);
}

std::string cell(double v) { return std::isnan(v) ? std::string() : irf::format_double(v); }

// ---- simulate -------------------------------------------------------------

struct SimulateOptions {
  std::string model;
  std::size_t n = 1000;
  double dt = 0.01;
  double t0 = 0.0;
  int reps = 1;
  std::string out = "-";
  GridOptions grid;
};

int run_simulate(const SimulateOptions& o, const Globals& g) {
  if (o.reps < 1) throw irf::ValidationError("--reps must be >= 1");
  const irf::SpectralModel model = irf::io::model_from_json(read_json_file(o.model));
  const irf::TimeGrid tg{o.t0, o.dt, o.n};
  tg.validate();
  const irf::FrequencyGrid fg = o.grid.resolve();
  const std::uint64_t base = irf::seed_base(g.seed);

  std::vector<std::optional<irf::SampledPath>> slots(static_cast<std::size_t>(o.reps));
  irf::parallel_for(slots.size(), g.jobs, [&](std::size_t r) {
    slots[r] = irf::simulate_id_path(model, tg, fg, base + r);
  });
  std::vector<irf::SampledPath> paths;
  for (auto& s : slots) paths.push_back(std::move(*s));

  json cfg = base_config("simulate", g);
  cfg["model"] = irf::io::to_json(model);
  cfg["grid"] = irf::io::to_json(fg);
  cfg["time"] = {{"t0", o.t0}, {"dt", o.dt}, {"n", o.n}};
  cfg["reps"] = o.reps;
  cfg["seed_base"] = base;

  Output out(o.out);
  irf::io::write_paths_csv(out.stream(), paths, true);
  out.finish(cfg);
  return 0;
}

// ---- difference -----------------------------------------------------------

struct DifferenceOptions {
  std::string in;
  int d = 1;
  int lag = 1;
  std::string out = "-";
};

int run_difference(const DifferenceOptions& o, const Globals& g) {
  const auto paths = read_paths(o.in);
  std::vector<irf::SampledPath> diffs;
  for (const auto& p : paths) diffs.push_back(irf::difference(p, o.d, o.lag));

  json cfg = base_config("difference", g);
  cfg["in"] = o.in;
  cfg["d"] = o.d;
  cfg["lag"] = o.lag;

  Output out(o.out);
  irf::io::write_paths_csv(out.stream(), diffs, diffs.size() > 1);
  out.finish(cfg);
  return 0;
}

// ---- structfn -------------------------------------------------------------

struct StructfnOptions {
  std::string in;
  std::string model;
  std::optional<int> d;
  std::optional<double> iota;
  std::optional<double> dt;
  std::vector<int> lags;
  std::string out = "-";
  GridOptions grid;
};

int run_structfn(const StructfnOptions& o, const Globals& g) {
  if (o.lags.empty()) throw irf::ValidationError("--lags needs at least one lag");
  if (o.in.empty() && o.model.empty()) throw irf::ValidationError("need --in paths and/or --model");

  std::optional<irf::SpectralModel> model;
  if (!o.model.empty()) model = irf::io::model_from_json(read_json_file(o.model));
  const int d = o.d ? *o.d : (model ? model->order_d : -1);
  if (d < 1) throw irf::ValidationError("--d must be >= 1 (or taken from --model)");

  std::vector<irf::SampledPath> paths;
  double dt;
  if (!o.in.empty()) {
    paths = read_paths(o.in);
    dt = paths.front().dt();
    if (o.dt && std::abs(*o.dt - dt) > 1e-9 * dt) {
      throw irf::ValidationError("--dt disagrees with the path spacing");
    }
  } else {
    dt = o.dt ? *o.dt : (o.iota ? *o.iota : 1.0);
  }
  if (!(dt > 0)) throw irf::ValidationError("--dt must be positive");
  const double iota = o.iota ? *o.iota : dt;
  const double m_real = iota / dt;
  const int m = static_cast<int>(std::lround(m_real));
  if (m < 1 || std::abs(m_real - m) > 1e-9) {
    throw irf::ValidationError("--iota must be a positive multiple of the grid step");
  }

  std::vector<irf::StructureEstimate> emp;
  if (!paths.empty()) emp = irf::empirical_structure_function(paths, d, m, o.lags);

  json cfg = base_config("structfn", g);
  cfg["d"] = d;
  cfg["iota"] = iota;
  cfg["dt"] = dt;
  cfg["lags"] = o.lags;
  if (!o.in.empty()) cfg["in"] = o.in;
  std::optional<irf::FrequencyGrid> fg;
  if (model) {
    fg = o.grid.resolve();
    irf::SpectralModel mm = *model;
    mm.order_d = d;
    model = mm;
    cfg["model"] = irf::io::to_json(mm);
    cfg["grid"] = irf::io::to_json(*fg);
  }

  Output out(o.out);
  auto& os = out.stream();
  os << "h,empirical,se,theoretical\n";
  for (std::size_t i = 0; i < o.lags.size(); ++i) {
    const double h = o.lags[i] * dt;
    os << irf::format_double(h) << ',';
    if (!emp.empty()) os << cell(emp[i].estimate) << ',' << cell(emp[i].se);
    else os << ',';
    os << ',';
    if (model) os << irf::format_double(irf::theoretical_structure_function(*model, iota, iota, h, *fg));
    os << '\n';
  }
  out.finish(cfg);
  return 0;
}

// ---- krige ----------------------------------------------------------------

struct KrigeOptions {
  std::string problem;
  std::vector<double> at;
  bool check_kkt = false;
  std::string out = "-";
};

int run_krige(const KrigeOptions& o, const Globals& g) {
  if (o.at.empty()) throw irf::ValidationError("--at needs at least one target");
  const irf::KrigingProblem p = irf::io::problem_from_json(read_json_file(o.problem));
  const auto sols = irf::predict_many(p, o.at, g.jobs);

  std::vector<double> kkt_diff;
  if (o.check_kkt) {
    const auto frame = irf::detail::centered_frame(p.obs_t);
    for (std::size_t i = 0; i < o.at.size(); ++i) {
      const auto sys = irf::build_system(p, o.at[i], frame);
      const auto w = irf::solve_kkt(sys, p.nugget);
      const double scale = std::max(1.0, w.eta.cwiseAbs().maxCoeff());
      kkt_diff.push_back((sols[i].weights - w.eta).cwiseAbs().maxCoeff() / scale);
    }
  }

  json cfg = base_config("krige", g);
  cfg["problem"] = irf::io::to_json(p);
  cfg["at"] = o.at;
  cfg["check_kkt"] = o.check_kkt;

  Output out(o.out);
  auto& os = out.stream();
  os << "t0,prediction,kriging_variance" << (o.check_kkt ? ",kkt_rel_diff" : "") << '\n';
  double worst = 0.0;
  for (std::size_t i = 0; i < sols.size(); ++i) {
    os << irf::format_double(o.at[i]) << ',' << irf::format_double(sols[i].prediction) << ','
       << irf::format_double(sols[i].kriging_variance);
    if (o.check_kkt) {
      os << ',' << irf::format_double(kkt_diff[i]);
      worst = std::max(worst, kkt_diff[i]);
    }
    os << '\n';
  }
  out.finish(cfg);
  if (o.check_kkt) {
    std::cerr << "irf: closed form vs KKT max relative difference " << irf::format_double(worst)
              << '\n';
    if (!(worst <= 1e-8)) {
      std::cerr << "irf: closed-form weights disagree with the KKT solve\n";
      return kExitNumerical;
    }
  }
  return 0;
}

// ---- measure --------------------------------------------------------------

struct MeasureOptions {
  std::string file;
  int order = 1;
  double tol = irf::kAnnihilationTol;
  int d = 1;
  double iota = 1.0;
  double t = 0.0;
  std::vector<double> points;
  std::string out = "-";
};

int run_measure_check(const MeasureOptions& o, const Globals& g) {
  const irf::Measure m = irf::io::measure_from_json(read_json_file(o.file));
  const auto rep = irf::is_allowable(m, o.order, o.tol);
  json defects = json::array();
  for (const auto& dd : rep.defects) {
    defects.push_back({{"degree", dd.degree},
                       {"defect", dd.defect},
                       {"scale", dd.scale},
                       {"normalized", dd.normalized}});
  }
  const json report{{"allowable", rep.allowable},
                    {"order", o.order},
                    {"tolerance", o.tol},
                    {"max_allowable_order", irf::max_allowable_order(m, o.tol)},
                    {"defects", defects}};
  json cfg = base_config("measure check", g);
  cfg["measure"] = irf::io::to_json(m);
  cfg["order"] = o.order;
  cfg["tol"] = o.tol;
  Output out(o.out);
  out.stream() << report.dump(2) << '\n';
  out.finish(cfg);
  return 0;
}

int run_measure_fd(const MeasureOptions& o, const Globals& g) {
  const irf::Measure m = irf::finite_difference_measure(o.d, o.iota, o.t);
  json cfg = base_config("measure fd", g);
  cfg["d"] = o.d;
  cfg["iota"] = o.iota;
  cfg["t"] = o.t;
  Output out(o.out);
  out.stream() << irf::io::to_json(m).dump(2) << '\n';
  out.finish(cfg);
  return 0;
}

int run_measure_construct(const MeasureOptions& o, const Globals& g) {
  const irf::Measure m = irf::construct_allowable(o.points, o.order);
  json cfg = base_config("measure construct", g);
  cfg["points"] = o.points;
  cfg["order"] = o.order;
  Output out(o.out);
  out.stream() << irf::io::to_json(m).dump(2) << '\n';
  out.finish(cfg);
  return 0;
}

// ---- verify ---------------------------------------------------------------

struct VerifyOptions {
  std::string model;
  std::string measure;
  std::string bad_measure;
  int reps = 400;
  std::size_t n = 64;
  double dt = 1.0;
  std::vector<double> shifts{0.0, 5.0, 20.0};
  std::vector<double> lags{0.0, 1.0, 2.0};
  std::optional<double> iota;
  int windows = 4;
  std::vector<int> window_lags{0, 1};
  double z = irf::kDefaultZThreshold;
  std::vector<double> trend;
  std::string out = "-";
  GridOptions grid;
};

int run_verify(const VerifyOptions& o, const Globals& g) {
  if (o.reps < 1) throw irf::ValidationError("--reps must be >= 1");
  irf::SpectralModel model;
  model.order_d = 1;
  model.f_y = irf::BrownianDensity{1.0};
  if (!o.model.empty()) model = irf::io::model_from_json(read_json_file(o.model));
  std::optional<irf::PolynomialTrend> model_trend = model.trend;
  model.trend.reset();
  if (model.order_d < 1) throw irf::ValidationError("verify needs a model of order d >= 1");
  const int d = model.order_d;

  irf::HarnessConfig hc;
  hc.grid = {0.0, o.dt, o.n};
  hc.grid.validate();
  hc.fgrid = o.grid.resolve();
  hc.z_threshold = o.z;
  hc.jobs = g.jobs;
  hc.windows = o.windows;
  hc.window_lags = o.window_lags;
  const double iota = o.iota ? *o.iota : o.dt;

  const irf::Measure lambda = o.measure.empty()
                                  ? irf::finite_difference_measure(d, o.dt, d * o.dt)
                                  : irf::io::measure_from_json(read_json_file(o.measure));
  const irf::Measure bad = o.bad_measure.empty()
                               ? irf::Measure({{0.0, 1.0}, {o.dt, 1.0}})
                               : irf::io::measure_from_json(read_json_file(o.bad_measure));
  if (is_allowable(bad, d)) {
    throw irf::ValidationError("the negative-control measure must not be allowable at order " +
                               std::to_string(d));
  }

  const auto shift = irf::shift_invariance_test(model, lambda, o.shifts, o.lags, o.reps, g.seed, hc);
  const auto diffs = irf::differenced_stationarity_test(model, d, iota, o.reps, g.seed, hc);

  irf::PolynomialTrend trend;
  std::string trend_source;
  if (!o.trend.empty()) {
    trend = irf::PolynomialTrend(o.trend);
    trend_source = "flag";
  } else if (model_trend) {
    trend = *model_trend;
    trend_source = "model";
  } else {
    const double a1 = irf::negative_control_slope(model, bad, o.shifts, o.reps, g.seed, hc);
    trend = irf::PolynomialTrend({0.0, a1});
    trend_source = "auto";
  }
  const auto neg = irf::negative_control(model, trend, bad, o.shifts, o.reps, g.seed, hc);

  const bool as_expected = shift.pass && diffs.pass && !neg.pass;
  const std::vector<double> coefs(trend.coefficients().begin(), trend.coefficients().end());
  const json report{
      {"shift_invariance", irf::io::to_json(shift)},
      {"differenced_stationarity", irf::io::to_json(diffs)},
      {"negative_control",
       {{"report", irf::io::to_json(neg)},
        {"expected", "fail"},
        {"failed", !neg.pass},
        {"trend", coefs},
        {"trend_source", trend_source}}},
      {"as_expected", as_expected}};

  json cfg = base_config("verify", g);
  cfg["model"] = irf::io::to_json(model);
  cfg["grid"] = irf::io::to_json(hc.fgrid);
  cfg["time"] = {{"t0", 0.0}, {"dt", o.dt}, {"n", o.n}};
  cfg["measure"] = irf::io::to_json(lambda);
  cfg["bad_measure"] = irf::io::to_json(bad);
  cfg["reps"] = o.reps;
  cfg["shifts"] = o.shifts;
  cfg["lags"] = o.lags;
  cfg["iota"] = iota;
  cfg["windows"] = o.windows;
  cfg["window_lags"] = o.window_lags;
  cfg["z_threshold"] = o.z;
  cfg["trend"] = coefs;

  Output out(o.out);
  out.stream() << report.dump(2) << '\n';
  out.finish(cfg);
  if (!as_expected) {
    std::cerr << "irf: verification outcome differs from expectation\n";
    return kExitMismatch;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intrinsic random functions: simulation, kriging and verification"};
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config file; command-line flags take precedence");

  Globals g;
  app.add_option("--seed", g.seed, "master seed")->capture_default_str();
  app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  SimulateOptions sim;
  auto* s_sim = app.add_subcommand("simulate", "simulate I(d) sample paths to CSV");
  s_sim->add_option("--model", sim.model, "spectral model JSON file")->required();
  s_sim->add_option("--n", sim.n, "points per path")->capture_default_str();
  s_sim->add_option("--dt", sim.dt, "time step")->capture_default_str();
  s_sim->add_option("--t0", sim.t0, "first time")->capture_default_str();
  s_sim->add_option("--reps", sim.reps, "replicates")->capture_default_str();
  s_sim->add_option("--out", sim.out, "output CSV ('-' for stdout)")->capture_default_str();
  sim.grid.add(s_sim);

  DifferenceOptions dif;
  auto* s_dif = app.add_subcommand("difference", "apply the order-d difference to paths");
  s_dif->add_option("--in", dif.in, "input path CSV")->required();
  s_dif->add_option("--d", dif.d, "difference order")->capture_default_str();
  s_dif->add_option("--lag", dif.lag, "lag in grid steps")->capture_default_str();
  s_dif->add_option("--out", dif.out, "output CSV ('-' for stdout)")->capture_default_str();

  StructfnOptions sf;
  auto* s_sf = app.add_subcommand("structfn", "empirical and theoretical structure functions");
  s_sf->add_option("--in", sf.in, "input path CSV");
  s_sf->add_option("--model", sf.model, "spectral model JSON file (theoretical column)");
  s_sf->add_option("--d", sf.d, "difference order (default: model order)");
  s_sf->add_option("--iota", sf.iota, "difference lag (default: grid step)");
  s_sf->add_option("--dt", sf.dt, "grid step for theoretical-only runs");
  s_sf->add_option("--lags", sf.lags, "lags in grid steps")->delimiter(',');
  s_sf->add_option("--out", sf.out, "output CSV ('-' for stdout)")->capture_default_str();
  sf.grid.add(s_sf);

  KrigeOptions kr;
  auto* s_kr = app.add_subcommand("krige", "universal kriging predictions");
  s_kr->add_option("--problem", kr.problem, "kriging problem JSON file")->required();
  s_kr->add_option("--at", kr.at, "prediction locations")->delimiter(',');
  s_kr->add_flag("--check-kkt", kr.check_kkt, "cross-check weights against the KKT solve");
  s_kr->add_option("--out", kr.out, "output CSV ('-' for stdout)")->capture_default_str();

  MeasureOptions ms;
  auto* s_ms = app.add_subcommand("measure", "finite measures: check, fd, construct");
  s_ms->require_subcommand(1);
  auto* s_check = s_ms->add_subcommand("check", "per-degree annihilation defects");
  s_check->add_option("--file", ms.file, "measure JSON file")->required();
  s_check->add_option("--order", ms.order, "order d")->capture_default_str();
  s_check->add_option("--tol", ms.tol, "normalized defect tolerance")->capture_default_str();
  s_check->add_option("--out", ms.out, "output JSON ('-' for stdout)")->capture_default_str();
  auto* s_fd = s_ms->add_subcommand("fd", "finite-difference measure");
  s_fd->add_option("--d", ms.d, "order")->capture_default_str();
  s_fd->add_option("--iota", ms.iota, "lag")->capture_default_str();
  s_fd->add_option("--t", ms.t, "anchor time")->capture_default_str();
  s_fd->add_option("--out", ms.out, "output JSON ('-' for stdout)")->capture_default_str();
  auto* s_con = s_ms->add_subcommand("construct", "allowable measure on given points");
  s_con->add_option("--points", ms.points, "support points")->delimiter(',')->required();
  s_con->add_option("--order", ms.order, "order d")->capture_default_str();
  s_con->add_option("--out", ms.out, "output JSON ('-' for stdout)")->capture_default_str();

  VerifyOptions vf;
  auto* s_vf = app.add_subcommand("verify", "run the shift-invariance verification suite");
  s_vf->add_option("--model", vf.model, "spectral model JSON file (default: brownian, d = 1)");
  s_vf->add_option("--measure", vf.measure, "allowable measure JSON (default: d-th difference)");
  s_vf->add_option("--bad-measure", vf.bad_measure, "non-allowable measure JSON for the control");
  s_vf->add_option("--reps", vf.reps, "replicates")->capture_default_str();
  s_vf->add_option("--n", vf.n, "points per path")->capture_default_str();
  s_vf->add_option("--dt", vf.dt, "time step")->capture_default_str();
  s_vf->add_option("--shifts", vf.shifts, "shifts (grid multiples)")->delimiter(',')->capture_default_str();
  s_vf->add_option("--lags", vf.lags, "covariance lags (grid multiples)")->delimiter(',')->capture_default_str();
  s_vf->add_option("--iota", vf.iota, "difference lag (default: dt)");
  s_vf->add_option("--windows", vf.windows, "windows for differenced stationarity")->capture_default_str();
  s_vf->add_option("--window-lags", vf.window_lags, "window lags in steps")->delimiter(',')->capture_default_str();
  s_vf->add_option("--z", vf.z, "z threshold")->capture_default_str();
  s_vf->add_option("--trend", vf.trend, "negative-control trend coefficients")->delimiter(',');
  s_vf->add_option("--out", vf.out, "output JSON ('-' for stdout)")->capture_default_str();
  vf.grid.add(s_vf);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*s_sim) return run_simulate(sim, g);
    if (*s_dif) return run_difference(dif, g);
    if (*s_sf) return run_structfn(sf, g);
    if (*s_kr) return run_krige(kr, g);
    if (*s_check) return run_measure_check(ms, g);
    if (*s_fd) return run_measure_fd(ms, g);
    if (*s_con) return run_measure_construct(ms, g);
    if (*s_vf) return run_verify(vf, g);
  } catch (const irf::SingularSystemError& e) {
    std::cerr << "irf: singular " << e.block() << " block: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const irf::ValidationError& e) {
    std::cerr << "irf: " << e.what() << '\n';
    return kExitUsage;
  } catch (const irf::NumericalError& e) {
    std::cerr << "irf: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "irf: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
