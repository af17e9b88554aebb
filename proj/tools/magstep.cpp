// magstep: command-line front end. Every run is described by a RunConfig (command,
// params, resolution, format) that is echoed into the output header and can be
// replayed with --replay.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "magstep/agmon.hpp"
#include "magstep/criterion.hpp"
#include "magstep/edgeprofile.hpp"
#include "magstep/fiber1d.hpp"
#include "magstep/reduced2d.hpp"
#include "magstep/sweep.hpp"
#include "magstep/zeta.hpp"

using namespace magstep;
using json = nlohmann::ordered_json;

namespace {

constexpr int kSchemaVersion = 1;

enum class Kind { Number, Integer, Grid, Text, Flag };

struct ParamSpec {
  std::string name;
  Kind kind;
  std::string fallback;  // empty: optional without default
  std::string help;
};

const std::string kHalfPi = "1.5707963267948966";

const std::map<std::string, std::vector<ParamSpec>>& command_table() {
  static const std::map<std::string, std::vector<ParamSpec>> table{
      {"degennes", {}},
      {"mu",
       {{"a", Kind::Number, "", "field ratio a (omit with --neumann)"},
        {"xi", Kind::Grid, "-2:4:61", "momentum grid lo:hi:n"},
        {"neumann", Kind::Flag, "", "Neumann half-line band function instead"}}},
      {"beta", {{"a", Kind::Grid, "", "field ratio (grid lo:hi:n or a value)"}}},
      {"zeta", {{"nu", Kind::Grid, "", "tilt angles, ascending (grid or value)"}}},
      {"band",
       {{"alpha", Kind::Number, kHalfPi, "angle of the discontinuity line"},
        {"gamma", Kind::Number, "0", "field tilt"},
        {"a", Kind::Number, "-1", "field ratio"},
        {"tau-min", Kind::Number, "", "left end of the tau window"},
        {"tau-max", Kind::Number, "", "right end of the tau window"},
        {"samples", Kind::Integer, "13", "band samples"}}},
      {"lambda",
       {{"alpha", Kind::Number, kHalfPi, "angle of the discontinuity line"},
        {"gamma", Kind::Number, "0", "field tilt"},
        {"a", Kind::Number, "-1", "field ratio"},
        {"samples", Kind::Integer, "13", "band samples"}}},
      {"essential",
       {{"alpha", Kind::Number, kHalfPi, "angle of the discontinuity line"},
        {"gamma", Kind::Number, "0", "field tilt"},
        {"a", Kind::Number, "-1", "field ratio"},
        {"tau", Kind::Grid, "-2:2:9", "tau grid"}}},
      {"region",
       {{"variant", Kind::Text, "theta0-low", "exact | theta0-low"},
        {"alpha", Kind::Grid, "", "alpha grid"},
        {"gamma", Kind::Grid, "", "gamma grid"},
        {"a", Kind::Grid, "", "a grid"}}},
      {"trial-check",
       {{"alpha", Kind::Number, kHalfPi, "angle of the discontinuity line"},
        {"gamma", Kind::Number, "0", "field tilt"},
        {"a", Kind::Number, "-1", "field ratio"},
        {"omega", Kind::Grid, "0.5:4:8", "Gaussian rates"},
        {"variant", Kind::Text, "theta0-low", "exact | theta0-low"}}},
      {"agmon",
       {{"alpha", Kind::Number, kHalfPi, "angle of the discontinuity line"},
        {"gamma", Kind::Number, "0", "field tilt"},
        {"a", Kind::Number, "-1", "field ratio"},
        {"tau", Kind::Number, "0", "Fourier parameter"},
        {"eta-fraction", Kind::Number, "0.5", "eta as a fraction of sqrt(sigma_ess - sigma)"}}},
      {"edge-profile",
       {{"geometry", Kind::Text, "", "CSV or JSON file with s,alpha,gamma"},
        {"ball-cut", Kind::Integer, "", "use the ball-cut geometry with this many samples"},
        {"a", Kind::Number, "-1", "field ratio"},
        {"b", Kind::Number, "", "field strength for the leading-order energy"},
        {"samples", Kind::Integer, "13", "band samples per edge point"}}},
  };
  return table;
}

const std::map<std::string, std::string> kAbout{
    {"degennes", "de Gennes constant with Richardson estimate"},
    {"mu", "1D band function mu_a(xi) (or the Neumann one)"},
    {"beta", "infimum beta_a of the 1D band function"},
    {"zeta", "ground energy of the tilted-field half-space"},
    {"band", "band function tau -> sigma(alpha, gamma, a, tau) and its verdict"},
    {"lambda", "lambda(alpha, gamma, a) with verdict, one row"},
    {"essential", "essential threshold sigma_ess over tau"},
    {"region", "admissibility of the trial-state criterion on a grid"},
    {"trial-check", "optimal trial energy against P(1/omega)"},
    {"agmon", "shell masses and decay fit of the localized eigenfunction"},
    {"edge-profile", "lambda along an edge, localization set and leading energy"},
};

// ---- parameters -------------------------------------------------------------

json typed_value(const ParamSpec& spec, const std::string& raw) {
  try {
    std::size_t used = 0;
    switch (spec.kind) {
      case Kind::Number: {
        double v = std::stod(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
        return v;
      }
      case Kind::Integer: {
        long v = std::stol(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
        return v;
      }
      case Kind::Grid:
        AxisGrid::parse(raw);
        return raw;
      case Kind::Text:
        return raw;
      case Kind::Flag:
        return raw == "true" || raw == "1";
    }
  } catch (const std::logic_error&) {
    throw RangeError("--" + spec.name + ": cannot parse '" + raw + "'");
  }
  return nullptr;
}

struct Params {
  const json& j;

  bool has(const std::string& k) const { return j.contains(k) && !j[k].is_null(); }
  double num(const std::string& k) const {
    if (!has(k)) throw RangeError("missing parameter --" + k);
    return j[k].get<double>();
  }
  long integer(const std::string& k) const {
    if (!has(k)) throw RangeError("missing parameter --" + k);
    return j[k].get<long>();
  }
  std::string text(const std::string& k) const {
    if (!has(k)) throw RangeError("missing parameter --" + k);
    return j[k].get<std::string>();
  }
  std::vector<double> grid(const std::string& k) const { return AxisGrid::parse(text(k)).values(); }
  bool flag(const std::string& k) const { return has(k) && j[k].get<bool>(); }
  StepFieldParams triple() const {
    StepFieldParams p{num("alpha"), num("gamma"), num("a")};
    p.validate();
    return p;
  }
};

// ---- run configuration ------------------------------------------------------

struct RunConfig {
  std::string command;
  json params = json::object();
  Resolution res;
  std::string format = "csv";

  json to_json() const {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["version"] = MAGSTEP_VERSION;
    j["command"] = command;
    j["params"] = params;
    j["resolution"] = {{"h1d", res.h1d}, {"h2d", res.h2d},           {"h_zeta", res.h_zeta},
                       {"tol", res.tol}, {"max_iter", res.max_iter}, {"seed", res.seed}};
    j["format"] = format;
    return j;
  }

  static RunConfig from_json(const json& j) {
    RunConfig c;
    try {
      if (j.value("schema_version", 0) != kSchemaVersion) throw RangeError("unsupported config schema_version");
      c.command = j.at("command").get<std::string>();
      if (!command_table().count(c.command)) throw RangeError("unknown command '" + c.command + "'");
      c.params = j.value("params", json::object());
      if (j.contains("resolution")) {
        const auto& r = j["resolution"];
        c.res.h1d = r.value("h1d", c.res.h1d);
        c.res.h2d = r.value("h2d", c.res.h2d);
        c.res.h_zeta = r.value("h_zeta", c.res.h_zeta);
        c.res.tol = r.value("tol", c.res.tol);
        c.res.max_iter = r.value("max_iter", c.res.max_iter);
        c.res.seed = r.value("seed", c.res.seed);
      }
      c.format = j.value("format", std::string("csv"));
    } catch (const json::exception& e) {
      throw RangeError(std::string("invalid run configuration: ") + e.what());
    }
    return c;
  }

  void validate() const {
    if (format != "csv" && format != "json") throw RangeError("format must be csv or json");
    if (!(res.h1d > 0 && res.h2d > 0 && res.h_zeta > 0)) throw RangeError("mesh spacings must be positive");
    if (res.h1d > 0.05 || res.h2d > 0.5 || res.h_zeta > 0.5) throw RangeError("mesh spacing too coarse");
    if (!(res.tol > 0 && res.tol < 1e-3)) throw RangeError("solver tolerance must lie in (0, 1e-3)");
    if (res.max_iter < 1) throw RangeError("max-iter must be positive");
    for (const auto& s : command_table().at(command)) {
      if (!params.contains(s.name)) continue;
      const auto& v = params[s.name];
      bool ok = (s.kind == Kind::Number && v.is_number()) || (s.kind == Kind::Integer && v.is_number_integer()) ||
                ((s.kind == Kind::Grid || s.kind == Kind::Text) && v.is_string()) ||
                (s.kind == Kind::Flag && v.is_boolean()) || v.is_null();
      if (!ok) throw RangeError("parameter '" + s.name + "' has the wrong type");
      if (s.kind == Kind::Grid && v.is_string()) AxisGrid::parse(v.get<std::string>());
    }
    for (const auto& [k, v] : params.items()) {
      bool known = false;
      for (const auto& s : command_table().at(command)) known = known || s.name == k;
      if (!known) throw RangeError("unknown parameter '" + k + "' for " + command);
    }
  }
};

// ---- results ----------------------------------------------------------------

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
  json summary = json::object();
};

std::string csv_cell(const json& v) {
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v.get<double>());
  return buf;
}

// nlohmann writes non-finite doubles as null; keep them readable
json finite_or_text(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

Table run_degennes(const Params&, const Resolution& res) {
  auto t = theta0(res);
  Table out;
  out.columns = {"theta0", "xi_min", "theta0_coarse", "theta0_extrapolated", "mesh_error"};
  out.rows.push_back({t.value, t.xi_min, t.coarse_value, t.extrapolated, t.mesh_error});
  return out;
}

Table run_mu(const Params& p, const Resolution& res, int threads) {
  auto xis = p.grid("xi");
  Table out;
  out.columns = {"xi", "mu"};
  if (p.flag("neumann")) {
    auto vals = parallel_map(xis.size(), [&](std::size_t i) { return mu_neumann(xis[i], res); }, threads);
    for (std::size_t i = 0; i < xis.size(); ++i) out.rows.push_back({xis[i], vals[i]});
    out.summary["band"] = "neumann";
    return out;
  }
  double a = p.num("a");
  FiberParams{a, 0.0}.validate(true);
  auto curve = mu_curve(a, xis, res, threads);
  for (auto [x, m] : curve.samples) out.rows.push_back({x, m});
  out.summary["a"] = a;
  if (curve.minimizer) out.summary["minimizer"] = {{"xi", curve.minimizer->first}, {"mu", curve.minimizer->second}};
  return out;
}

Table run_beta(const Params& p, const Resolution& res, int threads) {
  auto as = p.grid("a");
  for (double a : as) FiberParams{a, 0.0}.validate();
  auto rs = parallel_map(as.size(), [&](std::size_t i) { return beta(as[i], res); }, threads);
  Table out;
  out.columns = {"a", "beta", "xi_star", "scan_min", "scan_min_xi", "certified"};
  for (std::size_t i = 0; i < as.size(); ++i) {
    const auto& r = rs[i];
    out.rows.push_back({as[i], r.value, r.xi_star ? json(*r.xi_star) : json(nullptr), r.scan_min, r.scan_min_xi,
                        r.certified});
  }
  return out;
}

Table run_zeta(const Params& p, const Resolution& res, int threads) {
  auto nus = p.grid("nu");
  auto prof = zeta_profile(nus, res, threads);
  Table out;
  out.columns = {"nu", "zeta", "mesh_error", "truncation_change", "box_height"};
  for (auto [nu, z] : prof) {
    auto r = zeta_result(nu, res);
    out.rows.push_back({nu, z, r.mesh_error, finite_or_text(r.truncation_change), r.box_height});
  }
  return out;
}

json band_summary(const BandProfile& bp) {
  json s;
  s["alpha"] = bp.params.alpha;
  s["gamma"] = bp.params.gamma;
  s["a"] = bp.params.a;
  s["lambda"] = bp.lambda;
  s["margin"] = bp.margin;
  s["verdict"] = to_string(bp.verdict);
  s["tau_star"] = bp.tau_star ? json(*bp.tau_star) : json(nullptr);
  s["beta"] = bp.beta;
  s["zeta_nu0"] = bp.zeta_nu0;
  s["threshold"] = bp.threshold;
  s["limit_left"] = finite_or_text(bp.limit_left);
  s["limit_right"] = finite_or_text(bp.limit_right);
  return s;
}

Table run_band(const Params& p, const Resolution& res, int threads) {
  auto tp = p.triple();
  std::optional<std::pair<double, double>> window;
  if (p.has("tau-min") || p.has("tau-max")) {
    auto d = default_tau_window(tp);
    window = std::make_pair(p.has("tau-min") ? p.num("tau-min") : d.first, p.has("tau-max") ? p.num("tau-max") : d.second);
  }
  auto bp = band_profile(tp, window, static_cast<int>(p.integer("samples")), res, threads);
  Table out;
  out.columns = {"tau", "sigma", "sigma_ess", "margin", "wall_mass", "below_essential"};
  for (const auto& s : bp.samples)
    out.rows.push_back({s.tau, s.result.sigma, s.result.sigma_ess, s.result.margin(), s.result.wall_mass,
                        s.result.below_essential});
  out.summary = band_summary(bp);
  return out;
}

Table run_lambda(const Params& p, const Resolution& res, int threads) {
  auto tp = p.triple();
  auto bp = band_profile(tp, std::nullopt, static_cast<int>(p.integer("samples")), res, threads);
  Table out;
  out.columns = {"alpha", "gamma", "a", "lambda", "margin", "verdict", "tau_star", "threshold"};
  out.rows.push_back({tp.alpha, tp.gamma, tp.a, bp.lambda, bp.margin, to_string(bp.verdict),
                      bp.tau_star ? json(*bp.tau_star) : json(nullptr), bp.threshold});
  return out;
}

Table run_essential(const Params& p, const Resolution& res, int threads) {
  auto tp = p.triple();
  auto taus = p.grid("tau");
  auto vals = parallel_map(taus.size(), [&](std::size_t i) { return sigma_ess(tp, taus[i], res); }, threads);
  double b = beta(tp.a, res).value;
  Table out;
  out.columns = {"tau", "sigma_ess"};
  for (std::size_t i = 0; i < taus.size(); ++i) out.rows.push_back({taus[i], vals[i]});
  out.summary["beta"] = b;
  return out;
}

Table run_region(const Params& p, const Resolution& res, int threads) {
  auto variant = parse_variant(p.text("variant"));
  auto cells = region_scan(AxisGrid::parse(p.text("alpha")), AxisGrid::parse(p.text("gamma")),
                           AxisGrid::parse(p.text("a")), variant, res, threads);
  Table out;
  out.columns = {"alpha", "gamma", "a", "A", "Lambda", "x_min", "P_min", "admissible"};
  long admissible = 0;
  for (const auto& c : cells) {
    out.rows.push_back({c.alpha, c.gamma, c.a, c.report.A, c.report.Lambda, c.report.x_min,
                        finite_or_text(c.report.P_min), c.report.admissible});
    admissible += c.report.admissible;
  }
  out.summary["variant"] = to_string(variant);
  out.summary["cells"] = cells.size();
  out.summary["admissible"] = admissible;
  return out;
}

Table run_trial(const Params& p, const Resolution& res, int) {
  auto tp = p.triple();
  auto variant = parse_variant(p.text("variant"));
  double Lambda = lambda_bound(tp, variant, res);
  double A = coefficient_A(tp);
  Table out;
  out.columns = {"omega", "c1", "c2", "c3", "c4", "J", "P", "difference"};
  for (double w : p.grid("omega")) {
    auto t = optimal_trial(tp, w);
    double J = trial_energy(tp, t, Lambda), P = polynomial_P(A, Lambda, 1 / w);
    out.rows.push_back({w, t.c1, t.c2, t.c3, t.c4, J, P, J - P});
  }
  out.summary["A"] = A;
  out.summary["Lambda"] = Lambda;
  out.summary["variant"] = to_string(variant);
  return out;
}

Table run_agmon(const Params& p, const Resolution& res, int) {
  auto tp = p.triple();
  double frac = p.num("eta-fraction");
  if (!(frac >= 0 && frac < 1)) throw RangeError("eta-fraction must lie in [0, 1)");
  auto st = eigenfunction(tp, p.num("tau"), res);
  double bound = std::sqrt(st.sigma_ess - st.sigma);
  auto r = decay_report(st, frac * bound);
  Table out;
  out.columns = {"radius", "shell_mass"};
  for (auto [rad, m] : r.radii) out.rows.push_back({rad, m});
  out.summary["sigma"] = st.sigma;
  out.summary["sigma_ess"] = st.sigma_ess;
  out.summary["eta"] = r.eta;
  out.summary["eta_bound"] = r.eta_bound;
  out.summary["eta_fit"] = r.eta_fit;
  out.summary["r_squared"] = r.r_squared;
  out.summary["fit_window"] = {r.fit_r_lo, r.fit_r_hi};
  out.summary["weighted_energy"] = r.weighted_energy;
  out.summary["wall_mass"] = st.wall_mass;
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RangeError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Table run_edge(const Params& p, const Resolution& res, int threads) {
  EdgeGeometry g;
  if (p.has("ball-cut") == p.has("geometry")) throw RangeError("give exactly one of --geometry and --ball-cut");
  if (p.has("ball-cut")) {
    g = EdgeGeometry::ball_cut(static_cast<int>(p.integer("ball-cut")));
  } else {
    std::string path = p.text("geometry");
    std::string text = slurp(path);
    bool is_json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
    g = is_json ? EdgeGeometry::from_json(text) : EdgeGeometry::from_csv(text);
  }
  auto rep = profile(g, p.num("a"), res, threads, static_cast<int>(p.integer("samples")));
  Table out;
  out.columns = {"s", "alpha", "gamma", "lambda", "margin", "verdict", "in_D"};
  for (const auto& e : rep.lambda_profile)
    out.rows.push_back({e.sample.s, e.sample.alpha, e.sample.gamma, e.lambda, e.margin, to_string(e.verdict), e.in_D});
  out.summary["a"] = rep.a;
  out.summary["threshold"] = rep.threshold;
  out.summary["lambda_min"] = rep.lambda_min;
  out.summary["s_min"] = rep.s_min;
  out.summary["assumption_holds"] = rep.assumption_holds;
  out.summary["D_set"] = json::array();
  for (auto [lo, hi] : rep.D_set) out.summary["D_set"].push_back({lo, hi});
  if (p.has("b")) {
    if (rep.assumption_holds)
      out.summary["leading_energy"] = ground_energy_prediction(rep, p.num("b"));
    else
      out.summary["leading_energy"] = nullptr;
  }
  return out;
}

Table dispatch(const RunConfig& c, int threads) {
  Params p{c.params};
  if (c.command == "degennes") return run_degennes(p, c.res);
  if (c.command == "mu") return run_mu(p, c.res, threads);
  if (c.command == "beta") return run_beta(p, c.res, threads);
  if (c.command == "zeta") return run_zeta(p, c.res, threads);
  if (c.command == "band") return run_band(p, c.res, threads);
  if (c.command == "lambda") return run_lambda(p, c.res, threads);
  if (c.command == "essential") return run_essential(p, c.res, threads);
  if (c.command == "region") return run_region(p, c.res, threads);
  if (c.command == "trial-check") return run_trial(p, c.res, threads);
  if (c.command == "agmon") return run_agmon(p, c.res, threads);
  if (c.command == "edge-profile") return run_edge(p, c.res, threads);
  throw RangeError("unknown command '" + c.command + "'");
}

std::string render(const RunConfig& c, const Table& t, std::optional<double> wall_time) {
  if (c.format == "json") {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["config"] = c.to_json();
    if (wall_time) j["wall_time_s"] = *wall_time;
    j["summary"] = t.summary;
    j["columns"] = t.columns;
    j["rows"] = json::array();
    for (const auto& r : t.rows) j["rows"].push_back(r);
    return j.dump(2) + "\n";
  }
  std::string out = "# config: " + c.to_json().dump() + "\n";
  if (wall_time) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "# wall_time_s: %.3f\n", *wall_time);
    out += buf;
  }
  if (!t.summary.empty()) out += "# summary: " + t.summary.dump() + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + csv_cell(r[i]);
    out += "\n";
  }
  return out;
}

// Config embedded in a previous output (CSV header line or JSON "config"), or a bare config file.
RunConfig load_config(const std::string& path) {
  std::string text = slurp(path);
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw RangeError(path + ": " + e.what());
    }
    return RunConfig::from_json(j.contains("config") ? j["config"] : j);
  }
  std::istringstream in(text);
  std::string line;
  const std::string tag = "# config: ";
  while (std::getline(in, line)) {
    if (line.rfind(tag, 0) == 0) {
      try {
        return RunConfig::from_json(json::parse(line.substr(tag.size())));
      } catch (const json::exception& e) {
        throw RangeError(path + ": " + e.what());
      }
    }
  }
  throw RangeError(path + " has no '# config:' header");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral toolkit for magnetic step fields on half-spaces"};
  app.set_version_flag("--version", std::string(MAGSTEP_VERSION));
  app.require_subcommand(0, 1);
  app.fallthrough();

  Resolution res;
  std::string output, format = "csv", replay, config_file;
  int threads = 0;
  bool timing = false;
  app.add_option("--h1d", res.h1d, "1D mesh spacing")->capture_default_str();
  app.add_option("--h2d", res.h2d, "reduced 2D mesh spacing")->capture_default_str();
  app.add_option("--h-zeta", res.h_zeta, "tilted half-plane mesh spacing")->capture_default_str();
  app.add_option("--tol", res.tol, "eigensolver residual tolerance")->capture_default_str();
  app.add_option("--max-iter", res.max_iter, "eigensolver iteration cap")->capture_default_str();
  app.add_option("--seed", res.seed, "eigensolver start-vector seed")->capture_default_str();
  app.add_option("--threads", threads, "worker threads (default: MAGSTEP_THREADS or all cores)");
  app.add_option("-o,--output", output, "output file (default stdout)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_flag("--timing", timing, "put the wall time into the output header (breaks byte-identical reruns)");
  app.add_option("--replay", replay, "rerun the configuration recorded in a previous output file");
  app.add_option("--config", config_file, "run a JSON configuration file");

  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, specs] : command_table()) {
    auto* sub = app.add_subcommand(name, kAbout.at(name));
    subs[name] = sub;
    for (const auto& s : specs) {
      std::string flag = "--" + s.name;
      if (s.kind == Kind::Flag) {
        sub->add_flag_callback(flag, [&raw, name = name, key = s.name] { raw[name][key] = "true"; }, s.help);
      } else {
        auto* opt = sub->add_option(flag, raw[name][s.name], s.help);
        if (!s.fallback.empty()) opt->default_str(s.fallback);
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    RunConfig cfg;
    if (!replay.empty() || !config_file.empty()) {
      if (!replay.empty() && !config_file.empty()) throw RangeError("--replay and --config are exclusive");
      cfg = load_config(replay.empty() ? config_file : replay);
    } else {
      auto chosen = app.get_subcommands();
      if (chosen.empty()) {
        std::cerr << app.help();
        return 1;
      }
      cfg.command = chosen.front()->get_name();
      cfg.res = res;
      cfg.format = format;
      for (const auto& s : command_table().at(cfg.command)) {
        const std::string& v = raw[cfg.command][s.name];
        if (!v.empty())
          cfg.params[s.name] = typed_value(s, v);
        else if (!s.fallback.empty())
          cfg.params[s.name] = typed_value(s, s.fallback);
        else if (s.kind == Kind::Flag)
          cfg.params[s.name] = false;
      }
    }
    cfg.validate();
    if (threads < 0) throw RangeError("--threads must be positive");
    if (threads > 0) set_default_threads(threads);

    auto t0 = std::chrono::steady_clock::now();
    Table t = dispatch(cfg, threads);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string text = render(cfg, t, timing ? std::optional<double>(wall) : std::nullopt);
    if (output.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(output, std::ios::binary);
      if (!out) throw RangeError("cannot write " + output);
      out << text;
    }
    std::fprintf(stderr, "magstep %s: %s done in %.3f s\n", MAGSTEP_VERSION, cfg.command.c_str(), wall);
    return 0;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}
