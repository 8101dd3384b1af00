/*
 Copyright 2026 The stochtumor Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

/**
 * @file config.hpp
 * @brief JSON run configuration: parsing, defaults, model-assumption checks.
 *
 * Field-valued keys (initial.*, controls.*, cost.phi_Q, cost.phi_T) accept
 *   - a number (constant field),
 *   - a string (path of a binary field file, relative to the config file),
 *   - an object with "type" one of constant | cosine | tanh_disc | random | file.
 *
 * Unknown keys are rejected so that typos do not silently fall back to defaults.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stumor/cost.hpp"
#include "stumor/field_io.hpp"
#include "stumor/forward.hpp"
#include "stumor/noise.hpp"
#include "stumor/optimize.hpp"
#include "stumor/potential.hpp"
#include "stumor/rng.hpp"

namespace stumor {

using json = nlohmann::ordered_json;

/// Extra inputs of the verification subcommands.
struct CheckOptions {
  std::vector<double> gateaux_eps{1e-1, 1e-2, 1e-3};
  double fd_eps = 1e-4;
  int fd_directions = 10;
  int duality_forcings = 20;
  std::vector<double> yosida_lambdas{1e-1, 1e-2, 1e-3};
};

struct RunConfig {
  std::vector<int> grid_n{32};
  std::vector<double> grid_len{1.0};
  ModelParams params;
  PotentialSpec potential;
  AdditiveNoiseSpec additive;
  MultiplicativeNoiseSpec multiplicative;
  SolverConfig solver;
  json phi0 = 0.0;
  json sigma0 = 0.5;
  json u = 0.0;
  json w = 0.0;
  double beta[5] = {0.0, 0.0, 0.0, 0.0, 0.0};
  json phi_Q = 0.0;
  json phi_T = 0.0;
  OptimOptions optim;
  int paths = 8;
  std::uint64_t seed = 0;
  int threads = 1;
  int stride = 1;
  std::string out_dir = "out";
  CheckOptions checks;
  /// Directory that relative field-file paths are resolved against.
  std::filesystem::path base_dir = ".";

  Grid grid() const { return Grid::make(grid_n, grid_len); }
};

namespace detail {

inline void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!ok.count(it.key())) throw ConfigError(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
  }
}

inline const json& section(const json& root, const char* name) {
  static const json empty = json::object();
  if (!root.contains(name)) return empty;
  const json& s = root.at(name);
  if (!s.is_object()) throw ConfigError(name, "must be an object");
  return s;
}

inline double get_number(const json& obj, const std::string& path, const char* key, std::optional<double> fallback) {
  if (!obj.contains(key)) {
    if (!fallback) throw ConfigError(path + "." + key, "missing required key");
    return *fallback;
  }
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(path + "." + key, "must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(path + "." + key, "must be finite");
  return d;
}

inline int get_int(const json& obj, const std::string& path, const char* key, std::optional<int> fallback) {
  if (!obj.contains(key)) {
    if (!fallback) throw ConfigError(path + "." + key, "missing required key");
    return *fallback;
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(path + "." + key, "must be an integer");
  return v.get<int>();
}

inline bool get_bool(const json& obj, const std::string& path, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) throw ConfigError(path + "." + key, "must be true or false");
  return obj.at(key).get<bool>();
}

inline std::vector<double> get_number_list(const json& obj, const std::string& path, const char* key,
                                           std::optional<std::vector<double>> fallback) {
  if (!obj.contains(key)) {
    if (!fallback) throw ConfigError(path + "." + key, "missing required key");
    return *fallback;
  }
  const json& v = obj.at(key);
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(path + "." + key, "entries must be numbers");
      out.push_back(e.get<double>());
    }
  } else {
    throw ConfigError(path + "." + key, "must be a number or a list of numbers");
  }
  return out;
}

inline void check_field_spec(const json& v, const std::string& path) {
  if (v.is_number() || v.is_string()) return;
  if (!v.is_object() || !v.contains("type") || !v.at("type").is_string())
    throw ConfigError(path, "field must be a number, a file path or an object with a \"type\"");
  const std::string t = v.at("type").get<std::string>();
  if (t == "constant") {
    reject_unknown(v, path, {"type", "value"});
    get_number(v, path, "value", std::nullopt);
  } else if (t == "cosine") {
    reject_unknown(v, path, {"type", "mean", "amplitude", "modes"});
    get_number(v, path, "mean", 0.0);
    get_number(v, path, "amplitude", std::nullopt);
    get_number_list(v, path, "modes", std::vector<double>{1.0});
  } else if (t == "tanh_disc") {
    reject_unknown(v, path, {"type", "center", "radius", "width", "inside", "outside"});
    get_number_list(v, path, "center", std::vector<double>{0.5, 0.5, 0.5});
    get_number(v, path, "radius", std::nullopt);
    get_number(v, path, "width", std::nullopt);
    get_number(v, path, "inside", 1.0);
    get_number(v, path, "outside", -1.0);
  } else if (t == "random") {
    reject_unknown(v, path, {"type", "mean", "amplitude", "seed"});
    get_number(v, path, "mean", 0.0);
    get_number(v, path, "amplitude", std::nullopt);
    get_int(v, path, "seed", 0);
  } else if (t == "file") {
    reject_unknown(v, path, {"type", "path"});
    if (!v.contains("path") || !v.at("path").is_string()) throw ConfigError(path + ".path", "missing required key");
  } else {
    throw ConfigError(path + ".type", "unknown field type '" + t + "'");
  }
}

}  // namespace detail

/// Builds a field from a field spec (see file comment).
inline ScalarField make_field(const json& v, const Grid& g, const std::string& path,
                              const std::filesystem::path& base_dir = ".") {
  detail::check_field_spec(v, path);
  const auto load = [&](const std::string& file) {
    std::filesystem::path p = file;
    if (p.is_relative()) p = base_dir / p;
    ScalarField f = io::load_field(p);
    if (!(f.grid() == g)) throw ConfigError(path, "field file " + p.string() + " does not match the configured grid");
    return f;
  };
  if (v.is_number()) return ScalarField(g, v.get<double>());
  if (v.is_string()) return load(v.get<std::string>());
  const std::string t = v.at("type").get<std::string>();
  ScalarField f(g);
  if (t == "constant") return ScalarField(g, v.at("value").get<double>());
  if (t == "file") return load(v.at("path").get<std::string>());
  if (t == "cosine") {
    // mean + amplitude * prod_a cos(pi m_a x_a / L_a)
    const double m0 = detail::get_number(v, path, "mean", 0.0);
    const double amp = v.at("amplitude").get<double>();
    const auto modes = detail::get_number_list(v, path, "modes", std::vector<double>{1.0});
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto ijk = g.unflatten(i);
      double prod = 1.0;
      for (int a = 0; a < g.dim; ++a) {
        const double m = a < static_cast<int>(modes.size()) ? modes[a] : 0.0;
        prod *= std::cos(std::numbers::pi * m * g.center(a, ijk[a]) / g.len[a]);
      }
      f[i] = m0 + amp * prod;
    }
    return f;
  }
  if (t == "tanh_disc") {
    // Centre is given in units of the side lengths.
    const auto c = detail::get_number_list(v, path, "center", std::vector<double>{0.5, 0.5, 0.5});
    const double R = v.at("radius").get<double>();
    const double eps = v.at("width").get<double>();
    const double in = detail::get_number(v, path, "inside", 1.0);
    const double out = detail::get_number(v, path, "outside", -1.0);
    if (!(eps > 0.0)) throw ConfigError(path + ".width", "must be > 0");
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto ijk = g.unflatten(i);
      double r2 = 0.0;
      for (int a = 0; a < g.dim; ++a) {
        const double ca = (a < static_cast<int>(c.size()) ? c[a] : 0.5) * g.len[a];
        const double d = g.center(a, ijk[a]) - ca;
        r2 += d * d;
      }
      const double s = 0.5 * (1.0 - std::tanh((std::sqrt(r2) - R) / (std::numbers::sqrt2 * eps)));
      f[i] = out + (in - out) * s;
    }
    return f;
  }
  // random: mean + amplitude * U(-1, 1), counter-based so it is grid-order stable.
  const double m0 = detail::get_number(v, path, "mean", 0.0);
  const double amp = v.at("amplitude").get<double>();
  RngStream rng(static_cast<std::uint64_t>(detail::get_int(v, path, "seed", 0)), 0, 3);
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = m0 + amp * (2.0 * rng.uniform() - 1.0);
  return f;
}

/// Parses and validates a configuration tree.
inline RunConfig parse_config(const json& root, const std::filesystem::path& base_dir = ".") {
  using namespace detail;
  if (!root.is_object()) throw ConfigError("<root>", "configuration must be a JSON object");
  reject_unknown(root, "", {"grid", "params", "potential", "noise", "solver", "initial", "controls", "cost", "optim", "paths",
                            "seed", "threads", "stride", "output", "checks"});
  RunConfig c;
  c.base_dir = base_dir;

  if (!root.contains("grid")) throw ConfigError("grid", "missing required key");
  const json& g = section(root, "grid");
  reject_unknown(g, "grid", {"n", "len"});
  const auto n = get_number_list(g, "grid", "n", std::nullopt);
  const auto len = get_number_list(g, "grid", "len", std::nullopt);
  if (n.size() != len.size() || n.empty() || n.size() > 3) throw ConfigError("grid", "n and len need 1..3 matching entries");
  c.grid_n.clear();
  for (double v : n) {
    if (v != std::floor(v) || v < 4) throw ConfigError("grid.n", "cell counts must be integers >= 4");
    c.grid_n.push_back(static_cast<int>(v));
  }
  c.grid_len = len;
  for (double v : len)
    if (!(v > 0.0)) throw ConfigError("grid.len", "side lengths must be > 0");

  if (!root.contains("params")) throw ConfigError("params", "missing required key");
  const json& p = section(root, "params");
  reject_unknown(p, "params", {"P", "a", "alpha", "b", "c", "A", "B"});
  c.params.P = get_number(p, "params", "P", std::nullopt);
  c.params.a = get_number(p, "params", "a", std::nullopt);
  c.params.alpha = get_number(p, "params", "alpha", std::nullopt);
  c.params.b = get_number(p, "params", "b", std::nullopt);
  c.params.c = get_number(p, "params", "c", std::nullopt);
  c.params.A = get_number(p, "params", "A", std::nullopt);
  c.params.B = get_number(p, "params", "B", std::nullopt);

  const json& pot = section(root, "potential");
  reject_unknown(pot, "potential", {"C1", "C2", "C3", "C4"});
  c.potential.C1 = get_number(pot, "potential", "C1", 1.0);
  c.potential.C2 = get_number(pot, "potential", "C2", 1.0);
  c.potential.C3 = get_number(pot, "potential", "C3", 1.0);
  c.potential.C4 = get_number(pot, "potential", "C4", 6.0);

  const json& nz = section(root, "noise");
  reject_unknown(nz, "noise", {"g0", "s", "n_modes", "c0", "q", "n_modes_h"});
  c.additive.g0 = get_number(nz, "noise", "g0", 0.0);
  c.additive.s = get_number(nz, "noise", "s", 2.0);
  c.additive.n_modes = get_int(nz, "noise", "n_modes", 0);
  c.multiplicative.c0 = get_number(nz, "noise", "c0", 0.0);
  c.multiplicative.q = get_number(nz, "noise", "q", 0.5);
  c.multiplicative.n_modes = get_int(nz, "noise", "n_modes_h", 0);

  if (!root.contains("solver")) throw ConfigError("solver", "missing required key");
  const json& s = section(root, "solver");
  reject_unknown(s, "solver", {"dt", "n_steps", "S", "picard_max", "picard_tol", "yosida_lambda", "clamp_sigma",
                               "validation_bypass", "cg_tol"});
  c.solver.dt = get_number(s, "solver", "dt", std::nullopt);
  c.solver.n_steps = get_int(s, "solver", "n_steps", std::nullopt);
  if (s.contains("S")) c.solver.stabilization = get_number(s, "solver", "S", std::nullopt);
  c.solver.picard_max = get_int(s, "solver", "picard_max", 1);
  c.solver.picard_tol = get_number(s, "solver", "picard_tol", 1e-10);
  if (s.contains("yosida_lambda")) c.solver.yosida_lambda = get_number(s, "solver", "yosida_lambda", std::nullopt);
  c.solver.clamp_sigma = get_bool(s, "solver", "clamp_sigma", false);
  c.solver.validation_bypass = get_bool(s, "solver", "validation_bypass", false);
  c.solver.cg_tol = get_number(s, "solver", "cg_tol", 1e-14);

  const json& init = section(root, "initial");
  reject_unknown(init, "initial", {"phi", "sigma"});
  if (init.contains("phi")) c.phi0 = init.at("phi");
  if (init.contains("sigma")) c.sigma0 = init.at("sigma");
  check_field_spec(c.phi0, "initial.phi");
  check_field_spec(c.sigma0, "initial.sigma");

  const json& ctl = section(root, "controls");
  reject_unknown(ctl, "controls", {"u", "w"});
  if (ctl.contains("u")) c.u = ctl.at("u");
  if (ctl.contains("w")) c.w = ctl.at("w");
  check_field_spec(c.u, "controls.u");
  check_field_spec(c.w, "controls.w");

  const json& cost = section(root, "cost");
  reject_unknown(cost, "cost", {"beta1", "beta2", "beta3", "beta4", "beta5", "phi_Q", "phi_T"});
  const char* names[] = {"beta1", "beta2", "beta3", "beta4", "beta5"};
  for (int i = 0; i < 5; ++i) {
    c.beta[i] = get_number(cost, "cost", names[i], 0.0);
    if (c.beta[i] < 0.0) throw ConfigError(std::string("cost.") + names[i], "must be >= 0");
  }
  if (cost.contains("phi_Q")) c.phi_Q = cost.at("phi_Q");
  if (cost.contains("phi_T")) c.phi_T = cost.at("phi_T");
  check_field_spec(c.phi_Q, "cost.phi_Q");
  check_field_spec(c.phi_T, "cost.phi_T");

  const json& o = section(root, "optim");
  reject_unknown(o, "optim", {"max_iters", "tol_kkt", "ensemble", "armijo"});
  c.optim.max_iters = get_int(o, "optim", "max_iters", 200);
  c.optim.tol_kkt = get_number(o, "optim", "tol_kkt", 1e-6);
  c.paths = get_int(o, "optim", "ensemble", 8);
  if (o.contains("armijo")) {
    const json& a = o.at("armijo");
    if (!a.is_object()) throw ConfigError("optim.armijo", "must be an object");
    reject_unknown(a, "optim.armijo", {"tau0", "shrink", "c1", "tau_min"});
    c.optim.tau0 = get_number(a, "optim.armijo", "tau0", 1.0);
    c.optim.shrink = get_number(a, "optim.armijo", "shrink", 0.5);
    c.optim.sufficient_decrease = get_number(a, "optim.armijo", "c1", 1e-4);
    c.optim.tau_min = get_number(a, "optim.armijo", "tau_min", 1e-12);
  }
  if (c.optim.max_iters < 0) throw ConfigError("optim.max_iters", "must be >= 0");
  if (!(c.optim.tol_kkt > 0.0)) throw ConfigError("optim.tol_kkt", "must be > 0");
  if (!(c.optim.tau0 > 0.0)) throw ConfigError("optim.armijo.tau0", "must be > 0");
  if (!(c.optim.shrink > 0.0 && c.optim.shrink < 1.0)) throw ConfigError("optim.armijo.shrink", "must lie in (0,1)");
  if (!(c.optim.sufficient_decrease > 0.0 && c.optim.sufficient_decrease < 1.0))
    throw ConfigError("optim.armijo.c1", "must lie in (0,1)");

  if (root.contains("paths")) c.paths = get_int(root, "", "paths", 8);
  if (c.paths < 1) throw ConfigError("paths", "must be >= 1");
  if (root.contains("seed")) {
    if (!root.at("seed").is_number_unsigned() && !(root.at("seed").is_number_integer() && root.at("seed").get<long long>() >= 0))
      throw ConfigError("seed", "must be a nonnegative integer");
    c.seed = root.at("seed").get<std::uint64_t>();
  }
  if (root.contains("threads")) c.threads = get_int(root, "", "threads", 1);
  if (c.threads < 1) throw ConfigError("threads", "must be >= 1");
  if (root.contains("stride")) c.stride = get_int(root, "", "stride", 1);
  if (c.stride < 1) throw ConfigError("stride", "must be >= 1");

  const json& out = section(root, "output");
  reject_unknown(out, "output", {"dir"});
  if (out.contains("dir")) {
    if (!out.at("dir").is_string()) throw ConfigError("output.dir", "must be a string");
    c.out_dir = out.at("dir").get<std::string>();
  }

  const json& ch = section(root, "checks");
  reject_unknown(ch, "checks", {"gateaux_eps", "fd_eps", "fd_directions", "duality_forcings", "yosida_lambdas"});
  c.checks.gateaux_eps = get_number_list(ch, "checks", "gateaux_eps", c.checks.gateaux_eps);
  c.checks.fd_eps = get_number(ch, "checks", "fd_eps", c.checks.fd_eps);
  c.checks.fd_directions = get_int(ch, "checks", "fd_directions", c.checks.fd_directions);
  c.checks.duality_forcings = get_int(ch, "checks", "duality_forcings", c.checks.duality_forcings);
  c.checks.yosida_lambdas = get_number_list(ch, "checks", "yosida_lambdas", c.checks.yosida_lambdas);
  return c;
}

/// Fully expanded configuration with every default filled in.
inline json to_json(const RunConfig& c) {
  json j;
  j["grid"] = {{"n", c.grid_n}, {"len", c.grid_len}};
  j["params"] = {{"P", c.params.P}, {"a", c.params.a}, {"alpha", c.params.alpha}, {"b", c.params.b},
                 {"c", c.params.c}, {"A", c.params.A}, {"B", c.params.B}};
  j["potential"] = {{"C1", c.potential.C1}, {"C2", c.potential.C2}, {"C3", c.potential.C3}, {"C4", c.potential.C4}};
  j["noise"] = {{"g0", c.additive.g0},       {"s", c.additive.s}, {"n_modes", c.additive.n_modes},
                {"c0", c.multiplicative.c0}, {"q", c.multiplicative.q}, {"n_modes_h", c.multiplicative.n_modes}};
  json s = {{"dt", c.solver.dt}, {"n_steps", c.solver.n_steps}, {"S", c.solver.S(c.params)},
            {"picard_max", c.solver.picard_max}, {"picard_tol", c.solver.picard_tol}};
  if (c.solver.yosida_lambda) s["yosida_lambda"] = *c.solver.yosida_lambda;
  s["clamp_sigma"] = c.solver.clamp_sigma;
  s["validation_bypass"] = c.solver.validation_bypass;
  s["cg_tol"] = c.solver.cg_tol;
  j["solver"] = s;
  j["initial"] = {{"phi", c.phi0}, {"sigma", c.sigma0}};
  j["controls"] = {{"u", c.u}, {"w", c.w}};
  j["cost"] = {{"beta1", c.beta[0]}, {"beta2", c.beta[1]}, {"beta3", c.beta[2]}, {"beta4", c.beta[3]},
               {"beta5", c.beta[4]}, {"phi_Q", c.phi_Q},  {"phi_T", c.phi_T}};
  j["optim"] = {{"max_iters", c.optim.max_iters},
                {"tol_kkt", c.optim.tol_kkt},
                {"ensemble", c.paths},
                {"armijo",
                 {{"tau0", c.optim.tau0}, {"shrink", c.optim.shrink}, {"c1", c.optim.sufficient_decrease},
                  {"tau_min", c.optim.tau_min}}}};
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["stride"] = c.stride;
  j["output"] = {{"dir", c.out_dir}};
  j["checks"] = {{"gateaux_eps", c.checks.gateaux_eps},
                 {"fd_eps", c.checks.fd_eps},
                 {"fd_directions", c.checks.fd_directions},
                 {"duality_forcings", c.checks.duality_forcings},
                 {"yosida_lambdas", c.checks.yosida_lambdas}};
  return j;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config " + path.string());
  json root;
  try {
    root = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("<syntax>", std::string("malformed JSON in ") + path.string() + ": " + e.what());
  }
  return parse_config(root, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

/// Everything a run needs, built from a RunConfig with the model assumptions checked.
struct Problem {
  Grid grid;
  StateSolver solver;
  ScalarField phi0;
  ScalarField sigma0;
  ControlPair controls;
  CostSpec cost;
};

inline Problem build_problem(const RunConfig& c) {
  const Grid g = [&] {
    try {
      return c.grid();
    } catch (const Error& e) {
      throw ConfigError("grid", e.detail());
    }
  }();
  // Library validation messages start with the assumption tag ("A1: ...").
  const auto retag = [](const Error& e) -> ConfigError {
    const std::string& d = e.detail();
    const auto colon = d.find(':');
    if (d.size() > 1 && d[0] == 'A' && colon != std::string::npos && colon <= 3)
      return ConfigError(d.substr(0, colon), d.substr(colon + 2));
    return ConfigError("solver", d);
  };
  std::optional<StateSolver> solver;
  try {
    solver.emplace(g, c.params, c.potential, c.additive, c.multiplicative, c.solver);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw retag(e);
  }
  ScalarField phi0 = make_field(c.phi0, g, "initial.phi", c.base_dir);
  ScalarField sigma0 = make_field(c.sigma0, g, "initial.sigma", c.base_dir);
  for (double v : phi0.values())
    if (!std::isfinite(v) || !std::isfinite(psi(v))) throw ConfigError("A6", "psi(phi0) must be finite");
  for (double v : sigma0.values())
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("A7", "initial.sigma must lie in [0,1]");
  const ScalarField u = make_field(c.u, g, "controls.u", c.base_dir);
  const ScalarField w = make_field(c.w, g, "controls.w", c.base_dir);
  ControlPair controls;
  controls.u.assign(c.solver.n_steps, u);
  controls.w.assign(c.solver.n_steps, w);
  if (!c.solver.validation_bypass) {
    try {
      validate_box(controls);
    } catch (const Error& e) {
      throw retag(e);
    }
  }
  CostSpec cost;
  cost.beta1 = c.beta[0];
  cost.beta2 = c.beta[1];
  cost.beta3 = c.beta[2];
  cost.beta4 = c.beta[3];
  cost.beta5 = c.beta[4];
  cost.phi_Q = {make_field(c.phi_Q, g, "cost.phi_Q", c.base_dir)};
  cost.phi_T = make_field(c.phi_T, g, "cost.phi_T", c.base_dir);
  return {g, std::move(*solver), std::move(phi0), std::move(sigma0), std::move(controls), std::move(cost)};
}

}  // namespace stumor
