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
 * @file cli.hpp
 * @brief Command-line front end.
 *
 * Every subcommand writes into one output directory:
 *
 *   fields/          binary field snapshots
 *   *.csv            tables (numbers printed with %.17g)
 *   report.txt       human-readable summary
 *   meta.json        command line, timestamp and wall time
 *
 * Only meta.json depends on when and how fast the run happened; every other
 * file is a pure function of (config, seed) and independent of --threads.
 */

#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stumor/adjoint.hpp"
#include "stumor/config.hpp"
#include "stumor/cost.hpp"
#include "stumor/field_io.hpp"
#include "stumor/forward.hpp"
#include "stumor/optimize.hpp"
#include "stumor/parallel.hpp"
#include "stumor/sensitivity.hpp"

namespace stumor {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitSolver = 3, kExitIo = 4 };

inline int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::ConfigInvalid: return kExitConfig;
    case ErrorKind::IoError: return kExitIo;
    default: return kExitSolver;
  }
}

struct CliOptions {
  std::string command;
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<int> stride;
  std::optional<int> paths;
  std::vector<double> lambdas;
};

namespace cli_detail {

/// Small CSV builder; rows are appended in call order.
class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      if (!first) text_ += ',';
      text_ += h;
      first = false;
    }
    text_ += '\n';
  }

  template <class... Ts>
  void row(const Ts&... vs) {
    bool first = true;
    ((append(vs, first)), ...);
    text_ += '\n';
  }

  const std::string& str() const { return text_; }

 private:
  void append(double v, bool& first) { sep(first), text_ += io::format_double(v); }
  void append(int v, bool& first) { sep(first), text_ += std::to_string(v); }
  void append(long v, bool& first) { sep(first), text_ += std::to_string(v); }
  void append(std::size_t v, bool& first) { sep(first), text_ += std::to_string(v); }
  void sep(bool& first) {
    if (!first) text_ += ',';
    first = false;
  }
  std::string text_;
};

inline std::string step_name(const char* stem, int n) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%06d.bin", stem, n);
  return buf;
}

inline std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline ControlPair random_direction(const Grid& g, int n_steps, std::uint64_t seed, std::uint32_t index) {
  RngStream rng(seed, index, 10);
  ControlPair d = ControlPair::constant(g, n_steps, 0.0, 0.0);
  for (auto& f : d.u)
    for (double& v : f.values()) v = 2.0 * rng.uniform() - 1.0;
  for (auto& f : d.w)
    for (double& v : f.values()) v = 2.0 * rng.uniform() - 1.0;
  return d;
}

inline std::vector<ScalarField> random_forcing(const Grid& g, int n_steps, std::uint64_t seed, std::uint32_t index,
                                               std::uint32_t stream) {
  RngStream rng(seed, index, stream);
  std::vector<ScalarField> out(n_steps, ScalarField(g));
  for (auto& f : out)
    for (double& v : f.values()) v = rng.normal();
  return out;
}

struct Context {
  RunConfig cfg;
  Problem prob;
  std::filesystem::path out;
  std::ostream& log;
};

inline std::string format_line(const std::string& key, double v) { return key + " " + io::format_double(v) + "\n"; }

inline void write_diagnostics(const std::filesystem::path& path, const Trajectory& tr) {
  Csv csv({"n", "t", "energy", "mass", "mean_sigma", "min_sigma", "max_sigma", "clamped_mass", "mass_residual",
           "picard_sweeps"});
  for (std::size_t n = 0; n < tr.diagnostics.size(); ++n) {
    const auto& d = tr.diagnostics[n];
    csv.row(n, d.t, d.energy, d.mass, d.mean_sigma, d.min_sigma, d.max_sigma, d.clamped_mass, d.mass_residual,
            d.picard_sweeps);
  }
  io::write_bytes(path, csv.str());
}

inline int cmd_simulate(Context& ctx) {
  const auto& p = ctx.prob;
  const NoisePath noise = NoisePath::generate(p.solver.additive_noise(), p.solver.multiplicative_noise(), p.solver.basis(),
                                              p.solver.dt(), ctx.cfg.solver.n_steps, ctx.cfg.seed, 0);
  const Trajectory tr = p.solver.simulate(p.phi0, p.sigma0, p.controls, noise);
  const auto fields = ctx.out / "fields";
  std::filesystem::create_directories(fields);
  const int N = tr.n_steps();
  for (int n = 0; n <= N; ++n) {
    if (n % ctx.cfg.stride != 0 && n != N) continue;
    io::save_field(fields / step_name("phi", n), tr.states[n].phi);
    io::save_field(fields / step_name("mu", n), tr.states[n].mu);
    io::save_field(fields / step_name("sigma", n), tr.states[n].sigma);
  }
  io::save_noise_path(ctx.out / "noise", noise);
  write_diagnostics(ctx.out / "diagnostics.csv", tr);
  const CostBreakdown cb = cost_breakdown(tr, p.controls, p.cost);
  double worst_mass = 0.0, min_s = tr.diagnostics[0].min_sigma, max_s = tr.diagnostics[0].max_sigma;
  for (const auto& d : tr.diagnostics) {
    worst_mass = std::max(worst_mass, std::abs(d.mass_residual));
    min_s = std::min(min_s, d.min_sigma);
    max_s = std::max(max_s, d.max_sigma);
  }
  std::string rep = "simulate\n";
  rep += "steps " + std::to_string(N) + "\n";
  rep += format_line("final_time", N * tr.dt);
  rep += format_line("cost", cb.total());
  rep += format_line("cost_tracking", cb.tracking);
  rep += format_line("cost_terminal", cb.terminal);
  rep += format_line("cost_size", cb.size);
  rep += format_line("cost_control_u", cb.control_u);
  rep += format_line("cost_control_w", cb.control_w);
  rep += format_line("final_mass", tr.diagnostics.back().mass);
  rep += format_line("final_energy", tr.diagnostics.back().energy);
  rep += format_line("min_sigma", min_s);
  rep += format_line("max_sigma", max_s);
  rep += format_line("max_abs_mass_residual", worst_mass);
  io::write_bytes(ctx.out / "report.txt", rep);
  ctx.log << rep;
  return kExitOk;
}

inline int cmd_ensemble(Context& ctx) {
  const auto& p = ctx.prob;
  const int M = ctx.cfg.paths;
  const auto ensemble = make_ensemble(p.solver, ctx.cfg.seed, M);
  std::vector<std::vector<StepDiagnostics>> diags(M);
  std::vector<CostBreakdown> costs(M);
  parallel_for(M, ctx.cfg.threads, [&](std::size_t m) {
    Trajectory tr;
    try {
      tr = p.solver.simulate(p.phi0, p.sigma0, p.controls, ensemble[m]);
    } catch (const SolverError& e) {
      throw SolverError(e.kind(), e.detail(), e.step(), static_cast<long>(m));
    }
    costs[m] = cost_breakdown(tr, p.controls, p.cost);
    diags[m] = std::move(tr.diagnostics);
  });
  Csv pc({"path", "cost", "tracking", "terminal", "size", "control_u", "control_w"});
  std::vector<double> totals;
  for (int m = 0; m < M; ++m) {
    const auto& c = costs[m];
    pc.row(m, c.total(), c.tracking, c.terminal, c.size, c.control_u, c.control_w);
    totals.push_back(c.total());
  }
  io::write_bytes(ctx.out / "costs.csv", pc.str());
  Csv dc({"n", "t", "mean_energy", "mean_mass", "mean_sigma", "min_sigma", "max_sigma", "mean_clamped_mass",
          "max_abs_mass_residual"});
  const std::size_t rows = diags[0].size();
  for (std::size_t n = 0; n < rows; ++n) {
    double e = 0.0, mass = 0.0, ms = 0.0, cl = 0.0, mr = 0.0;
    double lo = diags[0][n].min_sigma, hi = diags[0][n].max_sigma;
    for (int m = 0; m < M; ++m) {
      const auto& d = diags[m][n];
      e += d.energy;
      mass += d.mass;
      ms += d.mean_sigma;
      cl += d.clamped_mass;
      mr = std::max(mr, std::abs(d.mass_residual));
      lo = std::min(lo, d.min_sigma);
      hi = std::max(hi, d.max_sigma);
    }
    dc.row(n, diags[0][n].t, e / M, mass / M, ms / M, lo, hi, cl / M, mr);
  }
  io::write_bytes(ctx.out / "diagnostics.csv", dc.str());
  const EnsembleEstimate est = summarize(totals);
  std::string rep = "ensemble\n";
  rep += "paths " + std::to_string(M) + "\n";
  rep += format_line("cost_mean", est.mean);
  rep += format_line("cost_std_error", est.std_error);
  io::write_bytes(ctx.out / "report.txt", rep);
  ctx.log << rep;
  return kExitOk;
}

inline int cmd_gradcheck(Context& ctx) {
  const auto& p = ctx.prob;
  const int N = ctx.cfg.solver.n_steps;
  const auto ensemble = make_ensemble(p.solver, ctx.cfg.seed, ctx.cfg.paths);
  const ControlPair dir0 = random_direction(p.grid, N, ctx.cfg.seed, 0);
  const auto rows = gateaux_check(p.solver, p.phi0, p.sigma0, p.controls, dir0, ctx.cfg.checks.gateaux_eps, ensemble[0]);
  const auto orders = observed_orders(rows);
  Csv g({"epsilon", "remainder", "observed_order"});
  for (std::size_t i = 0; i < rows.size(); ++i) g.row(rows[i].epsilon, rows[i].remainder, i == 0 ? std::nan("") : orders[i - 1]);
  io::write_bytes(ctx.out / "gateaux.csv", g.str());

  ControlProblem cp(p.solver, p.phi0, p.sigma0, p.cost, ensemble, ctx.cfg.threads);
  std::vector<ControlPair> dirs;
  for (int k = 0; k < ctx.cfg.checks.fd_directions; ++k)
    dirs.push_back(random_direction(p.grid, N, ctx.cfg.seed, static_cast<std::uint32_t>(k + 1)));
  const auto fd = gradient_fd_check(cp, p.controls, dirs, ctx.cfg.checks.fd_eps);
  Csv f({"direction", "adjoint", "finite_difference", "rel_error"});
  double worst = 0.0;
  for (std::size_t k = 0; k < fd.size(); ++k) {
    f.row(k, fd[k].adjoint, fd[k].finite_difference, fd[k].rel_error);
    worst = std::max(worst, fd[k].rel_error);
  }
  io::write_bytes(ctx.out / "gradient_fd.csv", f.str());
  double min_order = orders.empty() ? std::nan("") : orders[0];
  for (double o : orders) min_order = std::min(min_order, o);
  std::string rep = "gradcheck\n";
  rep += format_line("gateaux_min_observed_order", min_order);
  rep += format_line("fd_max_rel_error", worst);
  rep += "paths " + std::to_string(ctx.cfg.paths) + "\n";
  io::write_bytes(ctx.out / "report.txt", rep);
  ctx.log << rep;
  return kExitOk;
}

inline int cmd_duality(Context& ctx) {
  const auto& p = ctx.prob;
  const int N = ctx.cfg.solver.n_steps;
  const NoisePath noise = NoisePath::generate(p.solver.additive_noise(), p.solver.multiplicative_noise(), p.solver.basis(),
                                              p.solver.dt(), N, ctx.cfg.seed, 0);
  const Trajectory tr = p.solver.simulate(p.phi0, p.sigma0, p.controls, noise);
  const int F = ctx.cfg.checks.duality_forcings;
  std::vector<DualityResult> res(F);
  parallel_for(F, ctx.cfg.threads, [&](std::size_t f) {
    const auto g1 = random_forcing(p.grid, N, ctx.cfg.seed, static_cast<std::uint32_t>(f), 11);
    const auto g2 = random_forcing(p.grid, N, ctx.cfg.seed, static_cast<std::uint32_t>(f), 12);
    res[f] = duality_check(p.solver, tr, p.cost, g1, g2);
  });
  Csv c({"forcing", "lhs", "rhs", "gap"});
  double worst = 0.0;
  for (int f = 0; f < F; ++f) {
    c.row(f, res[f].lhs, res[f].rhs, res[f].gap);
    worst = std::max(worst, res[f].gap);
  }
  io::write_bytes(ctx.out / "duality.csv", c.str());
  const AdjointSolution adj = solve_adjoint(p.solver, tr, p.cost);
  const auto fields = ctx.out / "fields";
  std::filesystem::create_directories(fields);
  for (int n = 0; n <= N; ++n) {
    if (n % ctx.cfg.stride != 0 && n != N) continue;
    io::save_field(fields / step_name("pi", n), adj.states[n].pi);
    io::save_field(fields / step_name("rho", n), adj.states[n].rho);
  }
  std::string rep = "duality\n";
  rep += "forcings " + std::to_string(F) + "\n";
  rep += format_line("max_gap", worst);
  io::write_bytes(ctx.out / "report.txt", rep);
  ctx.log << rep;
  return kExitOk;
}

inline int cmd_yosida(Context& ctx, const std::vector<double>& lambdas) {
  const auto& p = ctx.prob;
  const NoisePath noise = NoisePath::generate(p.solver.additive_noise(), p.solver.multiplicative_noise(), p.solver.basis(),
                                              p.solver.dt(), ctx.cfg.solver.n_steps, ctx.cfg.seed, 0);
  const auto rows = yosida_convergence_study(p.solver, p.phi0, p.sigma0, p.controls, noise, lambdas);
  Csv c({"lambda", "max_gap"});
  for (const auto& r : rows) c.row(r.lambda, r.gap);
  io::write_bytes(ctx.out / "yosida.csv", c.str());
  bool monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i) monotone = monotone && rows[i].gap <= rows[i - 1].gap;
  std::string rep = "yosida\n";
  rep += std::string("nonincreasing ") + (monotone ? "yes" : "no") + "\n";
  if (!rows.empty()) rep += format_line("smallest_lambda_gap", rows.back().gap);
  io::write_bytes(ctx.out / "report.txt", rep);
  ctx.log << rep;
  return kExitOk;
}

inline int cmd_optimize(Context& ctx, double& wall) {
  const auto& p = ctx.prob;
  const auto ensemble = make_ensemble(p.solver, ctx.cfg.seed, ctx.cfg.paths);
  ControlProblem cp(p.solver, p.phi0, p.sigma0, p.cost, ensemble, ctx.cfg.threads);
  auto [best, rep] = projected_gradient_descent(cp, p.controls, ctx.cfg.optim);
  wall = rep.wall_seconds;
  Csv c({"iter", "J", "J_std_error", "grad_norm", "kkt", "step", "backtracks"});
  for (const auto& it : rep.iterates) c.row(it.iter, it.J, it.J_std_error, it.grad_norm, it.kkt, it.step, it.backtracks);
  io::write_bytes(ctx.out / "optim.csv", c.str());
  const auto fields = ctx.out / "fields";
  std::filesystem::create_directories(fields);
  for (int n = 0; n < best.n_steps(); ++n) {
    io::save_field(fields / step_name("u", n), best.u[n]);
    io::save_field(fields / step_name("w", n), best.w[n]);
  }
  std::string r = "optimize\n";
  r += std::string("converged ") + (rep.converged ? "yes" : "no") + "\n";
  r += "iterations " + std::to_string(rep.iterates.size() - 1) + "\n";
  r += "ensemble " + std::to_string(rep.ensemble_size) + "\n";
  r += format_line("J", rep.iterates.back().J);
  r += format_line("kkt", rep.kkt);
  r += format_line("projection_residual_u", rep.projection_u);
  r += format_line("projection_residual_w", rep.projection_w);
  io::write_bytes(ctx.out / "report.txt", r);
  ctx.log << r;
  return kExitOk;
}

}  // namespace cli_detail

/// Template configuration with every key at its default.
inline RunConfig default_config() {
  RunConfig c;
  c.phi0 = json{{"type", "cosine"}, {"mean", 0.2}, {"amplitude", 0.5}, {"modes", {1}}};
  c.sigma0 = 0.6;
  c.u = 0.5;
  c.w = 0.5;
  return c;
}

/// Runs one parsed command. Errors are reported on `err` and mapped to exit codes.
inline int run_command(const CliOptions& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  using namespace cli_detail;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    RunConfig cfg = opt.config.empty() ? default_config() : load_config(opt.config);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.threads) {
      if (*opt.threads < 1) throw ConfigError("--threads", "must be >= 1");
      cfg.threads = *opt.threads;
    }
    if (opt.stride) {
      if (*opt.stride < 1) throw ConfigError("--stride", "must be >= 1");
      cfg.stride = *opt.stride;
    }
    if (opt.paths) {
      if (*opt.paths < 1) throw ConfigError("--paths", "must be >= 1");
      cfg.paths = *opt.paths;
    }
    if (opt.out) cfg.out_dir = *opt.out;
    if (opt.command == "print-config") {
      out << to_json(cfg).dump(2) << "\n";
      return kExitOk;
    }
    if (opt.config.empty()) throw ConfigError("--config", "a configuration file is required");

    Context ctx{cfg, build_problem(cfg), cfg.out_dir, out};
    std::filesystem::create_directories(ctx.out);
    double opt_wall = 0.0;
    int rc = kExitOk;
    if (opt.command == "simulate") {
      rc = cmd_simulate(ctx);
    } else if (opt.command == "ensemble") {
      rc = cmd_ensemble(ctx);
    } else if (opt.command == "gradcheck") {
      rc = cmd_gradcheck(ctx);
    } else if (opt.command == "duality") {
      rc = cmd_duality(ctx);
    } else if (opt.command == "yosida") {
      rc = cmd_yosida(ctx, opt.lambdas.empty() ? cfg.checks.yosida_lambdas : opt.lambdas);
    } else if (opt.command == "optimize") {
      rc = cmd_optimize(ctx, opt_wall);
    } else {
      throw ConfigError("<command>", "unknown subcommand '" + opt.command + "'");
    }
    json meta;
    meta["command"] = opt.command;
    meta["config"] = opt.config;
    meta["version"] = kVersion;
    meta["seed"] = cfg.seed;
    meta["threads"] = cfg.threads;
    meta["paths"] = cfg.paths;
    meta["started_utc"] = utc_now();
    meta["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (opt.command == "optimize") meta["optimizer_wall_seconds"] = opt_wall;
    meta["resolved_config"] = to_json(cfg);
    io::write_bytes(ctx.out / "meta.json", meta.dump(2) + "\n");
    return rc;
  } catch (const ConfigError& e) {
    err << "error: ConfigInvalid(" << e.assumption() << "): " << e.detail() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: IoError: " << e.what() << "\n";
    return kExitIo;
  }
}

/// Parses argv and dispatches. Usage errors exit with the config code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Stochastic Cahn-Hilliard tumor growth: simulation, sensitivities and optimal control", "stumor"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  CliOptions opt;
  std::uint64_t seed = 0;
  int threads = 1, stride = 1, paths = 1;
  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"simulate", "run one noise path and write fields and diagnostics"},
      {"ensemble", "run --paths noise paths and write cost statistics"},
      {"gradcheck", "Gateaux remainder table and adjoint gradient against finite differences"},
      {"duality", "tangent/adjoint duality gaps for random forcings"},
      {"yosida", "gap between Yosida-regularized and plain runs"},
      {"optimize", "projected gradient descent on the fixed-ensemble cost"},
      {"print-config", "print the configuration with all defaults filled in"},
  };
  std::vector<CLI::App*> apps;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config,-c", opt.config, "configuration file (JSON)");
    if (std::string(s.name) != "print-config") sub->get_option("--config")->required();
    sub->add_option("--out,-o", opt.out, "output directory");
    sub->add_option("--seed", seed, "master seed")->check(CLI::NonNegativeNumber);
    sub->add_option("--threads", threads, "worker threads over paths")->check(CLI::PositiveNumber);
    sub->add_option("--stride", stride, "write fields every N steps")->check(CLI::PositiveNumber);
    sub->add_option("--paths", paths, "ensemble size")->check(CLI::PositiveNumber);
    if (std::string(s.name) == "yosida") sub->add_option("--lambdas", opt.lambdas, "decreasing regularization parameters");
    apps.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, eo;
    const int rc = app.exit(e, o, eo);
    out << o.str();
    err << eo.str();
    return rc == 0 ? kExitOk : kExitConfig;
  }
  for (CLI::App* sub : apps) {
    if (!sub->parsed()) continue;
    opt.command = sub->get_name();
    if (sub->count("--seed")) opt.seed = seed;
    if (sub->count("--threads")) opt.threads = threads;
    if (sub->count("--stride")) opt.stride = stride;
    if (sub->count("--paths")) opt.paths = paths;
  }
  return run_command(opt, out, err);
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<const char*> argv{"stumor"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace stumor
