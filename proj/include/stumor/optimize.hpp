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
 * @file optimize.hpp
 * @brief Sample-average control problem and projected gradient descent.
 *
 * The expectation in the cost is replaced by the mean over a fixed ensemble
 * of noise paths (common random numbers), so J is a deterministic function
 * of the controls. Gradients are Riesz representatives in the space-time
 * inner product sum_n dt <., .>:
 *
 *   g_u = b4 u - alpha mean(h(phi) pi),   g_w = b5 w + b mean(rho)
 *
 * with the per-step sums over coupling sweeps from the discrete adjoint.
 */

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <tuple>
#include <vector>

#include "stumor/adjoint.hpp"
#include "stumor/cost.hpp"
#include "stumor/forward.hpp"
#include "stumor/parallel.hpp"

namespace stumor {

inline ScalarField project_box(ScalarField f) {
  for (double& v : f.values()) v = std::clamp(v, 0.0, 1.0);
  return f;
}

inline ControlPair project_box(ControlPair c) {
  for (auto& f : c.u) f = project_box(std::move(f));
  for (auto& f : c.w) f = project_box(std::move(f));
  return c;
}

/// || c - P(c - g) || in the space-time norm.
inline double kkt_residual(const ControlPair& c, const ControlPair& g, double dt) {
  return control_norm(c - project_box(c - g), dt);
}

/// Common-random-numbers ensemble: paths (seed, 0..M-1).
inline std::vector<NoisePath> make_ensemble(const StateSolver& solver, std::uint64_t seed, int paths) {
  if (paths < 1) throw Error(ErrorKind::EmptyEnsemble, "ensemble needs at least one path");
  std::vector<NoisePath> out;
  out.reserve(paths);
  for (int m = 0; m < paths; ++m)
    out.push_back(NoisePath::generate(solver.additive_noise(), solver.multiplicative_noise(), solver.basis(), solver.dt(),
                                      solver.config().n_steps, seed, static_cast<std::uint32_t>(m)));
  return out;
}

struct GradientResult {
  EnsembleEstimate cost;
  ControlPair g;
  std::vector<ScalarField> mean_h_pi;    // per step
  std::vector<ScalarField> mean_rho_src;  // per step
};

/// Fixed-ensemble optimal control problem.
class ControlProblem {
 public:
  ControlProblem(StateSolver solver, ScalarField phi0, ScalarField sigma0, CostSpec spec, std::vector<NoisePath> ensemble,
                 int threads = 1)
      : solver_(std::move(solver)),
        phi0_(std::move(phi0)),
        sigma0_(std::move(sigma0)),
        spec_(std::move(spec)),
        ensemble_(std::move(ensemble)),
        threads_(threads) {
    if (ensemble_.empty()) throw Error(ErrorKind::EmptyEnsemble, "control problem needs at least one noise path");
    validate(spec_, solver_.grid(), solver_.config().n_steps);
  }

  const StateSolver& solver() const { return solver_; }
  const CostSpec& spec() const { return spec_; }
  const std::vector<NoisePath>& ensemble() const { return ensemble_; }
  const ScalarField& phi0() const { return phi0_; }
  const ScalarField& sigma0() const { return sigma0_; }
  double dt() const { return solver_.dt(); }
  int threads() const { return threads_; }
  void set_threads(int t) { threads_ = t; }

  Trajectory simulate_path(const ControlPair& c, std::size_t m) const {
    try {
      return solver_.simulate(phi0_, sigma0_, c, ensemble_[m]);
    } catch (const SolverError& e) {
      throw SolverError(e.kind(), e.detail(), e.step(), static_cast<long>(m));
    }
  }

  std::vector<double> path_costs(const ControlPair& c) const {
    std::vector<double> v(ensemble_.size());
    parallel_for(ensemble_.size(), threads_, [&](std::size_t m) { v[m] = cost_path(simulate_path(c, m), c, spec_); });
    return v;
  }

  EnsembleEstimate cost(const ControlPair& c) const { return summarize(path_costs(c)); }

  GradientResult gradient(const ControlPair& c) const {
    const std::size_t M = ensemble_.size();
    const int N = solver_.config().n_steps;
    std::vector<double> costs(M);
    std::vector<std::vector<StepSensitivity>> sens(M);
    parallel_for(M, threads_, [&](std::size_t m) {
      const Trajectory tr = simulate_path(c, m);
      costs[m] = cost_path(tr, c, spec_);
      try {
        sens[m] = solve_adjoint(solver_, tr, spec_).steps;
      } catch (const SolverError& e) {
        throw SolverError(e.kind(), e.detail(), e.step(), static_cast<long>(m));
      }
    });
    GradientResult r;
    r.cost = summarize(costs);
    const Grid& g = solver_.grid();
    r.mean_h_pi.assign(N, ScalarField(g));
    r.mean_rho_src.assign(N, ScalarField(g));
    const double inv = 1.0 / static_cast<double>(M);
    for (std::size_t m = 0; m < M; ++m) {
      for (int n = 0; n < N; ++n) {
        r.mean_h_pi[n].axpy(inv, sens[m][n].h_pi);
        r.mean_rho_src[n].axpy(inv, sens[m][n].rho_src);
      }
    }
    const ModelParams& p = solver_.params();
    r.g = c;
    for (int n = 0; n < N; ++n) {
      r.g.u[n] *= spec_.beta4;
      r.g.u[n].axpy(-p.alpha, r.mean_h_pi[n]);
      r.g.w[n] *= spec_.beta5;
      r.g.w[n].axpy(p.b, r.mean_rho_src[n]);
    }
    return r;
  }

 private:
  StateSolver solver_;
  ScalarField phi0_;
  ScalarField sigma0_;
  CostSpec spec_;
  std::vector<NoisePath> ensemble_;
  int threads_;
};

struct FdRow {
  double adjoint = 0.0;
  double finite_difference = 0.0;
  double rel_error = 0.0;
};

/// <g, k> against (J(c + eps k) - J(c - eps k)) / (2 eps) on the same ensemble.
inline std::vector<FdRow> gradient_fd_check(const ControlProblem& prob, const ControlPair& c,
                                            const std::vector<ControlPair>& directions, double eps) {
  const GradientResult gr = prob.gradient(c);
  std::vector<FdRow> rows;
  for (const auto& k : directions) {
    ControlPair cp = c, cm = c;
    cp.axpy(eps, k);
    cm.axpy(-eps, k);
    FdRow r;
    r.adjoint = control_inner(gr.g, k, prob.dt());
    r.finite_difference = (prob.cost(cp).mean - prob.cost(cm).mean) / (2.0 * eps);
    r.rel_error = std::abs(r.adjoint - r.finite_difference) / std::max(std::abs(r.finite_difference), 1e-300);
    rows.push_back(r);
  }
  return rows;
}

struct OptimOptions {
  int max_iters = 200;
  double tol_kkt = 1e-6;
  double tau0 = 1.0;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  double tau_min = 1e-12;
};

struct OptimIterate {
  int iter = 0;
  double J = 0.0;
  double J_std_error = 0.0;
  double grad_norm = 0.0;
  double kkt = 0.0;
  double step = 0.0;  // accepted tau (0 on the final row)
  int backtracks = 0;
};

struct OptimReport {
  std::vector<OptimIterate> iterates;
  bool converged = false;
  double kkt = 0.0;
  /// ||u - P((alpha/b4) mean(h pi))||, ||w - P(-(b/b5) mean(rho))||; NaN where b4 or b5 vanishes.
  double projection_u = 0.0;
  double projection_w = 0.0;
  std::size_t ensemble_size = 0;
  double wall_seconds = 0.0;
};

/// Projection residuals of the first-order optimality formula at `c`.
inline std::pair<double, double> projection_residuals(const ControlProblem& prob, const ControlPair& c,
                                                      const GradientResult& gr) {
  const ModelParams& p = prob.solver().params();
  const CostSpec& s = prob.spec();
  const double dt = prob.dt();
  double ru = std::nan(""), rw = std::nan("");
  if (s.beta4 > 0.0) {
    double acc = 0.0;
    for (int n = 0; n < c.n_steps(); ++n) {
      const ScalarField d = c.u[n] - project_box(gr.mean_h_pi[n] * (p.alpha / s.beta4));
      acc += dt * inner(d, d);
    }
    ru = std::sqrt(acc);
  }
  if (s.beta5 > 0.0) {
    double acc = 0.0;
    for (int n = 0; n < c.n_steps(); ++n) {
      const ScalarField d = c.w[n] - project_box(gr.mean_rho_src[n] * (-p.b / s.beta5));
      acc += dt * inner(d, d);
    }
    rw = std::sqrt(acc);
  }
  return {ru, rw};
}

/**
 * Projected gradient descent c+ = P(c - tau g) with Armijo backtracking
 * J(c+) <= J(c) + s <g, c+ - c>. Stops at KKT <= tol_kkt or max_iters.
 */
inline std::pair<ControlPair, OptimReport> projected_gradient_descent(const ControlProblem& prob, const ControlPair& start,
                                                                      const OptimOptions& opt = {}) {
  validate_box(start);
  const auto t0 = std::chrono::steady_clock::now();
  const double dt = prob.dt();
  OptimReport rep;
  rep.ensemble_size = prob.ensemble().size();
  ControlPair c = start;
  GradientResult gr = prob.gradient(c);
  for (int it = 0;; ++it) {
    OptimIterate row;
    row.iter = it;
    row.J = gr.cost.mean;
    row.J_std_error = gr.cost.std_error;
    row.grad_norm = control_norm(gr.g, dt);
    row.kkt = kkt_residual(c, gr.g, dt);
    if (row.kkt <= opt.tol_kkt || it >= opt.max_iters) {
      rep.iterates.push_back(row);
      rep.converged = row.kkt <= opt.tol_kkt;
      break;
    }
    double tau = opt.tau0;
    for (;;) {
      ControlPair trial = c;
      trial.axpy(-tau, gr.g);
      trial = project_box(std::move(trial));
      const double decrease = control_inner(gr.g, trial - c, dt);
      const double Jt = prob.cost(trial).mean;
      if (Jt <= gr.cost.mean + opt.sufficient_decrease * decrease) {
        c = std::move(trial);
        break;
      }
      tau *= opt.shrink;
      ++row.backtracks;
      if (tau < opt.tau_min) {
        throw Error(ErrorKind::LineSearchFailure, "step size underflow at iteration " + std::to_string(it));
      }
    }
    row.step = tau;
    rep.iterates.push_back(row);
    gr = prob.gradient(c);
  }
  rep.kkt = rep.iterates.back().kkt;
  std::tie(rep.projection_u, rep.projection_w) = projection_residuals(prob, c, gr);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(c), std::move(rep)};
}

}  // namespace stumor
