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
 * @file forward.hpp
 * @brief Time integration of the stochastic Cahn-Hilliard / reaction-diffusion
 *        tumor model along one noise path.
 *
 * One step n -> n+1 runs K coupling sweeps (K = 1 unless Picard coupling is
 * enabled). Sweep k uses the iterates (phi^(k), sigma^(k)), starting from
 * (phi^n, sigma^n):
 *
 *   nutrient:  (I + dt (K + b + c h(phi^(k)))) sigma^(k+1)
 *                  = sigma^n + dt b w^n + H(sigma^(k)) dW2
 *   phase:     (I + dt A K^2 + dt S K) phi^(k+1)
 *                  = phi^n - dt B K psi'(phi^n) + dt S K phi^n
 *                    + dt (P sigma^(k+1) - a - alpha u^n) h(phi^(k)) + G dW1
 *
 * with K = -laplacian. The nutrient matrix is an SPD M-matrix (CG), the
 * phase matrix has constant coefficients (cosine diagonalization). Sweeps
 * stop once successive iterates differ by less than picard_tol.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "stumor/cosine_basis.hpp"
#include "stumor/functionals.hpp"
#include "stumor/grid.hpp"
#include "stumor/model.hpp"
#include "stumor/noise.hpp"
#include "stumor/potential.hpp"

namespace stumor {

struct StateSnapshot {
  ScalarField phi;
  ScalarField mu;
  ScalarField sigma;
  double t = 0.0;
};

/// Extra Picard iterates of one step. phi^(0) is the step's start state and
/// sigma^(K) its end state, so only intermediate iterates are stored.
struct StepRecord {
  std::vector<ScalarField> phi_star;    // phi^(k), k = 1..K-1
  std::vector<ScalarField> sigma_star;  // sigma^(k), k = 1..K-1
  std::vector<double> picard_residuals;

  int sweeps() const { return static_cast<int>(phi_star.size()) + 1; }
};

struct StepDiagnostics {
  double t = 0.0;
  double energy = 0.0;
  double mass = 0.0;
  double mean_sigma = 0.0;
  double min_sigma = 0.0;
  double max_sigma = 0.0;
  double clamped_mass = 0.0;
  double mass_residual = 0.0;
  int picard_sweeps = 0;
};

struct Trajectory {
  double dt = 0.0;
  std::vector<StateSnapshot> states;         // n = 0..N
  std::vector<StepRecord> steps;             // n = 0..N-1
  std::vector<StepDiagnostics> diagnostics;  // n = 0..N (row 0 describes the initial state)
  ControlPair controls;
  NoisePath noise;

  int n_steps() const { return static_cast<int>(steps.size()); }
  const Grid& grid() const { return states.front().phi.grid(); }

  /// phi^(k) used by sweep k of step n.
  const ScalarField& phi_used(int n, int k) const { return k == 0 ? states[n].phi : steps[n].phi_star[k - 1]; }
  /// sigma^(k) entering sweep k of step n (k = 0..K); sigma^(K) is the new state.
  const ScalarField& sigma_iterate(int n, int k) const {
    const int K = steps[n].sweeps();
    if (k == 0) return states[n].sigma;
    if (k == K) return states[n + 1].sigma;
    return steps[n].sigma_star[k - 1];
  }
};

struct StepNoise {
  ScalarField additive;
  std::span<const double> w2;
};

struct StepResult {
  StateSnapshot state;
  StepRecord record;
  StepDiagnostics diag;
};

class StateSolver {
 public:
  StateSolver(const Grid& grid, const ModelParams& params, const PotentialSpec& potential, const AdditiveNoiseSpec& additive,
              const MultiplicativeNoiseSpec& multiplicative, const SolverConfig& config)
      : grid_(grid),
        params_(params),
        additive_(additive),
        multiplicative_(multiplicative),
        config_(config),
        potential_{potential, config.yosida_lambda},
        basis_(grid),
        kdiag_(grid) {
    validate(config_);
    validate(params_, config_.validation_bypass);
    validate(potential);
    validate(additive_, grid);
    validate(multiplicative_, grid);
    for (int a = 0; a < grid.dim; ++a) {
      const std::size_t s = grid.stride(a);
      const std::size_t m = static_cast<std::size_t>(grid.n[a]);
      const double w = 1.0 / (grid.dx[a] * grid.dx[a]);
      for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        const std::size_t i = (idx / s) % m;
        kdiag_[idx] += w * ((i > 0 ? 1.0 : 0.0) + (i + 1 < m ? 1.0 : 0.0));
      }
    }
  }

  const Grid& grid() const { return grid_; }
  const ModelParams& params() const { return params_; }
  const SolverConfig& config() const { return config_; }
  const Potential& potential() const { return potential_; }
  const CosineBasis& basis() const { return basis_; }
  const AdditiveNoiseSpec& additive_noise() const { return additive_; }
  const MultiplicativeNoiseSpec& multiplicative_noise() const { return multiplicative_; }
  double dt() const { return config_.dt; }
  double stabilization() const { return config_.S(params_); }

  /// Returns a copy with a different solver configuration (Yosida runs, dt refinement).
  StateSolver with_config(const SolverConfig& c) const {
    return StateSolver(grid_, params_, potential_.spec, additive_, multiplicative_, c);
  }

  /// (I + dt A K^2 + dt S K)^{-1} rhs. Self-adjoint.
  ScalarField solve_phase(const ScalarField& rhs) const {
    const double dt = config_.dt, A = params_.A, S = stabilization();
    return basis_.apply_symbol(rhs, [&](double k) { return 1.0 / (1.0 + dt * A * k * k + dt * S * k); });
  }

  /// Applies I + dt (K + b + c diag(h_phi)).
  ScalarField apply_nutrient(const ScalarField& h_phi, const ScalarField& v) const {
    ScalarField out = neg_laplacian(v);
    const double dt = config_.dt;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = v[i] + dt * (out[i] + (params_.b + params_.c * h_phi[i]) * v[i]);
    return out;
  }

  /// (I + dt (K + b + c diag(h_phi)))^{-1} rhs by Jacobi-PCG. Self-adjoint.
  ScalarField solve_nutrient(const ScalarField& h_phi, const ScalarField& rhs, const ScalarField& guess) const {
    const double dt = config_.dt;
    ScalarField diag(grid_);
    for (std::size_t i = 0; i < diag.size(); ++i) diag[i] = 1.0 + dt * (kdiag_[i] + params_.b + params_.c * h_phi[i]);
    ScalarField x = guess;
    CgOptions opt;
    opt.rel_tol = config_.cg_tol;
    try {
      conjugate_gradient([&](const ScalarField& v) { return apply_nutrient(h_phi, v); }, rhs, x, diag, opt,
                         [](ScalarField&) {});
    } catch (const Error& e) {
      throw Error(ErrorKind::LinearSolveFailure, std::string("nutrient solve: ") + e.what());
    }
    return x;
  }

  /// phi - dt B K psi'(phi) + dt S K phi: the explicit part of the phase right-hand side.
  ScalarField phase_explicit(const ScalarField& phi) const {
    const double dt = config_.dt;
    ScalarField d1 = map(phi, [&](double r) { return potential_.d1(r); });
    ScalarField out = phi;
    out.axpy(dt * params_.B, laplacian(d1));
    out.axpy(dt * stabilization(), neg_laplacian(phi));
    return out;
  }

  StateSnapshot make_state(const ScalarField& phi, const ScalarField& sigma, double t) const {
    return {phi, chemical_potential(phi, params_, potential_), sigma, t};
  }

  /// One accepted time step.
  StepResult step(const StateSnapshot& s, const ScalarField& u, const ScalarField& w, const StepNoise& noise) const {
    const double dt = config_.dt;
    const ModelParams& p = params_;
    const int K = config_.picard_max;

    ScalarField rphi = phase_explicit(s.phi);
    const bool has_additive = !noise.additive.empty();
    if (has_additive) rphi += noise.additive;
    ScalarField rsig_base = s.sigma;
    rsig_base.axpy(dt * p.b, w);
    const bool has_mult = !noise.w2.empty() && multiplicative_.c0 > 0.0;

    StepResult out;
    ScalarField phi_k = s.phi;
    ScalarField sigma_k = s.sigma;
    ScalarField phi_next, sigma_next, source;
    double clamped = 0.0;
    int sweeps = 0;
    for (int k = 0; k < K; ++k) {
      const ScalarField h_k = map(phi_k, [](double r) { return h(r); });
      ScalarField rsig = rsig_base;
      if (has_mult) rsig += multiplicative_field(multiplicative_, basis_, sigma_k, noise.w2);
      sigma_next = solve_nutrient(h_k, rsig, sigma_k);
      clamped = 0.0;
      if (config_.clamp_sigma) {
        for (double& v : sigma_next.values()) {
          const double c = std::clamp(v, 0.0, 1.0);
          clamped += std::abs(v - c);
          v = c;
        }
        clamped *= grid_.cell_volume();
      }
      source = ScalarField(grid_);
      for (std::size_t i = 0; i < source.size(); ++i) source[i] = (p.P * sigma_next[i] - p.a - p.alpha * u[i]) * h_k[i];
      ScalarField rhs = rphi;
      rhs.axpy(dt, source);
      phi_next = solve_phase(rhs);
      ++sweeps;
      if (k > 0) {
        const double res = norm(phi_next - phi_k) + norm(sigma_next - sigma_k);
        out.record.picard_residuals.push_back(res);
        if (res < config_.picard_tol) break;
        if (k + 1 == K) {
          throw Error(ErrorKind::PicardNoConvergence, "coupling sweeps stalled at residual " + std::to_string(res));
        }
      }
      if (k + 1 < K) {
        out.record.phi_star.push_back(phi_next);
        out.record.sigma_star.push_back(sigma_next);
      }
      phi_k = phi_next;
      sigma_k = sigma_next;
    }

    if (!phi_next.all_finite() || !sigma_next.all_finite()) throw Error(ErrorKind::NonFiniteState, "state became non-finite");

    out.state = make_state(phi_next, sigma_next, s.t + dt);
    auto& d = out.diag;
    d.t = out.state.t;
    d.clamped_mass = clamped;
    d.picard_sweeps = sweeps;
    const double noise_mean = has_additive ? mean(noise.additive) : 0.0;
    d.mass_residual = mean(phi_next) - mean(s.phi) - dt * mean(source) - noise_mean;
    fill_state_diagnostics(out.state, d);
    return out;
  }

  void fill_state_diagnostics(const StateSnapshot& s, StepDiagnostics& d) const {
    d.t = s.t;
    d.energy = free_energy(s.phi, params_);
    d.mass = mean(s.phi);
    d.mean_sigma = mean(s.sigma);
    const auto [lo, hi] = std::minmax_element(s.sigma.values().begin(), s.sigma.values().end());
    d.min_sigma = *lo;
    d.max_sigma = *hi;
  }

  /// (A6)-(A7) on the initial data, (A5) on the controls.
  void check_inputs(const ScalarField& phi0, const ScalarField& sigma0, const ControlPair& controls) const {
    if (!(phi0.grid() == grid_) || !(sigma0.grid() == grid_)) throw Error(ErrorKind::GridMismatch, "initial data grid");
    for (double v : phi0.values())
      if (!std::isfinite(v) || !std::isfinite(psi(v))) throw Error(ErrorKind::ConfigInvalid, "A6: psi(phi0) must be finite");
    for (double v : sigma0.values())
      if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorKind::ConfigInvalid, "A7: sigma0 must lie in [0,1]");
    if (controls.n_steps() != config_.n_steps || controls.w.size() != controls.u.size())
      throw Error(ErrorKind::StepMismatch, "controls need one slice per step");
    for (std::size_t n = 0; n < controls.u.size(); ++n)
      if (!(controls.u[n].grid() == grid_) || !(controls.w[n].grid() == grid_))
        throw Error(ErrorKind::GridMismatch, "control grid");
    if (!config_.validation_bypass) validate_box(controls);
  }

  Trajectory simulate(const ScalarField& phi0, const ScalarField& sigma0, const ControlPair& controls,
                      const NoisePath& noise) const {
    check_inputs(phi0, sigma0, controls);
    if (noise.n_steps() < config_.n_steps) throw Error(ErrorKind::StepMismatch, "noise path is shorter than the run");
    Trajectory tr;
    tr.dt = config_.dt;
    tr.controls = controls;
    tr.noise = noise;
    tr.states.reserve(config_.n_steps + 1);
    tr.states.push_back(make_state(phi0, sigma0, 0.0));
    StepDiagnostics d0;
    fill_state_diagnostics(tr.states.front(), d0);
    tr.diagnostics.push_back(d0);
    for (int n = 0; n < config_.n_steps; ++n) {
      StepNoise sn{noise.additive(n, basis_), noise.w2[n]};
      try {
        StepResult r = step(tr.states.back(), controls.u[n], controls.w[n], sn);
        r.state.t = (n + 1) * config_.dt;
        r.diag.t = r.state.t;
        tr.states.push_back(std::move(r.state));
        tr.steps.push_back(std::move(r.record));
        tr.diagnostics.push_back(r.diag);
      } catch (const SolverError&) {
        throw;
      } catch (const Error& e) {
        throw SolverError(e.kind(), e.detail(), n);
      }
    }
    return tr;
  }

 private:
  Grid grid_;
  ModelParams params_;
  AdditiveNoiseSpec additive_;
  MultiplicativeNoiseSpec multiplicative_;
  SolverConfig config_;
  Potential potential_;
  CosineBasis basis_;
  ScalarField kdiag_;
};

/// Max over stored times of ||phi_lambda(t) - phi(t)||_H for each lambda.
struct YosidaRow {
  double lambda = 0.0;
  double gap = 0.0;
};

inline std::vector<YosidaRow> yosida_convergence_study(const StateSolver& solver, const ScalarField& phi0,
                                                       const ScalarField& sigma0, const ControlPair& controls,
                                                       const NoisePath& noise, const std::vector<double>& lambdas) {
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw Error(ErrorKind::ConfigInvalid, "Yosida parameters must be positive");
    if (i > 0 && !(lambdas[i] < lambdas[i - 1])) throw Error(ErrorKind::ConfigInvalid, "Yosida parameters must decrease");
  }
  SolverConfig plain = solver.config();
  plain.yosida_lambda.reset();
  const Trajectory ref = solver.with_config(plain).simulate(phi0, sigma0, controls, noise);
  std::vector<YosidaRow> rows;
  for (double lam : lambdas) {
    SolverConfig c = plain;
    c.yosida_lambda = lam;
    const Trajectory tr = solver.with_config(c).simulate(phi0, sigma0, controls, noise);
    double gap = 0.0;
    for (std::size_t n = 0; n < tr.states.size(); ++n) gap = std::max(gap, norm(tr.states[n].phi - ref.states[n].phi));
    rows.push_back({lam, gap});
  }
  return rows;
}

}  // namespace stumor
