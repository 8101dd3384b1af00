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
 * @file adjoint.hpp
 * @brief Pathwise discrete adjoint of the forward scheme (H == 0).
 *
 * The backward step is the transpose of the tangent step. Both linear solves
 * are self-adjoint, so the transpose reuses them; the cross couplings swap
 * roles:
 *
 *   tangent  z feeds x through  P h(phi) z     ->  adjoint pi feeds rho through  P h(phi) pi
 *   tangent  x feeds z through -c h'(phi) s x  ->  adjoint rho feeds pi through -c h'(phi) s rho
 *
 * Level-n costate convention: pi^n is the sensitivity of the cost to phi^n
 * without the running-cost term at level n, so pi^N = b2 (phi^N - phi_T) + b3/2
 * and rho^N = 0. The running cost b1 tau_n (phi^n - phi_Q) enters as a
 * source when stepping back across level n.
 *
 * Per step the solve also returns the sums over coupling sweeps that pair
 * with the forcings: pi_src (pairs with gamma1), h_pi (pairs with
 * -alpha k_u) and rho_src (pairs with gamma2, and with b k_w).
 */

#pragma once

#include <cmath>
#include <vector>

#include "stumor/cost.hpp"
#include "stumor/forward.hpp"
#include "stumor/sensitivity.hpp"

namespace stumor {

struct AdjointState {
  ScalarField pi;
  ScalarField pi_tilde;  // -laplacian(pi)
  ScalarField rho;
  double t = 0.0;
};

struct StepSensitivity {
  ScalarField pi_src;
  ScalarField h_pi;
  ScalarField rho_src;
};

struct AdjointSolution {
  std::vector<AdjointState> states;      // n = 0..N
  std::vector<StepSensitivity> steps;    // n = 0..N-1
};

inline AdjointState terminal_adjoint(const Trajectory& tr, const CostSpec& spec) {
  const int N = tr.n_steps();
  ScalarField pi = (tr.states[N].phi - spec.phi_T) * spec.beta2;
  pi += 0.5 * spec.beta3;
  ScalarField pt = neg_laplacian(pi);
  return {std::move(pi), std::move(pt), ScalarField(tr.grid()), N * tr.dt};
}

/// One backward step: adjoint at level n+1 -> adjoint at level n.
inline std::pair<AdjointState, StepSensitivity> adjoint_step_backward(const StateSolver& solver, const Trajectory& tr, int n,
                                                                      const AdjointState& next, const CostSpec& spec) {
  require_linearizable(solver);
  check_base(solver, tr);
  if (n < 0 || n >= tr.n_steps()) throw Error(ErrorKind::BaseTrajectoryMismatch, "step index out of range");
  const ModelParams& p = solver.params();
  const double dt = solver.dt();
  const int N = tr.n_steps();
  const Grid& g = tr.grid();
  const ScalarField& u = tr.controls.u[n];

  // Costate of phi^{n+1} including the running cost at level n+1.
  ScalarField phi_bar_next = next.pi;
  phi_bar_next.axpy(spec.beta1 * trapezoid_weight(n + 1, N, dt), tr.states[n + 1].phi - spec.target(n + 1));

  const int K = tr.steps[n].sweeps();
  std::vector<ScalarField> phi_bar(K + 1, ScalarField(g));
  std::vector<ScalarField> sig_bar(K + 1, ScalarField(g));
  phi_bar[K] = std::move(phi_bar_next);
  sig_bar[K] = next.rho;

  StepSensitivity sens{ScalarField(g), ScalarField(g), ScalarField(g)};
  ScalarField rhs_bar(g);    // adjoint of the explicit phase right-hand side
  ScalarField sigma_n_bar(g);
  for (int k = K - 1; k >= 0; --k) {
    const ScalarField& phik = tr.phi_used(n, k);
    const ScalarField& sk = tr.sigma_iterate(n, k + 1);
    const ScalarField hk = map(phik, [](double r) { return h(r); });

    const ScalarField pk = solver.solve_phase(phi_bar[k + 1]);
    rhs_bar += pk;
    sens.pi_src += pk;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double hp = h_prime(phik[i]);
      sens.h_pi[i] += hk[i] * pk[i];
      sig_bar[k + 1][i] += dt * p.P * hk[i] * pk[i];
      phi_bar[k][i] += dt * (p.P * sk[i] - p.a - p.alpha * u[i]) * hp * pk[i];
    }

    const ScalarField rk = solver.solve_nutrient(hk, sig_bar[k + 1], sig_bar[k + 1]);
    sens.rho_src += rk;
    sigma_n_bar += rk;
    for (std::size_t i = 0; i < g.size(); ++i) phi_bar[k][i] -= dt * p.c * h_prime(phik[i]) * sk[i] * rk[i];
  }

  // Transpose of phi -> phi - dt B K psi'(phi) + dt S K phi.
  const ScalarField& phi_n = tr.states[n].phi;
  ScalarField pi = std::move(phi_bar[0]);
  pi += rhs_bar;
  const ScalarField lap = laplacian(rhs_bar);
  for (std::size_t i = 0; i < g.size(); ++i) pi[i] += dt * p.B * solver.potential().d2(phi_n[i]) * lap[i];
  pi.axpy(dt * solver.stabilization(), neg_laplacian(rhs_bar));

  ScalarField pt = neg_laplacian(pi);
  AdjointState out{std::move(pi), std::move(pt), std::move(sigma_n_bar), n * dt};
  return {std::move(out), std::move(sens)};
}

inline AdjointSolution solve_adjoint(const StateSolver& solver, const Trajectory& tr, const CostSpec& spec) {
  require_linearizable(solver);
  check_base(solver, tr);
  validate(spec, tr.grid(), tr.n_steps());
  const int N = tr.n_steps();
  AdjointSolution sol;
  sol.states.resize(N + 1);
  sol.steps.resize(N);
  sol.states[N] = terminal_adjoint(tr, spec);
  for (int n = N - 1; n >= 0; --n) {
    try {
      auto [st, sens] = adjoint_step_backward(solver, tr, n, sol.states[n + 1], spec);
      sol.states[n] = std::move(st);
      sol.steps[n] = std::move(sens);
    } catch (const SolverError&) {
      throw;
    } catch (const Error& e) {
      throw SolverError(e.kind(), e.detail(), n);
    }
  }
  return sol;
}

struct DualityResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
};

/**
 * Pathwise duality: sum_n dt (<pi_src^n, gamma1^n> + <rho_src^n, gamma2^n>)
 * against the cost sensitivity paired with the tangent driven by (gamma1, gamma2).
 */
inline DualityResult duality_check(const StateSolver& solver, const Trajectory& tr, const CostSpec& spec,
                                   const std::vector<ScalarField>& gamma1, const std::vector<ScalarField>& gamma2) {
  const AdjointSolution adj = solve_adjoint(solver, tr, spec);
  const TangentSolution tan = solve_tangent_forced(solver, tr, gamma1, gamma2);
  DualityResult r;
  for (int n = 0; n < tr.n_steps(); ++n) {
    r.lhs += tr.dt * (inner(adj.steps[n].pi_src, gamma1[n]) + inner(adj.steps[n].rho_src, gamma2[n]));
  }
  r.rhs = cost_state_derivative(tr, tan, spec);
  r.gap = std::abs(r.lhs - r.rhs) / (1.0 + std::abs(r.lhs));
  return r;
}

}  // namespace stumor
