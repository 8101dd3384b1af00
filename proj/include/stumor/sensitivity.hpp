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
 * @file sensitivity.hpp
 * @brief Tangent (linearized) solves along a stored trajectory.
 *
 * The tangent step is the exact derivative of StateSolver::step with respect
 * to the state and the controls, evaluated at the iterates the forward step
 * actually used. For sweep k of step n, with s_k = sigma^(k+1):
 *
 *   (I + dt (K + b + c h_k)) z^(k+1) = z^n + dt F2 - dt c h'_k s_k x^(k)
 *   (I + dt A K^2 + dt S K) x^(k+1)  = x^n - dt B K (psi''(phi^n) x^n) + dt S K x^n
 *        + dt (P z^(k+1) h_k + F1_k) + dt (P s_k - a - alpha u) h'_k x^(k)
 *
 * where h_k = h(phi^(k)). A control direction (k_u, k_w) gives
 * F1_k = -alpha k_u h_k and F2 = b k_w; the generic forcing used by the
 * duality check gives F1_k = gamma1, F2 = gamma2.
 *
 * Only the H == 0 regime is differentiated.
 */

#pragma once

#include <cmath>
#include <vector>

#include "stumor/cost.hpp"
#include "stumor/forward.hpp"

namespace stumor {

struct TangentState {
  ScalarField x;  // tangent phase
  ScalarField y;  // tangent chemical potential
  ScalarField z;  // tangent nutrient
  double t = 0.0;
};

struct TangentSolution {
  std::vector<ScalarField> x;  // n = 0..N
  std::vector<ScalarField> z;  // n = 0..N
  /// mean(x^{n+1}) - mean(x^n) - dt mean(differentiated source), n = 0..N-1.
  std::vector<double> mass_residual;

  /// Full tangent state at level n; y = -A laplacian(x) + B psi''(phi) x.
  TangentState state(int n, const StateSolver& solver, const Trajectory& tr, double dt) const {
    ScalarField y = laplacian(x[n]) * (-solver.params().A);
    const ScalarField& phi = tr.states[n].phi;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += solver.params().B * solver.potential().d2(phi[i]) * x[n][i];
    return {x[n], std::move(y), z[n], n * dt};
  }
};

/// Tangent and adjoint solves need the additive-noise regime.
inline void require_linearizable(const StateSolver& solver) {
  if (solver.multiplicative_noise().active()) {
    throw Error(ErrorKind::Unsupported, "tangent/adjoint solves require H == 0 (noise.c0 = 0 or noise.n_modes_h = 0)");
  }
}

inline void check_base(const StateSolver& solver, const Trajectory& tr) {
  if (tr.states.empty() || !(tr.grid() == solver.grid()) || tr.dt != solver.dt() ||
      static_cast<int>(tr.states.size()) != tr.n_steps() + 1) {
    throw Error(ErrorKind::BaseTrajectoryMismatch, "trajectory does not belong to this solver");
  }
}

namespace detail {

/// One tangent step n -> n+1. `phase_src(k, h_k)` returns F1_k, `nutrient_src` is F2.
template <class PhaseSrc>
std::pair<ScalarField, ScalarField> tangent_step(const StateSolver& solver, const Trajectory& tr, int n, const ScalarField& xn,
                                                 const ScalarField& zn, PhaseSrc&& phase_src, const ScalarField& nutrient_src,
                                                 double* mass_residual) {
  const ModelParams& p = solver.params();
  const double dt = solver.dt();
  const double S = solver.stabilization();
  const ScalarField& phi_n = tr.states[n].phi;
  const ScalarField& u = tr.controls.u[n];

  ScalarField d2x(xn.grid());
  for (std::size_t i = 0; i < d2x.size(); ++i) d2x[i] = solver.potential().d2(phi_n[i]) * xn[i];
  ScalarField dr = xn;
  dr.axpy(dt * p.B, laplacian(d2x));
  dr.axpy(dt * S, neg_laplacian(xn));

  ScalarField xk = xn, zk = zn, source(xn.grid());
  const int K = tr.steps[n].sweeps();
  for (int k = 0; k < K; ++k) {
    const ScalarField& phik = tr.phi_used(n, k);
    const ScalarField& sk = tr.sigma_iterate(n, k + 1);
    const ScalarField hk = map(phik, [](double r) { return h(r); });
    ScalarField rz = zn;
    rz.axpy(dt, nutrient_src);
    for (std::size_t i = 0; i < rz.size(); ++i) rz[i] -= dt * p.c * h_prime(phik[i]) * sk[i] * xk[i];
    ScalarField z_next = solver.solve_nutrient(hk, rz, zk);

    source = phase_src(k, hk);
    for (std::size_t i = 0; i < source.size(); ++i) {
      source[i] += p.P * z_next[i] * hk[i] + (p.P * sk[i] - p.a - p.alpha * u[i]) * h_prime(phik[i]) * xk[i];
    }
    ScalarField rx = dr;
    rx.axpy(dt, source);
    xk = solver.solve_phase(rx);
    zk = std::move(z_next);
  }
  if (mass_residual) *mass_residual = mean(xk) - mean(xn) - dt * mean(source);
  return {std::move(xk), std::move(zk)};
}

template <class PhaseSrcAt, class NutrientSrcAt>
TangentSolution solve_tangent_impl(const StateSolver& solver, const Trajectory& tr, PhaseSrcAt&& phase_src_at,
                                   NutrientSrcAt&& nutrient_src_at) {
  require_linearizable(solver);
  check_base(solver, tr);
  const int N = tr.n_steps();
  TangentSolution sol;
  sol.x.reserve(N + 1);
  sol.z.reserve(N + 1);
  sol.x.emplace_back(solver.grid());
  sol.z.emplace_back(solver.grid());
  sol.mass_residual.resize(N);
  for (int n = 0; n < N; ++n) {
    auto [x1, z1] = tangent_step(
        solver, tr, n, sol.x.back(), sol.z.back(), [&](int k, const ScalarField& hk) { return phase_src_at(n, k, hk); },
        nutrient_src_at(n), &sol.mass_residual[n]);
    sol.x.push_back(std::move(x1));
    sol.z.push_back(std::move(z1));
  }
  return sol;
}

}  // namespace detail

/// Tangent along a control direction (k_u, k_w).
inline TangentSolution solve_tangent(const StateSolver& solver, const Trajectory& tr, const ControlPair& direction) {
  if (direction.n_steps() != tr.n_steps() || direction.w.size() != direction.u.size())
    throw Error(ErrorKind::BaseTrajectoryMismatch, "direction step count");
  const double alpha = solver.params().alpha, b = solver.params().b;
  return detail::solve_tangent_impl(
      solver, tr, [&](int n, int, const ScalarField& hk) { return hadamard(direction.u[n], hk) * (-alpha); },
      [&](int n) { return direction.w[n] * b; });
}

/// Tangent driven by generic forcings gamma1 (phase) and gamma2 (nutrient), one field per step.
inline TangentSolution solve_tangent_forced(const StateSolver& solver, const Trajectory& tr,
                                            const std::vector<ScalarField>& gamma1, const std::vector<ScalarField>& gamma2) {
  if (static_cast<int>(gamma1.size()) != tr.n_steps() || static_cast<int>(gamma2.size()) != tr.n_steps())
    throw Error(ErrorKind::BaseTrajectoryMismatch, "forcing step count");
  return detail::solve_tangent_impl(
      solver, tr, [&](int n, int, const ScalarField&) { return gamma1[n]; }, [&](int n) { return gamma2[n]; });
}

/// Single tangent step for callers that drive the recursion themselves.
inline TangentState tangent_step(const StateSolver& solver, const Trajectory& tr, int n, const TangentState& ts,
                                 const ScalarField& k_u, const ScalarField& k_w) {
  require_linearizable(solver);
  check_base(solver, tr);
  if (n < 0 || n >= tr.n_steps()) throw Error(ErrorKind::BaseTrajectoryMismatch, "step index out of range");
  const double alpha = solver.params().alpha;
  auto [x1, z1] = detail::tangent_step(
      solver, tr, n, ts.x, ts.z, [&](int, const ScalarField& hk) { return hadamard(k_u, hk) * (-alpha); },
      k_w * solver.params().b, nullptr);
  ScalarField y = laplacian(x1) * (-solver.params().A);
  const ScalarField& phi1 = tr.states[n + 1].phi;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += solver.params().B * solver.potential().d2(phi1[i]) * x1[i];
  return {std::move(x1), std::move(y), std::move(z1), (n + 1) * solver.dt()};
}

/**
 * Derivative of the discrete single-path cost along the tangent:
 * b1 sum_n tau_n <phi^n - phi_Q, x^n> + <b2 (phi^N - phi_T) + b3/2, x^N>
 *   + b4 sum_n dt <u^n, k_u^n> + b5 sum_n dt <w^n, k_w^n>.
 */
inline double cost_state_derivative(const Trajectory& tr, const TangentSolution& tan, const CostSpec& spec) {
  const int N = tr.n_steps();
  double d = 0.0;
  for (int n = 0; n <= N; ++n)
    d += spec.beta1 * trapezoid_weight(n, N, tr.dt) * inner(tr.states[n].phi - spec.target(n), tan.x[n]);
  ScalarField term = (tr.states[N].phi - spec.phi_T) * spec.beta2;
  term += 0.5 * spec.beta3;
  d += inner(term, tan.x[N]);
  return d;
}

inline double cost_directional_derivative(const Trajectory& tr, const TangentSolution& tan, const ControlPair& controls,
                                          const ControlPair& direction, const CostSpec& spec) {
  double d = cost_state_derivative(tr, tan, spec);
  for (int n = 0; n < tr.n_steps(); ++n) {
    d += spec.beta4 * tr.dt * inner(controls.u[n], direction.u[n]);
    d += spec.beta5 * tr.dt * inner(controls.w[n], direction.w[n]);
  }
  return d;
}

struct GateauxRow {
  double epsilon = 0.0;
  /// || (phi_eps - phi) / eps - x ||_{L2(0,T;H)}, trapezoid in time.
  double remainder = 0.0;
};

inline std::vector<GateauxRow> gateaux_check(const StateSolver& solver, const ScalarField& phi0, const ScalarField& sigma0,
                                             const ControlPair& controls, const ControlPair& direction,
                                             const std::vector<double>& epsilons, const NoisePath& noise) {
  const Trajectory base = solver.simulate(phi0, sigma0, controls, noise);
  const TangentSolution tan = solve_tangent(solver, base, direction);
  const int N = base.n_steps();
  std::vector<GateauxRow> rows;
  for (double eps : epsilons) {
    ControlPair shifted = controls;
    shifted.axpy(eps, direction);
    const Trajectory pert = solver.simulate(phi0, sigma0, shifted, noise);
    double acc = 0.0;
    for (int n = 0; n <= N; ++n) {
      ScalarField q = pert.states[n].phi - base.states[n].phi;
      q *= 1.0 / eps;
      q -= tan.x[n];
      acc += trapezoid_weight(n, N, base.dt) * inner(q, q);
    }
    rows.push_back({eps, std::sqrt(acc)});
  }
  return rows;
}

/// Observed orders log(r_i / r_{i+1}) / log(eps_i / eps_{i+1}) between consecutive rows.
inline std::vector<double> observed_orders(const std::vector<GateauxRow>& rows) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    out.push_back(std::log(rows[i].remainder / rows[i + 1].remainder) / std::log(rows[i].epsilon / rows[i + 1].epsilon));
  }
  return out;
}

}  // namespace stumor
