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
 * @file cost.hpp
 * @brief Treatment cost functional and its Monte Carlo estimator.
 *
 * Single-path value
 *
 *   (b1/2) int_Q |phi - phi_Q|^2 + (b2/2) int_D |phi(T) - phi_T|^2
 *     + (b3/2) int_D (phi(T) + 1) + (b4/2) int_Q u^2 + (b5/2) int_Q w^2
 *
 * The tracking integral uses the trapezoid rule over the stored states
 * n = 0..N. Controls are piecewise constant on step intervals, so their
 * integrals are exact: sum_n dt ||u^n||^2.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "stumor/forward.hpp"
#include "stumor/grid.hpp"
#include "stumor/model.hpp"

namespace stumor {

struct CostSpec {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double beta3 = 0.0;
  double beta4 = 0.0;
  double beta5 = 0.0;
  /// One field (constant in time) or one per stored state (N + 1).
  std::vector<ScalarField> phi_Q;
  ScalarField phi_T;

  const ScalarField& target(int n) const { return phi_Q.size() == 1 ? phi_Q.front() : phi_Q.at(n); }

  static CostSpec constant_targets(const Grid& g, double q, double t) {
    CostSpec s;
    s.phi_Q = {ScalarField(g, q)};
    s.phi_T = ScalarField(g, t);
    return s;
  }
};

inline void validate(const CostSpec& s, const Grid& g, int n_steps) {
  for (double b : {s.beta1, s.beta2, s.beta3, s.beta4, s.beta5})
    if (!(b >= 0.0) || !std::isfinite(b)) throw Error(ErrorKind::ConfigInvalid, "cost.beta* must be >= 0");
  if (s.phi_Q.size() != 1 && s.phi_Q.size() != static_cast<std::size_t>(n_steps + 1))
    throw Error(ErrorKind::StepMismatch, "cost.phi_Q needs one field or one per stored state");
  for (const auto& f : s.phi_Q) {
    if (!(f.grid() == g)) throw Error(ErrorKind::GridMismatch, "cost.phi_Q grid");
    if (!f.all_finite()) throw Error(ErrorKind::ConfigInvalid, "cost.phi_Q must be finite");
  }
  if (!(s.phi_T.grid() == g)) throw Error(ErrorKind::GridMismatch, "cost.phi_T grid");
  if (!s.phi_T.all_finite()) throw Error(ErrorKind::ConfigInvalid, "cost.phi_T must be finite");
}

/// Trapezoid weight of stored state n in a run of n_steps steps.
inline double trapezoid_weight(int n, int n_steps, double dt) { return (n == 0 || n == n_steps) ? 0.5 * dt : dt; }

/// Cost terms of one path, kept apart for reporting.
struct CostBreakdown {
  double tracking = 0.0;
  double terminal = 0.0;
  double size = 0.0;
  double control_u = 0.0;
  double control_w = 0.0;
  double total() const { return tracking + terminal + size + control_u + control_w; }
};

inline CostBreakdown cost_breakdown(const Trajectory& tr, const ControlPair& controls, const CostSpec& spec) {
  const int N = tr.n_steps();
  const double dt = tr.dt;
  if (controls.n_steps() != N || static_cast<int>(controls.w.size()) != N)
    throw Error(ErrorKind::StepMismatch, "controls and trajectory disagree on the step count");
  if (spec.phi_Q.size() != 1 && spec.phi_Q.size() != static_cast<std::size_t>(N + 1))
    throw Error(ErrorKind::StepMismatch, "phi_Q step count");
  const Grid& g = tr.grid();
  if (!(spec.phi_T.grid() == g) || !(spec.target(0).grid() == g)) throw Error(ErrorKind::GridMismatch, "cost targets");
  CostBreakdown c;
  for (int n = 0; n <= N; ++n) {
    const ScalarField diff = tr.states[n].phi - spec.target(n);
    c.tracking += trapezoid_weight(n, N, dt) * inner(diff, diff);
  }
  c.tracking *= 0.5 * spec.beta1;
  const ScalarField& phiT = tr.states[N].phi;
  const ScalarField dT = phiT - spec.phi_T;
  c.terminal = 0.5 * spec.beta2 * inner(dT, dT);
  c.size = 0.5 * spec.beta3 * (integral(phiT) + g.measure());
  for (int n = 0; n < N; ++n) {
    c.control_u += dt * inner(controls.u[n], controls.u[n]);
    c.control_w += dt * inner(controls.w[n], controls.w[n]);
  }
  c.control_u *= 0.5 * spec.beta4;
  c.control_w *= 0.5 * spec.beta5;
  return c;
}

inline double cost_path(const Trajectory& tr, const ControlPair& controls, const CostSpec& spec) {
  return cost_breakdown(tr, controls, spec).total();
}

struct EnsembleEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

/// Sample mean and standard error, accumulated in the given order.
inline EnsembleEstimate summarize(const std::vector<double>& values) {
  if (values.empty()) throw Error(ErrorKind::EmptyEnsemble, "no samples");
  EnsembleEstimate e;
  e.count = values.size();
  double s = 0.0;
  for (double v : values) s += v;
  e.mean = s / static_cast<double>(values.size());
  if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); })) {
    e.mean = values.front();
    return e;
  }
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - e.mean) * (v - e.mean);
    e.std_error = std::sqrt(ss / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
  }
  return e;
}

inline EnsembleEstimate cost_ensemble(const std::vector<Trajectory>& paths, const ControlPair& controls, const CostSpec& spec) {
  if (paths.empty()) throw Error(ErrorKind::EmptyEnsemble, "cost_ensemble needs at least one path");
  std::vector<double> v;
  v.reserve(paths.size());
  for (const auto& tr : paths) v.push_back(cost_path(tr, controls, spec));
  return summarize(v);
}

}  // namespace stumor
