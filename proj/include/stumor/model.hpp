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

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "stumor/grid.hpp"

namespace stumor {

/// Physical constants of the state system.
struct ModelParams {
  double P = 1.0;      // proliferation rate
  double a = 0.5;      // apoptosis rate
  double alpha = 1.0;  // drug effectiveness
  double b = 1.0;      // nutrient supply rate
  double c = 1.0;      // nutrient consumption rate
  double A = 1e-3;     // interface (gradient) coefficient
  double B = 1.0;      // double-well coefficient
};

/// (A1): every constant strictly positive. `bypass` admits nonnegative values
/// so that pure Cahn-Hilliard and decoupled test cases can run.
inline void validate(const ModelParams& p, bool bypass = false) {
  const std::pair<const char*, double> entries[] = {{"P", p.P}, {"a", p.a}, {"alpha", p.alpha}, {"b", p.b},
                                                    {"c", p.c}, {"A", p.A}, {"B", p.B}};
  for (const auto& [name, v] : entries) {
    const bool ok = bypass ? (v >= 0.0 && std::isfinite(v)) : (v > 0.0 && std::isfinite(v));
    if (!ok) {
      throw Error(ErrorKind::ConfigInvalid, std::string("A1: params.") + name + (bypass ? " must be >= 0" : " must be > 0"));
    }
  }
  if (!(p.A > 0.0) || !(p.B >= 0.0)) throw Error(ErrorKind::ConfigInvalid, "A1: params.A must stay > 0");
}

struct SolverConfig {
  double dt = 1e-3;
  int n_steps = 50;
  /// Convex-splitting stabilization S; unset means 2B.
  std::optional<double> stabilization{};
  int picard_max = 1;
  double picard_tol = 1e-10;
  std::optional<double> yosida_lambda{};
  bool clamp_sigma = false;
  bool validation_bypass = false;
  double cg_tol = 1e-14;

  double final_time() const { return dt * n_steps; }
  double S(const ModelParams& p) const { return stabilization ? *stabilization : 2.0 * p.B; }
};

inline void validate(const SolverConfig& c) {
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw Error(ErrorKind::ConfigInvalid, "solver.dt must be > 0");
  if (c.n_steps < 1) throw Error(ErrorKind::ConfigInvalid, "solver.n_steps must be >= 1");
  if (c.stabilization && !(*c.stabilization >= 0.0)) throw Error(ErrorKind::ConfigInvalid, "solver.S must be >= 0");
  if (c.picard_max < 1) throw Error(ErrorKind::ConfigInvalid, "solver.picard_max must be >= 1");
  if (!(c.picard_tol > 0.0)) throw Error(ErrorKind::ConfigInvalid, "solver.picard_tol must be > 0");
  if (c.yosida_lambda && !(*c.yosida_lambda > 0.0)) throw Error(ErrorKind::ConfigInvalid, "solver.yosida_lambda must be > 0");
}

/**
 * Space-time controls (u, w), piecewise constant in time: slice n acts on
 * the step interval [t_n, t_{n+1}), n = 0..n_steps-1.
 */
struct ControlPair {
  std::vector<ScalarField> u;
  std::vector<ScalarField> w;

  static ControlPair constant(const Grid& g, int n_steps, double uval, double wval) {
    ControlPair c;
    c.u.assign(n_steps, ScalarField(g, uval));
    c.w.assign(n_steps, ScalarField(g, wval));
    return c;
  }

  static ControlPair zeros_like(const ControlPair& o) {
    return constant(o.u.front().grid(), o.n_steps(), 0.0, 0.0);
  }

  int n_steps() const { return static_cast<int>(u.size()); }

  ControlPair& axpy(double s, const ControlPair& o) {
    for (std::size_t n = 0; n < u.size(); ++n) {
      u[n].axpy(s, o.u[n]);
      w[n].axpy(s, o.w[n]);
    }
    return *this;
  }

  ControlPair& operator*=(double s) {
    for (auto& f : u) f *= s;
    for (auto& f : w) f *= s;
    return *this;
  }

  friend ControlPair operator+(ControlPair a, const ControlPair& b) { return a.axpy(1.0, b); }
  friend ControlPair operator-(ControlPair a, const ControlPair& b) { return a.axpy(-1.0, b); }
  friend ControlPair operator*(double s, ControlPair a) { return a *= s; }
  friend bool operator==(const ControlPair&, const ControlPair&) = default;
};

/// Space-time L2 inner product: sum_n dt * inner(., .) over both components.
inline double control_inner(const ControlPair& a, const ControlPair& b, double dt) {
  if (a.n_steps() != b.n_steps() || a.w.size() != b.w.size())
    throw Error(ErrorKind::StepMismatch, "control pairs have different step counts");
  double s = 0.0;
  for (std::size_t n = 0; n < a.u.size(); ++n) s += dt * (inner(a.u[n], b.u[n]) + inner(a.w[n], b.w[n]));
  return s;
}

inline double control_norm(const ControlPair& a, double dt) { return std::sqrt(control_inner(a, a, dt)); }

/// (A5): 0 <= u, w <= 1 pointwise.
inline void validate_box(const ControlPair& c, double tol = 0.0) {
  const auto check = [&](const std::vector<ScalarField>& fs, const char* name) {
    for (std::size_t n = 0; n < fs.size(); ++n)
      for (double v : fs[n].values())
        if (!(v >= -tol && v <= 1.0 + tol))
          throw Error(ErrorKind::ConfigInvalid, std::string("A5: control ") + name + " leaves [0,1] at step " + std::to_string(n));
  };
  check(c.u, "u");
  check(c.w, "w");
}

}  // namespace stumor
