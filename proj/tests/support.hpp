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

// Shared fixtures for the unit tests.

#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "stumor.hpp"

namespace stumor::testing {

inline std::string config_path(const char* name) { return std::string(STUMOR_CONFIG_DIR) + "/" + name; }

inline ScalarField random_field(const Grid& g, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  ScalarField f(g);
  for (double& v : f.values()) v = d(rng);
  return f;
}

inline ScalarField cosine_profile(const Grid& g, double m, double amp) {
  ScalarField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto ijk = g.unflatten(i);
    double prod = 1.0;
    for (int a = 0; a < g.dim; ++a) prod *= std::cos(std::numbers::pi * g.center(a, ijk[a]) / g.len[a]);
    f[i] = m + amp * prod;
  }
  return f;
}

/// Small 1D problem with additive noise and everything inside the kink-free range of h.
struct Small {
  Grid grid;
  ModelParams params;
  SolverConfig config;
  AdditiveNoiseSpec additive;
  MultiplicativeNoiseSpec multiplicative;
  ScalarField phi0, sigma0;
  ControlPair controls;
  CostSpec cost;

  explicit Small(int cells = 16, int steps = 8, double dt = 1e-3, double g0 = 0.05) : grid(Grid::line(cells, 1.0)) {
    config.dt = dt;
    config.n_steps = steps;
    additive = {g0, 2.0, std::min(cells, 8)};
    phi0 = cosine_profile(grid, 0.2, 0.5);
    sigma0 = ScalarField(grid, 0.6);
    controls = ControlPair::constant(grid, steps, 0.5, 0.5);
    cost = CostSpec::constant_targets(grid, 0.0, -0.5);
    cost.beta1 = cost.beta2 = 1.0;
    cost.beta3 = 0.5;
    cost.beta4 = cost.beta5 = 1.0;
  }

  StateSolver solver() const { return StateSolver(grid, params, PotentialSpec{}, additive, multiplicative, config); }
  NoisePath noise(std::uint64_t seed = 1, std::uint32_t path = 0) const {
    const StateSolver s = solver();
    return NoisePath::generate(additive, multiplicative, s.basis(), config.dt, config.n_steps, seed, path);
  }
};

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace stumor::testing
