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

#include "stumor/grid.hpp"
#include "stumor/model.hpp"
#include "stumor/potential.hpp"

namespace stumor {

/// (A/2) int |grad phi|^2 + B int psi(phi).
inline double free_energy(const ScalarField& phi, const ModelParams& p) {
  double well = 0.0;
  for (double v : phi.values()) well += psi(v);
  return 0.5 * p.A * grad_norm_sq(phi) + p.B * phi.grid().cell_volume() * well;
}

/// mu = -A laplacian(phi) + B psi'(phi) with the solver's psi'.
inline ScalarField chemical_potential(const ScalarField& phi, const ModelParams& p, const Potential& pot) {
  ScalarField mu = laplacian(phi) * (-p.A);
  for (std::size_t i = 0; i < mu.size(); ++i) mu[i] += p.B * pot.d1(phi[i]);
  return mu;
}

/// max |mu - (-A laplacian(phi) + B psi'(phi))|.
inline double chemical_potential_residual(const ScalarField& phi, const ScalarField& mu, const ModelParams& p,
                                          const Potential& pot) {
  const ScalarField ref = chemical_potential(phi, p, pot);
  double r = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) r = std::max(r, std::abs(mu[i] - ref[i]));
  return r;
}

}  // namespace stumor
