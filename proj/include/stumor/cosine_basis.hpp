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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "stumor/grid.hpp"

namespace stumor {

/**
 * Orthonormal DCT-II basis of the discrete Neumann Laplacian.
 *
 * The per-axis matrix C has rows C[k][i] = s_k cos(pi k (i + 1/2) / n), so
 * that C C^T = I and -laplacian is diagonal in that basis with eigenvalue
 * sum_a (2 / dx_a^2)(1 - cos(pi k_a / n_a)). Transforms are dense
 * matrix-vector products per axis, which is fine at desk scale.
 */
class CosineBasis {
 public:
  explicit CosineBasis(const Grid& grid) : grid_(grid) {
    for (int a = 0; a < grid.dim; ++a) {
      const int m = grid.n[a];
      auto& mat = axis_[a];
      mat.assign(static_cast<std::size_t>(m) * m, 0.0);
      for (int k = 0; k < m; ++k) {
        const double s = k == 0 ? std::sqrt(1.0 / m) : std::sqrt(2.0 / m);
        for (int i = 0; i < m; ++i) {
          mat[static_cast<std::size_t>(k) * m + i] = s * std::cos(std::numbers::pi * k * (i + 0.5) / m);
        }
      }
      auto& tr = axis_t_[a];
      tr.assign(mat.size(), 0.0);
      for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i)
          tr[static_cast<std::size_t>(i) * m + k] = mat[static_cast<std::size_t>(k) * m + i];
    }
    eig_.assign(grid.size(), 0.0);
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      const auto k = grid.unflatten(idx);
      double e = 0.0;
      for (int a = 0; a < grid.dim; ++a) e += axis_eigenvalue(grid, a, k[a]);
      eig_[idx] = e;
    }
    order_.resize(grid.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t l, std::size_t r) { return eig_[l] < eig_[r]; });
  }

  /// Eigenvalue of -laplacian for 1D wavenumber k on axis a.
  static double axis_eigenvalue(const Grid& g, int a, int k) {
    return (2.0 / (g.dx[a] * g.dx[a])) * (1.0 - std::cos(std::numbers::pi * k / g.n[a]));
  }

  const Grid& grid() const { return grid_; }

  /// Coefficients of f in the orthonormal (Euclidean) basis, indexed like the grid.
  ScalarField forward(const ScalarField& f) const {
    ScalarField out = f;
    for (int a = 0; a < grid_.dim; ++a) apply_axis(out, a, false);
    return out;
  }

  ScalarField inverse(const ScalarField& coeffs) const {
    ScalarField out = coeffs;
    for (int a = 0; a < grid_.dim; ++a) apply_axis(out, a, true);
    return out;
  }

  /// Eigenvalues of -laplacian, indexed like forward() coefficients.
  std::span<const double> eigenvalues() const { return eig_; }

  /// Coefficient indices sorted by increasing eigenvalue (ties by index).
  std::span<const std::size_t> mode_order() const { return order_; }

  double mode_eigenvalue(std::size_t j) const { return eig_[order_[j]]; }

  /// j-th eigenfield (in eigenvalue order), orthonormal in the volume-weighted L2 product.
  ScalarField eigenfield(std::size_t j) const {
    ScalarField c(grid_);
    c[order_[j]] = 1.0 / std::sqrt(grid_.cell_volume());
    return inverse(c);
  }

  /// sum_j a_j e_j over the first a.size() ordered modes.
  ScalarField synthesize(std::span<const double> mode_coeffs) const {
    ScalarField c(grid_);
    const double scale = 1.0 / std::sqrt(grid_.cell_volume());
    for (std::size_t j = 0; j < mode_coeffs.size(); ++j) c[order_[j]] = mode_coeffs[j] * scale;
    return inverse(c);
  }

  /// Applies the diagonal operator with symbol `mult(eigenvalue)`.
  template <class F>
  ScalarField apply_symbol(const ScalarField& f, F&& mult) const {
    ScalarField c = forward(f);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= mult(eig_[i]);
    return inverse(c);
  }

 private:
  void apply_axis(ScalarField& f, int a, bool transpose) const {
    const std::size_t m = static_cast<std::size_t>(grid_.n[a]);
    const std::size_t s = grid_.stride(a);
    const std::size_t total = grid_.size();
    const auto& mat = transpose ? axis_t_[a] : axis_[a];
    std::vector<double> line(m), res(m);
    for (std::size_t base = 0; base < total; ++base) {
      if ((base / s) % m != 0) continue;
      for (std::size_t i = 0; i < m; ++i) line[i] = f[base + i * s];
      for (std::size_t k = 0; k < m; ++k) {
        const double* row = &mat[k * m];
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += row[i] * line[i];
        res[k] = acc;
      }
      for (std::size_t i = 0; i < m; ++i) f[base + i * s] = res[i];
    }
  }

  Grid grid_;
  std::array<std::vector<double>, kMaxDim> axis_;
  std::array<std::vector<double>, kMaxDim> axis_t_;
  std::vector<double> eig_;
  std::vector<std::size_t> order_;
};

}  // namespace stumor
