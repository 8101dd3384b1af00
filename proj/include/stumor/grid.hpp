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
 * @file grid.hpp
 * @brief Cell-centred box grids with homogeneous Neumann operators.
 *
 * Fields live at cell centres of a uniform box. The Laplacian is the
 * second-order centred stencil with ghost cells mirrored across the
 * boundary, which makes it symmetric with respect to the cell-sum inner
 * product. The face-difference gradient used by grad_norm_sq() is its exact
 * summation-by-parts partner:
 *
 *     inner(-laplacian(f), g) == sum over faces of (df/dx)(dg/dx) * vol
 *
 * Everything downstream (energy decay, tangent/adjoint duality) relies on
 * this pairing being exact in floating point up to summation order.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stumor/error.hpp"

namespace stumor {

inline constexpr int kMaxDim = 3;

struct Grid {
  int dim = 1;
  std::array<int, kMaxDim> n{4, 1, 1};
  std::array<double, kMaxDim> len{1.0, 1.0, 1.0};
  std::array<double, kMaxDim> dx{0.25, 1.0, 1.0};

  /// Builds a grid from per-axis cell counts and side lengths. Unused axes
  /// are set to a single unit cell so that strides stay uniform.
  static Grid make(std::span<const int> extents, std::span<const double> lengths) {
    if (extents.empty() || extents.size() > static_cast<std::size_t>(kMaxDim) ||
        extents.size() != lengths.size()) {
      throw Error(ErrorKind::ConfigInvalid, "grid needs 1..3 axes with matching extents and lengths");
    }
    Grid g;
    g.dim = static_cast<int>(extents.size());
    for (int a = 0; a < kMaxDim; ++a) {
      if (a < g.dim) {
        if (extents[a] < 4) throw Error(ErrorKind::ConfigInvalid, "grid extents must be >= 4");
        if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a]))
          throw Error(ErrorKind::ConfigInvalid, "grid lengths must be positive");
        g.n[a] = extents[a];
        g.len[a] = lengths[a];
        g.dx[a] = lengths[a] / extents[a];
      } else {
        g.n[a] = 1;
        g.len[a] = 1.0;
        g.dx[a] = 1.0;
      }
    }
    return g;
  }

  static Grid line(int cells, double length) {
    const int e[] = {cells};
    const double l[] = {length};
    return make(e, l);
  }

  static Grid square(int cells, double length) {
    const int e[] = {cells, cells};
    const double l[] = {length, length};
    return make(e, l);
  }

  std::size_t size() const { return static_cast<std::size_t>(n[0]) * n[1] * n[2]; }

  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= dx[a];
    return v;
  }

  /// |D|, the domain measure.
  double measure() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= len[a];
    return v;
  }

  /// Row-major: axis 0 is slowest.
  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int a = kMaxDim - 1; a > axis; --a) s *= static_cast<std::size_t>(n[a]);
    return s;
  }

  /// Cell-centre coordinate along `axis` of cell index `i`.
  double center(int axis, int i) const { return (i + 0.5) * dx[axis]; }

  std::array<int, kMaxDim> unflatten(std::size_t idx) const {
    std::array<int, kMaxDim> ijk{0, 0, 0};
    for (int a = kMaxDim - 1; a >= 0; --a) {
      ijk[a] = static_cast<int>(idx % static_cast<std::size_t>(n[a]));
      idx /= static_cast<std::size_t>(n[a]);
    }
    return ijk;
  }

  /// Grids compare by shape and spacing; lengths are derived.
  friend bool operator==(const Grid& l, const Grid& r) { return l.dim == r.dim && l.n == r.n && l.dx == r.dx; }
};

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& grid, double value = 0.0) : grid_(grid), values_(grid.size(), value) {}
  ScalarField(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw Error(ErrorKind::GridMismatch, "value count does not match grid shape");
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& data() const { return values_; }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
  }

  ScalarField& operator+=(const ScalarField& o) {
    check_same(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  ScalarField& operator-=(const ScalarField& o) {
    check_same(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  ScalarField& operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
  }
  ScalarField& operator+=(double s) {
    for (double& v : values_) v += s;
    return *this;
  }
  /// this += s * o
  ScalarField& axpy(double s, const ScalarField& o) {
    check_same(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * o.values_[i];
    return *this;
  }

  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(double s, ScalarField a) { return a *= s; }
  friend ScalarField operator*(ScalarField a, double s) { return a *= s; }
  friend ScalarField operator-(ScalarField a) { return a *= -1.0; }

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

  void check_same(const ScalarField& o) const {
    if (!(grid_ == o.grid_) || values_.size() != o.values_.size())
      throw Error(ErrorKind::GridMismatch, "fields live on different grids");
  }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Pointwise map.
template <class F>
ScalarField map(const ScalarField& f, F&& fn) {
  ScalarField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = fn(f[i]);
  return out;
}

/// Pointwise product.
inline ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
  a.check_same(b);
  ScalarField out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

inline ScalarField laplacian(const ScalarField& f) {
  const Grid& g = f.grid();
  ScalarField out(g);
  const std::size_t total = g.size();
  for (int a = 0; a < g.dim; ++a) {
    const std::size_t s = g.stride(a);
    const std::size_t m = static_cast<std::size_t>(g.n[a]);
    const double w = 1.0 / (g.dx[a] * g.dx[a]);
    for (std::size_t idx = 0; idx < total; ++idx) {
      const std::size_t i = (idx / s) % m;
      const double left = i > 0 ? f[idx - s] : f[idx];
      const double right = i + 1 < m ? f[idx + s] : f[idx];
      out[idx] += w * (left - 2.0 * f[idx] + right);
    }
  }
  return out;
}

/// -laplacian, the positive semidefinite Neumann operator.
inline ScalarField neg_laplacian(const ScalarField& f) { return -laplacian(f); }

/// Unweighted Euclidean dot product of the value arrays.
inline double dot(const ScalarField& a, const ScalarField& b) {
  a.check_same(b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double sum(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s;
}

/// Volume-weighted L2(D) inner product.
inline double inner(const ScalarField& a, const ScalarField& b) { return a.grid().cell_volume() * dot(a, b); }

inline double norm(const ScalarField& f) { return std::sqrt(inner(f, f)); }

/// Volume-weighted average (1/|D|) * integral.
inline double mean(const ScalarField& f) {
  return f.grid().cell_volume() * sum(f) / f.grid().measure();
}

/// Integral over D by cell sums.
inline double integral(const ScalarField& f) { return f.grid().cell_volume() * sum(f); }

/// Integral of |grad f|^2 using face differences; pairs exactly with laplacian().
inline double grad_norm_sq(const ScalarField& f) {
  const Grid& g = f.grid();
  const std::size_t total = g.size();
  double acc = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    const std::size_t s = g.stride(a);
    const std::size_t m = static_cast<std::size_t>(g.n[a]);
    const double w = 1.0 / (g.dx[a] * g.dx[a]);
    for (std::size_t idx = 0; idx < total; ++idx) {
      if ((idx / s) % m + 1 < m) {
        const double d = f[idx + s] - f[idx];
        acc += w * d * d;
      }
    }
  }
  return g.cell_volume() * acc;
}

struct CgOptions {
  double rel_tol = 1e-14;
  /// Accept a stalled solve whose relative residual is still below this.
  double fail_tol = 1e-10;
  int max_iters = 0;  // 0: 10 * unknowns + 100
};

struct CgResult {
  int iterations = 0;
  double rel_residual = 0.0;
};

/**
 * Jacobi-preconditioned conjugate gradients for a symmetric positive
 * definite operator. `x` carries the initial guess in and the solution out.
 * `project` is applied to every search direction and residual (identity for
 * ordinary systems, mean removal for the singular Neumann operator).
 */
template <class Apply, class Project>
CgResult conjugate_gradient(Apply&& apply, const ScalarField& b, ScalarField& x, const ScalarField& diag,
                            const CgOptions& opt, Project&& project) {
  CgResult res;
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    x = ScalarField(b.grid());
    return res;
  }
  const int max_iters = opt.max_iters > 0 ? opt.max_iters : static_cast<int>(10 * b.size() + 100);
  ScalarField r = b - apply(x);
  project(r);
  ScalarField z = r;
  for (std::size_t i = 0; i < z.size(); ++i) z[i] /= diag[i];
  project(z);
  ScalarField p = z;
  double rz = dot(r, z);
  double rnorm = std::sqrt(dot(r, r));
  double best = rnorm;
  int stall = 0;
  while (rnorm > opt.rel_tol * bnorm && res.iterations < max_iters) {
    ScalarField ap = apply(p);
    project(ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) break;
    const double alpha = rz / pap;
    x.axpy(alpha, p);
    r.axpy(-alpha, ap);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = r[i] / diag[i];
    project(z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
    rnorm = std::sqrt(dot(r, r));
    ++res.iterations;
    // The residual 2-norm is not monotone in CG; only a plateau longer than
    // the unknown count is treated as a round-off floor.
    if (rnorm < best) {
      best = rnorm;
      stall = 0;
    } else if (++stall > static_cast<int>(b.size()) + 20) {
      break;
    }
  }
  ScalarField true_r = b - apply(x);
  project(true_r);
  res.rel_residual = std::sqrt(dot(true_r, true_r)) / bnorm;
  if (!(res.rel_residual <= std::max(opt.fail_tol, opt.rel_tol)) || !x.all_finite()) {
    throw Error(ErrorKind::NoConvergence,
                "conjugate gradient stalled at relative residual " + std::to_string(res.rel_residual));
  }
  return res;
}

inline void remove_mean(ScalarField& f) {
  const double m = sum(f) / static_cast<double>(f.size());
  f += -m;
}

struct NeumannInverseOptions {
  double rel_tol = 1e-12;
  /// Zero-mean precondition: |mean(y)| <= mean_tol * ||y||_H.
  double mean_tol = 1e-9;
};

/**
 * Solves -laplacian(z) = y with mean(z) = 0 for zero-mean y (the generalised
 * Neumann problem). CG runs on the zero-mean subspace.
 */
inline ScalarField neumann_inverse(const ScalarField& y, const NeumannInverseOptions& opt = {}) {
  const double m = mean(y);
  if (std::abs(m) > opt.mean_tol * norm(y)) {
    throw Error(ErrorKind::NonZeroMean, "neumann_inverse needs zero-mean data, got mean " + std::to_string(m));
  }
  ScalarField rhs = y;
  remove_mean(rhs);
  ScalarField z(y.grid());
  const ScalarField ones(y.grid(), 1.0);
  CgOptions cg;
  cg.rel_tol = opt.rel_tol;
  cg.fail_tol = std::max(opt.rel_tol, 1e-10);
  conjugate_gradient([](const ScalarField& v) { return neg_laplacian(v); }, rhs, z, ones, cg,
                     [](ScalarField& v) { remove_mean(v); });
  remove_mean(z);
  return z;
}

/// V* norm: sqrt(||grad N(y - mean y)||^2 + mean(y)^2).
inline double vstar_norm(const ScalarField& y, const NeumannInverseOptions& opt = {}) {
  const double m = mean(y);
  ScalarField centered = y;
  centered += -m;
  remove_mean(centered);
  const ScalarField z = neumann_inverse(centered, opt);
  return std::sqrt(grad_norm_sq(z) + m * m);
}

}  // namespace stumor
