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
 * @file noise.hpp
 * @brief Truncated Q-Wiener drivers in the Neumann cosine eigenbasis.
 *
 * Additive driver for the phase equation:
 *
 *     G dW1 ~ sum_{j < n_modes} g_j sqrt(dt) xi_j e_j,   g_j = g0 (1 + lambda_j)^(-s/2)
 *
 * Multiplicative driver for the nutrient equation:
 *
 *     H(sigma) dW2 ~ sum_{n < n_modes} h_n(sigma) sqrt(dt) eta_n e_n,
 *     h_n(r) = c0 q^n [r]_{0,1} (1 - [r]_{0,1})
 *
 * e_j are the L2-orthonormal cosine eigenfields ordered by eigenvalue.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "stumor/cosine_basis.hpp"
#include "stumor/field_io.hpp"
#include "stumor/grid.hpp"
#include "stumor/rng.hpp"

namespace stumor {

struct AdditiveNoiseSpec {
  double g0 = 0.0;
  double s = 2.0;
  int n_modes = 0;

  /// g_j for a mode with -laplacian eigenvalue `eig`.
  double coefficient(double eig) const { return g0 * std::pow(1.0 + eig, -0.5 * s); }
  bool active() const { return g0 > 0.0 && n_modes > 0; }
};

struct MultiplicativeNoiseSpec {
  double c0 = 0.0;
  double q = 0.5;
  int n_modes = 0;

  double coefficient(int n) const { return c0 * std::pow(q, n); }
  /// Shared profile of every h_n: [r]_{0,1} (1 - [r]_{0,1}).
  static double profile(double r) {
    const double c = std::clamp(r, 0.0, 1.0);
    return c * (1.0 - c);
  }
  double hn(int n, double r) const { return coefficient(n) * profile(r); }
  bool active() const { return c0 > 0.0 && n_modes > 0; }
};

inline void validate(const AdditiveNoiseSpec& spec, const Grid& grid) {
  if (!(spec.g0 >= 0.0)) throw Error(ErrorKind::ConfigInvalid, "A3: noise.g0 must be >= 0");
  if (!(spec.s > 1.0)) throw Error(ErrorKind::ConfigInvalid, "A3: noise.s must be > 1");
  if (spec.n_modes < 0 || static_cast<std::size_t>(spec.n_modes) > grid.size())
    throw Error(ErrorKind::ConfigInvalid, "A3: noise.n_modes must lie in [0, cell count]");
}

inline void validate(const MultiplicativeNoiseSpec& spec, const Grid& grid) {
  if (!(spec.c0 >= 0.0)) throw Error(ErrorKind::ConfigInvalid, "A4: noise.c0 must be >= 0");
  if (!(spec.q > 0.0 && spec.q < 1.0)) throw Error(ErrorKind::ConfigInvalid, "A4: noise.q must lie in (0,1)");
  if (spec.n_modes < 0 || static_cast<std::size_t>(spec.n_modes) > grid.size())
    throw Error(ErrorKind::ConfigInvalid, "A4: noise.n_modes_h must lie in [0, cell count]");
}

struct NoiseCertificate {
  /// sum_{j < n_modes} g_j^2 (1 + lambda_j): the squared Hilbert-Schmidt norm into V.
  double hilbert_schmidt_v = 0.0;
  /// sum_{j >= n_modes} g_j^2 over the remaining discrete modes.
  double truncated_tail = 0.0;
  /// sum_n ||h_n'||_inf^2 = c0^2 sum q^(2n) over the kept modes.
  double multiplicative_lipschitz_sq = 0.0;
  /// Same sum over all n (closed form c0^2 / (1 - q^2)).
  double multiplicative_lipschitz_sq_full = 0.0;
};

inline NoiseCertificate certify(const AdditiveNoiseSpec& add, const MultiplicativeNoiseSpec& mult, const CosineBasis& basis) {
  NoiseCertificate c;
  const std::size_t total = basis.grid().size();
  for (std::size_t j = 0; j < total; ++j) {
    const double lam = basis.mode_eigenvalue(j);
    const double g = add.coefficient(lam);
    if (j < static_cast<std::size_t>(add.n_modes)) c.hilbert_schmidt_v += g * g * (1.0 + lam);
    else c.truncated_tail += g * g;
  }
  const double q2 = mult.q * mult.q;
  c.multiplicative_lipschitz_sq = mult.c0 * mult.c0 * (1.0 - std::pow(q2, mult.n_modes)) / (1.0 - q2);
  c.multiplicative_lipschitz_sq_full = mult.c0 * mult.c0 / (1.0 - q2);
  return c;
}

/// Mode coefficients g_j sqrt(dt) xi_j of one additive increment.
inline std::vector<double> sample_additive_coefficients(const AdditiveNoiseSpec& spec, const CosineBasis& basis, double dt,
                                                        RngStream& rng) {
  std::vector<double> a(static_cast<std::size_t>(spec.n_modes));
  const double sdt = std::sqrt(dt);
  for (std::size_t j = 0; j < a.size(); ++j) a[j] = spec.coefficient(basis.mode_eigenvalue(j)) * sdt * rng.normal();
  return a;
}

inline ScalarField sample_additive_increment(const AdditiveNoiseSpec& spec, const CosineBasis& basis, double dt,
                                             RngStream& rng) {
  if (!(dt > 0.0)) throw Error(ErrorKind::ConfigInvalid, "dt must be positive");
  if (spec.n_modes == 0) return ScalarField(basis.grid());
  return basis.synthesize(sample_additive_coefficients(spec, basis, dt, rng));
}

/// Scalar increments sqrt(dt) eta_n of W2.
inline std::vector<double> sample_multiplicative_scalars(const MultiplicativeNoiseSpec& spec, double dt, RngStream& rng) {
  std::vector<double> eta(static_cast<std::size_t>(spec.n_modes));
  const double sdt = std::sqrt(dt);
  for (double& e : eta) e = sdt * rng.normal();
  return eta;
}

/// H(sigma) dW2 for given scalar increments: profile(sigma) * sum_n c_n dW2_n e_n.
inline ScalarField multiplicative_field(const MultiplicativeNoiseSpec& spec, const CosineBasis& basis,
                                        const ScalarField& sigma, std::span<const double> scalars) {
  if (scalars.empty() || spec.c0 == 0.0) return ScalarField(sigma.grid());
  std::vector<double> coeffs(scalars.size());
  for (std::size_t n = 0; n < scalars.size(); ++n) coeffs[n] = spec.coefficient(static_cast<int>(n)) * scalars[n];
  ScalarField out = basis.synthesize(coeffs);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= MultiplicativeNoiseSpec::profile(sigma[i]);
  return out;
}

inline ScalarField apply_multiplicative_increment(const MultiplicativeNoiseSpec& spec, const CosineBasis& basis,
                                                  const ScalarField& sigma, double dt, RngStream& rng) {
  if (!(dt > 0.0)) throw Error(ErrorKind::ConfigInvalid, "dt must be positive");
  const auto eta = sample_multiplicative_scalars(spec, dt, rng);
  return multiplicative_field(spec, basis, sigma, eta);
}

inline constexpr std::uint32_t kAdditiveStream = 1;
inline constexpr std::uint32_t kMultiplicativeStream = 2;

/**
 * All noise increments of one sample path. W1 increments are stored as mode
 * coefficients (already scaled by g_j sqrt(dt)); W2 increments as per-mode
 * scalars sqrt(dt) eta_n since H(sigma) must be re-evaluated at the iterate
 * in use.
 */
struct NoisePath {
  std::uint64_t seed = 0;
  std::uint32_t path = 0;
  std::vector<std::vector<double>> w1;
  std::vector<std::vector<double>> w2;

  static NoisePath generate(const AdditiveNoiseSpec& add, const MultiplicativeNoiseSpec& mult, const CosineBasis& basis,
                            double dt, int n_steps, std::uint64_t seed, std::uint32_t path) {
    NoisePath p;
    p.seed = seed;
    p.path = path;
    RngStream r1(seed, path, kAdditiveStream);
    RngStream r2(seed, path, kMultiplicativeStream);
    p.w1.reserve(n_steps);
    p.w2.reserve(n_steps);
    for (int n = 0; n < n_steps; ++n) {
      p.w1.push_back(add.g0 > 0.0 ? sample_additive_coefficients(add, basis, dt, r1) : std::vector<double>{});
      p.w2.push_back(mult.c0 > 0.0 ? sample_multiplicative_scalars(mult, dt, r2) : std::vector<double>{});
    }
    return p;
  }

  /// A path with no noise for `n_steps` steps.
  static NoisePath silent(int n_steps) {
    NoisePath p;
    p.w1.assign(n_steps, {});
    p.w2.assign(n_steps, {});
    return p;
  }

  int n_steps() const { return static_cast<int>(w1.size()); }

  ScalarField additive(int step, const CosineBasis& basis) const {
    const auto& a = w1.at(step);
    if (a.empty()) return ScalarField(basis.grid());
    return basis.synthesize(a);
  }
};

namespace io {

/// Writes w1.bin / w2.bin as 2D tables (rows = steps, columns = modes) in the
/// field format plus a one-line meta file. Empty tables are omitted.
inline void save_noise_path(const std::filesystem::path& dir, const NoisePath& p) {
  std::filesystem::create_directories(dir);
  const auto save_table = [&](const std::vector<std::vector<double>>& t, const char* name) {
    const std::size_t cols = t.empty() ? 0 : t.front().size();
    if (cols == 0) return;
    Grid g;
    g.dim = 2;
    g.n = {static_cast<int>(t.size()), static_cast<int>(cols), 1};
    g.dx = {1.0, 1.0, 1.0};
    g.len = {static_cast<double>(t.size()), static_cast<double>(cols), 1.0};
    std::vector<double> v;
    v.reserve(t.size() * cols);
    for (const auto& row : t) v.insert(v.end(), row.begin(), row.end());
    save_field(dir / name, ScalarField(g, std::move(v)));
  };
  save_table(p.w1, "w1.bin");
  save_table(p.w2, "w2.bin");
  write_bytes(dir / "noise_meta.txt", "seed " + std::to_string(p.seed) + "\npath " + std::to_string(p.path) + "\nsteps " +
                                          std::to_string(p.n_steps()) + "\n");
}

inline NoisePath load_noise_path(const std::filesystem::path& dir) {
  NoisePath p;
  std::ifstream meta(dir / "noise_meta.txt");
  if (!meta) throw Error(ErrorKind::IoError, "missing " + (dir / "noise_meta.txt").string());
  std::string key;
  int steps = 0;
  meta >> key >> p.seed >> key >> p.path >> key >> steps;
  p.w1.assign(steps, {});
  p.w2.assign(steps, {});
  const auto load_table = [&](std::vector<std::vector<double>>& t, const char* name) {
    if (!std::filesystem::exists(dir / name)) return;
    const ScalarField f = load_field(dir / name);
    const int rows = f.grid().n[0], cols = f.grid().n[1];
    if (rows != steps) throw Error(ErrorKind::IoError, std::string(name) + ": step count mismatch");
    for (int r = 0; r < rows; ++r)
      t[r].assign(f.values().begin() + static_cast<std::ptrdiff_t>(r) * cols,
                  f.values().begin() + static_cast<std::ptrdiff_t>(r + 1) * cols);
  };
  load_table(p.w1, "w1.bin");
  load_table(p.w2, "w2.bin");
  return p;
}

}  // namespace io

}  // namespace stumor
