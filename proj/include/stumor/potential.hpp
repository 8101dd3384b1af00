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
 * @file potential.hpp
 * @brief Quartic double-well potential, its Yosida regularization and the
 *        proliferation ramp h.
 *
 * With C2 >= 1 the map gamma(x) = psi'(x) + C2 x = x^3 + (C2 - 1) x is
 * monotone, and the regularized derivative is
 *
 *     psi'_lambda(r) = gamma_lambda(r) - C2 r,
 *     gamma_lambda(r) = (r - x) / lambda,   x + lambda gamma(x) = r.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "stumor/error.hpp"

namespace stumor {

struct PotentialSpec {
  enum class Kind { quartic };
  Kind kind = Kind::quartic;
  // Growth/convexity constants recorded for validation. C3 drives no computation.
  double C1 = 1.0;
  double C2 = 1.0;
  double C3 = 1.0;
  double C4 = 6.0;
};

inline double psi(double r) {
  const double q = r * r - 1.0;
  return 0.25 * q * q;
}
inline double psi_prime(double r) { return r * r * r - r; }
inline double psi_pp(double r) { return 3.0 * r * r - 1.0; }
inline double psi_ppp(double r) { return 6.0 * r; }

/// Proliferation ramp clamp((r+1)/2, 0, 1); Lipschitz constant 1/2.
inline double h(double r) { return std::clamp(0.5 * (r + 1.0), 0.0, 1.0); }

/// a.e. derivative of h; the kinks r = -1 and r = 1 take the value 1/2.
inline double h_prime(double r) { return (r >= -1.0 && r <= 1.0) ? 0.5 : 0.0; }

inline constexpr double kProliferationLipschitz = 0.5;

/// gamma(x) = psi'(x) + C2 x for the quartic.
inline double yosida_gamma(double x, double c2 = 1.0) { return x * x * x + (c2 - 1.0) * x; }

/**
 * Resolvent x = (I + lambda gamma)^{-1}(r): safeguarded Newton on
 * x + lambda gamma(x) = r inside the bracket [min(0,r), max(0,r)].
 */
inline double yosida_resolvent(double r, double lambda, double c2 = 1.0) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::Unsupported, "Yosida parameter must be positive");
  if (r == 0.0) return 0.0;
  double lo = std::min(0.0, r);
  double hi = std::max(0.0, r);
  const auto f = [&](double x) { return x + lambda * yosida_gamma(x, c2) - r; };
  const auto df = [&](double x) { return 1.0 + lambda * (3.0 * x * x + (c2 - 1.0)); };
  // Start from the cheaper of the two asymptotic guesses.
  double x = std::abs(r) < 1.0 / std::sqrt(lambda) ? r / (1.0 + lambda * (c2 - 1.0)) : std::cbrt(r / lambda);
  x = std::clamp(x, lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if (fx > 0.0) hi = x; else lo = x;
    double next = x - fx / df(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-14 * std::max(1.0, std::abs(x)) || hi - lo <= 1e-14 * std::max(1.0, std::abs(x))) {
      return next;
    }
    x = next;
  }
  throw Error(ErrorKind::NoConvergence, "Yosida resolvent failed for r = " + std::to_string(r));
}

inline double yosida_gamma_lambda(double r, double lambda, double c2 = 1.0) {
  return (r - yosida_resolvent(r, lambda, c2)) / lambda;
}

inline double yosida_psi_prime(double r, double lambda, double c2 = 1.0) {
  return yosida_gamma_lambda(r, lambda, c2) - c2 * r;
}

/// d/dr psi'_lambda(r) = gamma'(x) / (1 + lambda gamma'(x)) - C2.
inline double yosida_psi_pp(double r, double lambda, double c2 = 1.0) {
  const double x = yosida_resolvent(r, lambda, c2);
  const double g1 = 3.0 * x * x + (c2 - 1.0);
  return g1 / (1.0 + lambda * g1) - c2;
}

/// psi' and psi'' as seen by the solver: plain, or Yosida-regularized.
struct Potential {
  PotentialSpec spec{};
  std::optional<double> yosida_lambda{};

  double d1(double r) const { return yosida_lambda ? yosida_psi_prime(r, *yosida_lambda, spec.C2) : psi_prime(r); }
  double d2(double r) const { return yosida_lambda ? yosida_psi_pp(r, *yosida_lambda, spec.C2) : psi_pp(r); }
};

/// Checks the configured constants against the quartic: psi'' >= -C2 needs
/// C2 >= 1 and |psi'''| <= C4 (1 + |r|) needs C4 >= 6.
inline void validate(const PotentialSpec& spec) {
  if (!(spec.C2 >= 1.0)) throw Error(ErrorKind::ConfigInvalid, "A2: quartic potential needs C2 >= 1");
  if (!(spec.C4 >= 6.0)) throw Error(ErrorKind::ConfigInvalid, "A2: quartic potential needs C4 >= 6");
  if (!(spec.C1 > 0.0) || !(spec.C3 > 0.0)) throw Error(ErrorKind::ConfigInvalid, "A2: C1 and C3 must be positive");
}

/// Smallest C1 with |psi''(r)| <= C1 (1 + |psi'(r)|) over `samples` points of [-range, range].
inline double minimal_growth_constant(double range, int samples = 10001) {
  double c1 = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double r = -range + 2.0 * range * i / (samples - 1);
    c1 = std::max(c1, std::abs(psi_pp(r)) / (1.0 + std::abs(psi_prime(r))));
  }
  return c1;
}

}  // namespace stumor
