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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace stumor;
using Catch::Approx;

TEST_CASE("quartic values", "[potential]") {
  CHECK(psi(1.0) == 0.0);
  CHECK(psi(-1.0) == 0.0);
  CHECK(psi(0.0) == 0.25);
  CHECK(psi_prime(0.0) == 0.0);
  for (double r = -3.0; r <= 3.0; r += 0.01) CHECK(psi_pp(r) >= -1.0);
}

TEST_CASE("quartic derivatives match central differences", "[potential]") {
  const double h = 1e-5;
  for (double r : {-2.3, -1.0, -0.4, 0.0, 0.7, 1.9}) {
    CHECK(psi_prime(r) == Approx((psi(r + h) - psi(r - h)) / (2 * h)).margin(1e-8));
    CHECK(psi_pp(r) == Approx((psi_prime(r + h) - psi_prime(r - h)) / (2 * h)).margin(1e-8));
    CHECK(psi_ppp(r) == Approx((psi_pp(r + h) - psi_pp(r - h)) / (2 * h)).margin(1e-8));
  }
}

TEST_CASE("growth bounds of the quartic", "[potential]") {
  for (double r = -5.0; r <= 5.0; r += 0.013) CHECK(std::abs(psi_ppp(r)) <= 6.0 * (1.0 + std::abs(r)));
  const double c1 = minimal_growth_constant(2.0);
  CHECK(c1 > 0.0);
  for (double r = -2.0; r <= 2.0; r += 0.01) CHECK(std::abs(psi_pp(r)) <= c1 * (1.0 + std::abs(psi_prime(r))) + 1e-12);
  CHECK_NOTHROW(validate(PotentialSpec{}));
  PotentialSpec bad;
  bad.C2 = 0.5;
  CHECK_THROWS_AS(validate(bad), Error);
  bad = PotentialSpec{};
  bad.C4 = 5.0;
  CHECK_THROWS_AS(validate(bad), Error);
}

TEST_CASE("proliferation ramp", "[potential]") {
  CHECK(h(-1.0) == 0.0);
  CHECK(h(1.0) == 1.0);
  CHECK(h(0.0) == 0.5);
  CHECK(h(5.0) == 1.0);
  CHECK(h(-3.0) == 0.0);
  CHECK(h_prime(0.3) == 0.5);
  CHECK(h_prime(-1.0) == 0.5);
  CHECK(h_prime(1.0) == 0.5);
  CHECK(h_prime(1.5) == 0.0);
  double prev = h(-4.0);
  for (double r = -4.0; r <= 4.0; r += 0.01) {
    CHECK(h(r) >= prev);
    CHECK(h(r) >= 0.0);
    CHECK(h(r) <= 1.0);
    prev = h(r);
  }
}

TEST_CASE("Yosida regularization", "[potential]") {
  CHECK(yosida_psi_prime(0.0, 0.1) == 0.0);
  CHECK(yosida_psi_prime(0.0, 7.0) == 0.0);
  // x + x^3 = 2 has the root x = 1.
  CHECK(yosida_resolvent(2.0, 1.0) == Approx(1.0).epsilon(1e-14));
  CHECK(yosida_gamma_lambda(2.0, 1.0) == Approx(1.0).epsilon(1e-14));
  CHECK(yosida_psi_prime(2.0, 1.0) == Approx(-1.0).epsilon(1e-14));

  for (double r : {-1.7, -0.3, 0.4, 1.2, 2.5}) {
    double prev = std::abs(yosida_psi_prime(r, 1e-1) - psi_prime(r));
    for (double lam : {1e-2, 1e-3, 1e-4}) {
      const double d = std::abs(yosida_psi_prime(r, lam) - psi_prime(r));
      CHECK(d <= prev);
      prev = d;
    }
    // first-order gap lambda * gamma(r) * gamma'(r)
    CHECK(prev < 1e-3 * (1.0 + std::pow(std::abs(r), 5)));
  }
}

TEST_CASE("Yosida approximation is monotone, Lipschitz and contractive", "[potential]") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(-4.0, 4.0);
  for (double lam : {1e-1, 1e-2, 1e-3}) {
    for (int k = 0; k < 10000; ++k) {
      const double a = d(rng), b = d(rng);
      const double ga = yosida_gamma_lambda(a, lam), gb = yosida_gamma_lambda(b, lam);
      CHECK((ga - gb) * (a - b) >= -1e-12);
      CHECK(std::abs(ga - gb) <= std::abs(a - b) / lam * (1.0 + 1e-10) + 1e-12);
      CHECK(std::abs(ga) <= std::abs(yosida_gamma(a)) + 1e-12);
      CHECK(((ga > 0) - (ga < 0)) == ((yosida_gamma(a) > 0) - (yosida_gamma(a) < 0)));
    }
  }
}

TEST_CASE("regularized second derivative matches differences", "[potential]") {
  const double h = 1e-6;
  for (double lam : {1e-1, 1e-2}) {
    for (double r : {-2.0, -0.6, 0.1, 0.9, 3.0}) {
      const double fd = (yosida_psi_prime(r + h, lam) - yosida_psi_prime(r - h, lam)) / (2 * h);
      CHECK(yosida_psi_pp(r, lam) == Approx(fd).margin(1e-6));
    }
  }
  const Potential plain{}, reg{PotentialSpec{}, 0.05};
  CHECK(plain.d1(0.7) == psi_prime(0.7));
  CHECK(reg.d1(0.7) == yosida_psi_prime(0.7, 0.05));
  CHECK(reg.d2(0.7) == yosida_psi_pp(0.7, 0.05));
}
