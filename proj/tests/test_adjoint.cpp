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
using stumor::testing::Small;
using Catch::Approx;

namespace {

std::vector<ScalarField> random_forcing(const Grid& g, int N, std::mt19937_64& rng) {
  std::vector<ScalarField> out;
  for (int n = 0; n < N; ++n) out.push_back(stumor::testing::random_field(g, rng));
  return out;
}

std::vector<ScalarField> zeros(const Grid& g, int N) { return std::vector<ScalarField>(N, ScalarField(g)); }

}  // namespace

TEST_CASE("discrete duality holds to rounding", "[adjoint]") {
  std::mt19937_64 rng(31);
  Small s(16, 8);
  s.config.picard_max = 8;
  s.config.picard_tol = 1e-12;
  const StateSolver solver = s.solver();
  const Trajectory tr = solver.simulate(s.phi0, s.sigma0, s.controls, s.noise(2));
  for (int trial = 0; trial < 20; ++trial) {
    const auto r = duality_check(solver, tr, s.cost, random_forcing(s.grid, 8, rng), random_forcing(s.grid, 8, rng));
    CHECK(r.gap <= 1e-10);
  }
}

TEST_CASE("duality gap is scale invariant in the forcing", "[adjoint]") {
  std::mt19937_64 rng(32);
  const Small s(16, 8);
  const StateSolver solver = s.solver();
  const Trajectory tr = solver.simulate(s.phi0, s.sigma0, s.controls, s.noise());
  auto g1 = random_forcing(s.grid, 8, rng), g2 = random_forcing(s.grid, 8, rng);
  const auto base = duality_check(solver, tr, s.cost, g1, g2);
  for (auto& f : g1) f *= 1e3;
  for (auto& f : g2) f *= 1e3;
  const auto big = duality_check(solver, tr, s.cost, g1, g2);
  CHECK(big.lhs == Approx(1e3 * base.lhs).epsilon(1e-12));
  CHECK(big.gap <= 1e-10);

  const auto zero = duality_check(solver, tr, s.cost, zeros(s.grid, 8), zeros(s.grid, 8));
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);
  CHECK(zero.gap == 0.0);
}

TEST_CASE("terminal costate", "[adjoint]") {
  const Small s(16, 5);
  const StateSolver solver = s.solver();
  const Trajectory tr = solver.simulate(s.phi0, s.sigma0, s.controls, s.noise());
  const AdjointSolution adj = solve_adjoint(solver, tr, s.cost);
  REQUIRE(adj.states.size() == 6u);
  REQUIRE(adj.steps.size() == 5u);
  const ScalarField& phiN = tr.states[5].phi;
  for (std::size_t i = 0; i < phiN.size(); ++i) {
    CHECK(adj.states[5].pi[i] == Approx(s.cost.beta2 * (phiN[i] + 0.5) + 0.5 * s.cost.beta3).epsilon(1e-15));
    CHECK(adj.states[5].rho[i] == 0.0);
  }
  for (int n = 0; n <= 5; ++n) {
    CHECK(stumor::testing::max_abs_diff(adj.states[n].pi_tilde, neg_laplacian(adj.states[n].pi)) == 0.0);
    CHECK(adj.states[n].t == Approx(n * s.config.dt));
  }
}

TEST_CASE("zero weights give a zero costate", "[adjoint]") {
  Small s(16, 6);
  s.cost.beta1 = s.cost.beta2 = s.cost.beta3 = 0.0;
  const StateSolver solver = s.solver();
  const Trajectory tr = solver.simulate(s.phi0, s.sigma0, s.controls, s.noise());
  const AdjointSolution adj = solve_adjoint(solver, tr, s.cost);
  for (const auto& st : adj.states) {
    CHECK(norm(st.pi) == 0.0);
    CHECK(norm(st.rho) == 0.0);
  }
  for (const auto& sp : adj.steps) {
    CHECK(norm(sp.h_pi) == 0.0);
    CHECK(norm(sp.rho_src) == 0.0);
  }
}

TEST_CASE("costate is linear in the cost weights", "[adjoint]") {
  const Small s(16, 6);
  const StateSolver solver = s.solver();
  const Trajectory tr = solver.simulate(s.phi0, s.sigma0, s.controls, s.noise());
  const auto only = [&](int which) {
    CostSpec c = s.cost;
    c.beta1 = which == 1 ? s.cost.beta1 : 0.0;
    c.beta2 = which == 2 ? s.cost.beta2 : 0.0;
    c.beta3 = which == 3 ? s.cost.beta3 : 0.0;
    return solve_adjoint(solver, tr, c);
  };
  const AdjointSolution full = solve_adjoint(solver, tr, s.cost);
  const AdjointSolution a1 = only(1), a2 = only(2), a3 = only(3);
  for (int n = 0; n <= 6; ++n) {
    const ScalarField sum = a1.states[n].pi + a2.states[n].pi + a3.states[n].pi;
    CHECK(stumor::testing::max_abs_diff(sum, full.states[n].pi) <= 1e-13);
    const ScalarField rsum = a1.states[n].rho + a2.states[n].rho + a3.states[n].rho;
    CHECK(stumor::testing::max_abs_diff(rsum, full.states[n].rho) <= 1e-13);
  }
}

TEST_CASE("backward sweep is reproducible", "[adjoint]") {
  const Small s(16, 6);
  const StateSolver solver = s.solver();
  const Trajectory tr = solver.simulate(s.phi0, s.sigma0, s.controls, s.noise());
  const AdjointSolution a = solve_adjoint(solver, tr, s.cost), b = solve_adjoint(solver, tr, s.cost);
  for (int n = 0; n <= 6; ++n) {
    CHECK(a.states[n].pi == b.states[n].pi);
    CHECK(a.states[n].rho == b.states[n].rho);
  }
  AdjointState next = a.states[6];
  for (int n = 5; n >= 0; --n) {
    auto [st, sens] = adjoint_step_backward(solver, tr, n, next, s.cost);
    CHECK(st.pi == a.states[n].pi);
    CHECK(sens.h_pi == a.steps[n].h_pi);
    next = st;
  }
}

TEST_CASE("nutrient costate vanishes without proliferation", "[adjoint]") {
  // With P = 0 the phase costate has no route into the nutrient costate.
  Small s(16, 6, 1e-3, 0.0);
  s.params.P = 0.0;
  s.config.validation_bypass = true;
  const StateSolver solver = s.solver();
  const Trajectory tr = solver.simulate(s.phi0, s.sigma0, s.controls, NoisePath::silent(6));
  const AdjointSolution adj = solve_adjoint(solver, tr, s.cost);
  for (const auto& st : adj.states) CHECK(norm(st.rho) == 0.0);
  for (const auto& sp : adj.steps) CHECK(norm(sp.rho_src) == 0.0);
}

TEST_CASE("adjoint needs additive-only noise", "[adjoint]") {
  Small s(16, 4);
  s.multiplicative = {0.3, 0.5, 2};
  const StateSolver solver = s.solver();
  const Trajectory tr = solver.simulate(s.phi0, s.sigma0, s.controls, s.noise());
  try {
    (void)solve_adjoint(solver, tr, s.cost);
    FAIL("expected Unsupported");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Unsupported);
  }
}
