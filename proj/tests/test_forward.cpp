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

/// Pure Cahn-Hilliard: no reaction terms, no noise.
Small pure_ch(int cells = 32, int steps = 40) {
  Small s(cells, steps, 1e-3, 0.0);
  s.params.P = s.params.a = s.params.alpha = 0.0;
  s.params.A = 1e-2;
  s.config.validation_bypass = true;
  return s;
}

}  // namespace

TEST_CASE("constants are equilibria without sources", "[forward]") {
  Small s = pure_ch();
  const ScalarField phi0(s.grid, 0.3);
  const Trajectory tr = s.solver().simulate(phi0, s.sigma0, s.controls, NoisePath::silent(s.config.n_steps));
  CHECK(stumor::testing::max_abs_diff(tr.states[1].phi, phi0) < 1e-14);
  CHECK(stumor::testing::max_abs_diff(tr.states.back().phi, phi0) < 1e-13);
}

TEST_CASE("pure Cahn-Hilliard conserves mass", "[forward]") {
  Small s = pure_ch();
  const Trajectory tr = s.solver().simulate(s.phi0, s.sigma0, s.controls, NoisePath::silent(s.config.n_steps));
  for (const auto& st : tr.states) CHECK(mean(st.phi) == Approx(mean(s.phi0)).margin(1e-14));
}

TEST_CASE("saturated nutrient is a fixed point", "[forward]") {
  Small s(16, 20, 1e-2, 0.0);
  s.params.c = 0.0;
  s.config.validation_bypass = true;
  s.controls = ControlPair::constant(s.grid, 20, 0.3, 1.0);
  const Trajectory tr = s.solver().simulate(s.phi0, ScalarField(s.grid, 1.0), s.controls, NoisePath::silent(20));
  for (const auto& st : tr.states)
    for (double v : st.sigma.values()) CHECK(v == Approx(1.0).margin(1e-13));
}

TEST_CASE("nutrient stays in [0,1] without multiplicative noise", "[forward]") {
  std::mt19937_64 rng(21);
  Small s(32, 60, 5e-3, 0.1);
  s.params.c = 3.0;
  const StateSolver solver = s.solver();
  for (int run = 0; run < 5; ++run) {
    ControlPair c = ControlPair::constant(s.grid, 60, 0.0, 0.0);
    for (auto& f : c.u) f = stumor::testing::random_field(s.grid, rng, 0.0, 1.0);
    for (auto& f : c.w) f = stumor::testing::random_field(s.grid, rng, 0.0, 1.0);
    const ScalarField sigma0 = stumor::testing::random_field(s.grid, rng, 0.0, 1.0);
    const Trajectory tr = solver.simulate(s.phi0, sigma0, c, s.noise(run));
    for (const auto& d : tr.diagnostics) {
      CHECK(d.min_sigma >= -1e-12);
      CHECK(d.max_sigma <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("discrete mass identity with noise", "[forward]") {
  Small s(32, 200, 1e-3, 0.2);
  const Trajectory tr = s.solver().simulate(s.phi0, s.sigma0, s.controls, s.noise(5));
  for (int n = 1; n <= tr.n_steps(); ++n)
    CHECK(std::abs(tr.diagnostics[n].mass_residual) <= 1e-10 * (1.0 + norm(tr.states[n - 1].phi)));
}

TEST_CASE("energy decreases for source-free deterministic runs", "[forward]") {
  Small s = pure_ch(64, 200);
  s.phi0 = stumor::testing::cosine_profile(s.grid, 0.0, 0.8);
  s.sigma0 = ScalarField(s.grid, 0.5);
  s.controls = ControlPair::constant(s.grid, 200, 0.0, 0.0);
  for (double S : {2.0, 3.0}) {
    s.config.stabilization = S;
    const Trajectory tr = s.solver().simulate(s.phi0, s.sigma0, s.controls, NoisePath::silent(200));
    for (int n = 0; n < tr.n_steps(); ++n) CHECK(tr.diagnostics[n + 1].energy <= tr.diagnostics[n].energy + 1e-12);
  }
}

TEST_CASE("chemical potential is assembled from the state", "[forward]") {
  Small s(16, 5);
  const StateSolver solver = s.solver();
  const Trajectory tr = solver.simulate(s.phi0, s.sigma0, s.controls, s.noise());
  for (const auto& st : tr.states) CHECK(chemical_potential_residual(st.phi, st.mu, s.params, solver.potential()) == 0.0);
  for (int n = 0; n <= tr.n_steps(); ++n) CHECK(tr.states[n].t == Approx(n * s.config.dt).margin(1e-15));
  CHECK(tr.states[0].phi == s.phi0);
  CHECK(tr.states[0].sigma == s.sigma0);
}

TEST_CASE("same path gives bitwise identical trajectories", "[forward]") {
  Small s(16, 20);
  s.config.picard_max = 8;
  s.config.picard_tol = 1e-12;
  const StateSolver solver = s.solver();
  const Trajectory a = solver.simulate(s.phi0, s.sigma0, s.controls, s.noise(3));
  const Trajectory b = solver.simulate(s.phi0, s.sigma0, s.controls, s.noise(3));
  for (int n = 0; n <= a.n_steps(); ++n) {
    CHECK(a.states[n].phi == b.states[n].phi);
    CHECK(a.states[n].sigma == b.states[n].sigma);
  }
}

TEST_CASE("coupling sweeps contract", "[forward]") {
  Small s(32, 10, 1e-2, 0.05);
  s.params.c = 2.0;
  s.params.P = 2.0;
  s.config.picard_max = 30;
  s.config.picard_tol = 1e-13;
  const Trajectory tr = s.solver().simulate(s.phi0, s.sigma0, s.controls, s.noise());
  for (const auto& rec : tr.steps) {
    REQUIRE(rec.picard_residuals.size() >= 2);
    for (std::size_t k = 1; k < rec.picard_residuals.size(); ++k)
      CHECK(rec.picard_residuals[k] < rec.picard_residuals[k - 1]);
    CHECK(rec.picard_residuals.back() < 1e-13);
  }

  s.config.picard_max = 2;
  s.config.picard_tol = 1e-300;
  try {
    (void)s.solver().simulate(s.phi0, s.sigma0, s.controls, s.noise());
    FAIL("expected PicardNoConvergence");
  } catch (const SolverError& e) {
    CHECK(e.kind() == ErrorKind::PicardNoConvergence);
    CHECK(e.step() == 0);
  }
}

TEST_CASE("first-order convergence in time", "[forward]") {
  // A wide interface keeps spinodal growth mild, so differences measure the time error.
  Small s(32, 10, 1e-2, 0.0);
  s.params.A = 0.05;
  std::vector<ScalarField> finals;
  for (int level = 0; level < 4; ++level) {
    const int steps = 20 << level;
    s.config.dt = 0.1 / steps;
    s.config.n_steps = steps;
    s.controls = ControlPair::constant(s.grid, steps, 0.5, 0.5);
    finals.push_back(s.solver().simulate(s.phi0, s.sigma0, s.controls, NoisePath::silent(steps)).states.back().phi);
  }
  const double e0 = norm(finals[0] - finals[1]), e1 = norm(finals[1] - finals[2]), e2 = norm(finals[2] - finals[3]);
  CHECK(std::log2(e0 / e1) >= 0.9);
  CHECK(std::log2(e1 / e2) >= 0.9);
}

TEST_CASE("Yosida runs approach the plain run", "[forward]") {
  Small s(32, 50, 1e-3, 0.05);
  s.phi0 = stumor::testing::cosine_profile(s.grid, 0.2, 0.9);
  const StateSolver solver = s.solver();
  const auto rows = yosida_convergence_study(solver, s.phi0, s.sigma0, s.controls, s.noise(), {1e-1, 1e-2, 1e-3});
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].gap <= rows[0].gap);
  CHECK(rows[2].gap <= rows[1].gap);
  CHECK(rows[2].gap < 1e-3);
  const auto big = yosida_convergence_study(solver, s.phi0, s.sigma0, s.controls, s.noise(), {1e3});
  CHECK(big[0].gap > 0.0);
  CHECK(std::isfinite(big[0].gap));
  const auto again = yosida_convergence_study(solver, s.phi0, s.sigma0, s.controls, s.noise(), {1e-2, 1e-2 * 0.999});
  CHECK(again[0].gap == rows[1].gap);
  CHECK_THROWS_AS(yosida_convergence_study(solver, s.phi0, s.sigma0, s.controls, s.noise(), {1e-2, 1e-1}), Error);
}

TEST_CASE("clamping records the removed mass", "[forward]") {
  Small s(32, 20, 1e-2, 0.0);
  s.multiplicative = {4.0, 0.5, 4};
  s.config.clamp_sigma = true;
  const StateSolver solver = s.solver();
  ScalarField sigma0(s.grid);
  for (std::size_t i = 0; i < sigma0.size(); ++i) sigma0[i] = i < 16 ? 0.02 : 0.98;
  const Trajectory tr = solver.simulate(s.phi0, sigma0, s.controls, s.noise(8));
  double clamped = 0.0;
  for (const auto& d : tr.diagnostics) {
    clamped += d.clamped_mass;
    CHECK(d.min_sigma >= 0.0);
    CHECK(d.max_sigma <= 1.0);
  }
  CHECK(clamped > 0.0);
}

TEST_CASE("inputs violating the model assumptions are rejected", "[forward]") {
  Small s(16, 4);
  const StateSolver solver = s.solver();
  const auto expect_kind = [](auto&& fn, ErrorKind k) {
    try {
      fn();
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == k);
    }
  };
  expect_kind([&] { (void)solver.simulate(s.phi0, ScalarField(s.grid, 1.5), s.controls, s.noise()); },
              ErrorKind::ConfigInvalid);
  expect_kind([&] {
    (void)solver.simulate(s.phi0, s.sigma0, ControlPair::constant(s.grid, 4, 1.2, 0.0), s.noise());
  }, ErrorKind::ConfigInvalid);
  expect_kind([&] { (void)solver.simulate(s.phi0, s.sigma0, ControlPair::constant(s.grid, 3, 0.5, 0.5), s.noise()); },
              ErrorKind::StepMismatch);
  expect_kind([&] { (void)solver.simulate(ScalarField(Grid::line(8, 1.0)), s.sigma0, s.controls, s.noise()); },
              ErrorKind::GridMismatch);
  expect_kind([&] { (void)solver.simulate(s.phi0, s.sigma0, s.controls, NoisePath::silent(2)); }, ErrorKind::StepMismatch);

  ModelParams bad;
  bad.P = 0.0;
  expect_kind([&] { StateSolver(s.grid, bad, PotentialSpec{}, s.additive, s.multiplicative, s.config); },
              ErrorKind::ConfigInvalid);
}

TEST_CASE("two-dimensional runs", "[forward]") {
  const Grid g = Grid::square(12, 1.0);
  SolverConfig c;
  c.dt = 1e-3;
  c.n_steps = 10;
  const StateSolver solver(g, ModelParams{}, PotentialSpec{}, AdditiveNoiseSpec{0.05, 2.0, 10},
                           MultiplicativeNoiseSpec{}, c);
  const auto noise = NoisePath::generate(solver.additive_noise(), {}, solver.basis(), c.dt, 10, 2, 0);
  const Trajectory tr = solver.simulate(stumor::testing::cosine_profile(g, 0.0, 0.6), ScalarField(g, 0.4),
                                        ControlPair::constant(g, 10, 0.2, 0.8), noise);
  for (int n = 1; n <= 10; ++n) {
    CHECK(std::abs(tr.diagnostics[n].mass_residual) < 1e-10);
    CHECK(tr.diagnostics[n].min_sigma >= -1e-12);
  }
}
