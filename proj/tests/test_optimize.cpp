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

#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>

#include "support.hpp"

using namespace stumor;
using stumor::testing::Small;
using Catch::Approx;

namespace {

ControlProblem make_problem(const Small& s, int paths, int threads = 1) {
  const StateSolver solver = s.solver();
  return ControlProblem(solver, s.phi0, s.sigma0, s.cost, make_ensemble(solver, 77, paths), threads);
}

ControlPair random_controls(const Grid& g, int N, std::mt19937_64& rng) {
  ControlPair c = ControlPair::constant(g, N, 0, 0);
  for (int n = 0; n < N; ++n) {
    c.u[n] = stumor::testing::random_field(g, rng, 0, 1);
    c.w[n] = stumor::testing::random_field(g, rng, 0, 1);
  }
  return c;
}

double max_abs_diff(const ControlPair& a, const ControlPair& b) {
  double m = 0.0;
  for (int n = 0; n < a.n_steps(); ++n)
    m = std::max({m, stumor::testing::max_abs_diff(a.u[n], b.u[n]), stumor::testing::max_abs_diff(a.w[n], b.w[n])});
  return m;
}

}  // namespace

TEST_CASE("box projection", "[optimize]") {
  const Grid g = Grid::line(4, 1.0);
  ScalarField f(g);
  f[0] = -0.5;
  f[1] = 0.3;
  f[2] = 1.7;
  f[3] = 1.0;
  const ScalarField p = project_box(f);
  CHECK(p[0] == 0.0);
  CHECK(p[1] == 0.3);
  CHECK(p[2] == 1.0);
  CHECK(p[3] == 1.0);
  CHECK(project_box(p) == p);

  std::mt19937_64 rng(41);
  const Grid g2 = Grid::line(16, 1.0);
  for (int i = 0; i < 200; ++i) {
    const ScalarField a = stumor::testing::random_field(g2, rng, -2, 3), b = stumor::testing::random_field(g2, rng, -2, 3);
    CHECK(norm(project_box(a) - project_box(b)) <= norm(a - b) + 1e-15);
    CHECK(project_box(project_box(a)) == project_box(a));
  }
}

TEST_CASE("KKT residual by hand", "[optimize]") {
  // Only the w-slice at cells 0 and 1 is not a fixed point of the projected step.
  const Grid g = Grid::line(4, 1.0);
  ControlPair c = ControlPair::constant(g, 1, 0.0, 0.5);
  c.u[0][1] = 1.0;
  ControlPair gr = ControlPair::constant(g, 1, 0.0, 0.0);
  gr.u[0][0] = 1.0;
  gr.u[0][1] = -1.0;
  gr.w[0][0] = 0.2;
  gr.w[0][1] = -0.4;
  CHECK(kkt_residual(c, gr, 0.1) == Approx(std::sqrt(0.1 * 0.25 * (0.04 + 0.16))).epsilon(1e-14));
  CHECK(kkt_residual(c, ControlPair::constant(g, 1, 0, 0), 0.1) == 0.0);
}

TEST_CASE("drug gradient is the Tikhonov term without drug effect", "[optimize]") {
  std::mt19937_64 rng(42);
  Small s(16, 6);
  s.params.alpha = 0.0;
  s.config.validation_bypass = true;
  const ControlProblem prob = make_problem(s, 3);
  const ControlPair c = random_controls(s.grid, 6, rng);
  const GradientResult gr = prob.gradient(c);
  for (int n = 0; n < 6; ++n) CHECK(stumor::testing::max_abs_diff(gr.g.u[n], c.u[n] * s.cost.beta4) == 0.0);
}

TEST_CASE("pure control penalty is minimized at zero", "[optimize]") {
  Small s(16, 6);
  s.cost.beta1 = s.cost.beta2 = s.cost.beta3 = 0.0;
  const ControlProblem prob = make_problem(s, 2);
  const auto [c, rep] = projected_gradient_descent(prob, s.controls);
  CHECK(rep.converged);
  CHECK(rep.iterates.size() <= 3u);
  CHECK(max_abs_diff(c, ControlPair::constant(s.grid, 6, 0, 0)) == 0.0);
  CHECK(rep.kkt == 0.0);
}

TEST_CASE("descent iterates decrease the cost and satisfy first-order conditions", "[optimize]") {
  std::mt19937_64 rng(43);
  const Small s(16, 10);
  const ControlProblem prob = make_problem(s, 4);
  OptimOptions opt;
  opt.tol_kkt = 1e-8;
  const auto [c, rep] = projected_gradient_descent(prob, s.controls, opt);
  REQUIRE(rep.converged);
  for (std::size_t i = 1; i < rep.iterates.size(); ++i) CHECK(rep.iterates[i].J <= rep.iterates[i - 1].J);
  CHECK(rep.ensemble_size == 4u);
  CHECK(rep.projection_u <= 1e-6);
  CHECK(rep.projection_w <= 1e-6);

  const GradientResult gr = prob.gradient(c);
  for (int i = 0; i < 100; ++i) {
    const ControlPair v = random_controls(s.grid, 10, rng);
    CHECK(control_inner(gr.g, v - c, prob.dt()) >= -1e-7);
  }
}

TEST_CASE("noise-free gradient does not depend on the ensemble size", "[optimize]") {
  std::mt19937_64 rng(44);
  Small s(16, 6);
  s.additive.g0 = 0.0;
  const ControlPair c = random_controls(s.grid, 6, rng);
  const GradientResult g1 = make_problem(s, 1).gradient(c);
  const GradientResult g5 = make_problem(s, 5).gradient(c);
  CHECK(g5.cost.mean == Approx(g1.cost.mean).epsilon(1e-14));
  CHECK(g5.cost.std_error == 0.0);
  CHECK(max_abs_diff(g1.g, g5.g) <= 1e-14);
}

TEST_CASE("adjoint gradient agrees with finite differences", "[optimize]") {
  std::mt19937_64 rng(45);
  const Small s(16, 8);
  const ControlProblem prob = make_problem(s, 3);
  std::vector<ControlPair> dirs;
  for (int i = 0; i < 4; ++i) {
    ControlPair d = random_controls(s.grid, 8, rng);
    d.axpy(-1.0, ControlPair::constant(s.grid, 8, 0.5, 0.5));
    dirs.push_back(d);
  }
  for (const auto& row : gradient_fd_check(prob, s.controls, dirs, 1e-4)) CHECK(row.rel_error <= 1e-6);
}

TEST_CASE("threaded evaluation is order independent", "[optimize]") {
  std::vector<int> out(100, -1);
  parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));

  try {
    parallel_for(20, 3, [](std::size_t i) {
      if (i == 7 || i == 13) throw std::runtime_error(std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "7");
  }

  std::mt19937_64 rng(46);
  const Small s(16, 6);
  ControlProblem prob = make_problem(s, 5);
  const ControlPair c = random_controls(s.grid, 6, rng);
  const GradientResult a = prob.gradient(c);
  prob.set_threads(3);
  const GradientResult b = prob.gradient(c);
  CHECK(a.cost.mean == b.cost.mean);
  CHECK(max_abs_diff(a.g, b.g) == 0.0);
}

TEST_CASE("ensemble construction", "[optimize]") {
  const Small s(16, 4);
  const StateSolver solver = s.solver();
  CHECK_THROWS_AS(make_ensemble(solver, 1, 0), Error);
  const auto e = make_ensemble(solver, 5, 3);
  REQUIRE(e.size() == 3u);
  for (std::uint32_t m = 0; m < 3; ++m) {
    CHECK(e[m].seed == 5u);
    CHECK(e[m].path == m);
    CHECK(e[m].w1 == s.noise(5, m).w1);
  }
  CHECK_THROWS_AS(ControlProblem(solver, s.phi0, s.sigma0, s.cost, {}), Error);
}
