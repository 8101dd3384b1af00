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

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <random>

#include "support.hpp"

using namespace stumor;

namespace {

template <class T>
T read_at(const std::vector<char>& b, std::size_t off) {
  T v;
  std::memcpy(&v, b.data() + off, sizeof(T));
  return v;
}

std::filesystem::path scratch_dir(const char* name) {
  auto p = std::filesystem::temp_directory_path() / "stumor_tests" / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("binary header layout", "[io]") {
  const int n[] = {5, 4};
  const double len[] = {1.0, 2.0};
  const Grid g = Grid::make(n, len);
  ScalarField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 0.1 * static_cast<double>(i) - 1.0;
  const auto buf = io::encode_field(f);
  REQUIRE(buf.size() == 32 + 8 * 20);
  CHECK(std::string(buf.data(), 4) == "SCHF");
  CHECK(read_at<std::uint32_t>(buf, 4) == 2u);
  CHECK(read_at<std::uint32_t>(buf, 8) == 5u);
  CHECK(read_at<std::uint32_t>(buf, 12) == 4u);
  CHECK(read_at<double>(buf, 16) == 0.2);
  CHECK(read_at<double>(buf, 24) == 0.5);
  CHECK(read_at<double>(buf, 32) == f[0]);
  CHECK(read_at<double>(buf, 32 + 8 * 19) == f[19]);
}

TEST_CASE("1D and 3D headers", "[io]") {
  const ScalarField f1(Grid::line(6, 3.0), 2.0);
  const auto b1 = io::encode_field(f1);
  CHECK(read_at<std::uint32_t>(b1, 12) == 1u);
  CHECK(read_at<double>(b1, 24) == 1.0);

  const int n[] = {4, 5, 6};
  const double len[] = {1.0, 1.0, 1.5};
  const ScalarField f3(Grid::make(n, len), -0.5);
  const auto b3 = io::encode_field(f3);
  REQUIRE(b3.size() == 48 + 8 * 120);
  CHECK(read_at<std::uint32_t>(b3, 32) == 6u);
  CHECK(read_at<std::uint32_t>(b3, 36) == 0u);
  CHECK(read_at<double>(b3, 40) == 0.25);
  CHECK(io::decode_field(b3) == f3);
}

TEST_CASE("round trip is bitwise", "[io]") {
  std::mt19937_64 rng(9);
  const ScalarField f = stumor::testing::random_field(Grid::square(9, 0.3), rng, -1e3, 1e3);
  const auto dir = scratch_dir("roundtrip");
  io::save_field(dir / "f.bin", f);
  const ScalarField back = io::load_field(dir / "f.bin");
  CHECK(back == f);
  CHECK(back.grid() == f.grid());
}

TEST_CASE("corrupt files are rejected", "[io]") {
  const ScalarField f(Grid::line(8, 1.0), 1.0);
  auto buf = io::encode_field(f);
  auto truncated = buf;
  truncated.pop_back();
  CHECK_THROWS_AS(io::decode_field(truncated), Error);
  auto bad_magic = buf;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(io::decode_field(bad_magic), Error);
  CHECK_THROWS_AS(io::decode_field(std::vector<char>(10, 0)), Error);
  try {
    (void)io::load_field("/nonexistent/stumor/field.bin");
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IoError);
  }
}

TEST_CASE("CSV export", "[io]") {
  const int n[] = {4, 4};
  const double len[] = {1.0, 1.0};
  ScalarField f(Grid::make(n, len));
  f[5] = 0.1;
  const std::string csv = io::field_to_csv(f);
  CHECK(csv.rfind("i,j,value\n0,0,0\n", 0) == 0);
  CHECK(csv.find("1,1,0.10000000000000001\n") != std::string::npos);
  CHECK(io::format_double(1.0 / 3.0) == "0.33333333333333331");
  CHECK(std::strtod(io::format_double(0.1).c_str(), nullptr) == 0.1);
}

TEST_CASE("noise path replay", "[io]") {
  const stumor::testing::Small s(16, 6);
  MultiplicativeNoiseSpec mult{0.3, 0.5, 3};
  const StateSolver solver(s.grid, s.params, PotentialSpec{}, s.additive, mult, s.config);
  const NoisePath p = NoisePath::generate(s.additive, mult, solver.basis(), s.config.dt, 6, 42, 3);
  const auto dir = scratch_dir("noise");
  io::save_noise_path(dir, p);
  const NoisePath q = io::load_noise_path(dir);
  CHECK(q.seed == 42);
  CHECK(q.path == 3);
  CHECK(q.w1 == p.w1);
  CHECK(q.w2 == p.w2);
}
