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
 * @file field_io.hpp
 * @brief Binary and CSV serialization of ScalarField.
 *
 * Binary layout (all little-endian):
 *
 *   offset  size  content
 *        0     4  magic "SCHF"
 *        4     4  uint32 dim (1, 2 or 3)
 *        8     4  uint32 n0
 *       12     4  uint32 n1  (1 when dim == 1)
 *       16     8  float64 dx0
 *       24     8  float64 dx1 (1.0 when dim == 1)
 *   -- dim == 3 only: 16-byte extension --
 *       32     4  uint32 n2
 *       36     4  zero padding
 *       40     8  float64 dx2
 *   then n0*n1*n2 float64 values in row-major order (axis 0 slowest).
 */

#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stumor/grid.hpp"

namespace stumor::io {

inline constexpr char kFieldMagic[4] = {'S', 'C', 'H', 'F'};
inline constexpr std::size_t kFieldHeaderBytes = 32;

static_assert(std::endian::native == std::endian::little, "field format assumes a little-endian host");

namespace detail {

template <class T>
void put(std::vector<char>& buf, T v) {
  const std::size_t at = buf.size();
  buf.resize(at + sizeof(T));
  std::memcpy(buf.data() + at, &v, sizeof(T));
}

template <class T>
T get(const std::vector<char>& buf, std::size_t offset) {
  T v;
  std::memcpy(&v, buf.data() + offset, sizeof(T));
  return v;
}

}  // namespace detail

inline std::vector<char> encode_field(const ScalarField& f) {
  const Grid& g = f.grid();
  std::vector<char> buf;
  buf.reserve(kFieldHeaderBytes + 16 + 8 * f.size());
  buf.resize(4);
  std::memcpy(buf.data(), kFieldMagic, 4);
  detail::put<std::uint32_t>(buf, static_cast<std::uint32_t>(g.dim));
  detail::put<std::uint32_t>(buf, static_cast<std::uint32_t>(g.n[0]));
  detail::put<std::uint32_t>(buf, static_cast<std::uint32_t>(g.n[1]));
  detail::put<double>(buf, g.dx[0]);
  detail::put<double>(buf, g.dx[1]);
  if (g.dim == 3) {
    detail::put<std::uint32_t>(buf, static_cast<std::uint32_t>(g.n[2]));
    detail::put<std::uint32_t>(buf, 0u);
    detail::put<double>(buf, g.dx[2]);
  }
  for (double v : f.values()) detail::put<double>(buf, v);
  return buf;
}

/// Decodes a field. Grids with extents below 4 (used for raw tables such as
/// stored noise increments) are accepted here and not validated as domains.
inline ScalarField decode_field(const std::vector<char>& buf, const std::string& name = "<buffer>") {
  if (buf.size() < kFieldHeaderBytes || std::memcmp(buf.data(), kFieldMagic, 4) != 0) {
    throw Error(ErrorKind::IoError, name + ": bad field header");
  }
  Grid g;
  g.dim = static_cast<int>(detail::get<std::uint32_t>(buf, 4));
  if (g.dim < 1 || g.dim > 3) throw Error(ErrorKind::IoError, name + ": bad dimension");
  g.n = {static_cast<int>(detail::get<std::uint32_t>(buf, 8)), static_cast<int>(detail::get<std::uint32_t>(buf, 12)), 1};
  g.dx = {detail::get<double>(buf, 16), detail::get<double>(buf, 24), 1.0};
  std::size_t offset = kFieldHeaderBytes;
  if (g.dim == 3) {
    if (buf.size() < kFieldHeaderBytes + 16) throw Error(ErrorKind::IoError, name + ": truncated 3D header");
    g.n[2] = static_cast<int>(detail::get<std::uint32_t>(buf, 32));
    g.dx[2] = detail::get<double>(buf, 40);
    offset += 16;
  }
  for (int a = 0; a < kMaxDim; ++a) {
    if (g.n[a] < 1 || !(g.dx[a] > 0.0)) throw Error(ErrorKind::IoError, name + ": bad extents or spacings");
    g.len[a] = g.n[a] * g.dx[a];
  }
  const std::size_t count = g.size();
  if (buf.size() != offset + 8 * count) throw Error(ErrorKind::IoError, name + ": payload size mismatch");
  std::vector<double> values(count);
  std::memcpy(values.data(), buf.data() + offset, 8 * count);
  return ScalarField(g, std::move(values));
}

inline void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

inline std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void save_field(const std::filesystem::path& path, const ScalarField& f) {
  const auto buf = encode_field(f);
  write_bytes(path, std::string(buf.begin(), buf.end()));
}

inline ScalarField load_field(const std::filesystem::path& path) {
  const std::string raw = read_bytes(path);
  return decode_field(std::vector<char>(raw.begin(), raw.end()), path.string());
}

/// Shortest round-trippable decimal form, locale-independent.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// CSV with one row per cell: index columns i[,j[,k]] then value.
inline std::string field_to_csv(const ScalarField& f) {
  const Grid& g = f.grid();
  static constexpr const char* kNames[] = {"i", "j", "k"};
  std::string out;
  for (int a = 0; a < g.dim; ++a) {
    out += kNames[a];
    out += ',';
  }
  out += "value\n";
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const auto ijk = g.unflatten(idx);
    for (int a = 0; a < g.dim; ++a) {
      out += std::to_string(ijk[a]);
      out += ',';
    }
    out += format_double(f[idx]);
    out += '\n';
  }
  return out;
}

inline void save_field_csv(const std::filesystem::path& path, const ScalarField& f) {
  write_bytes(path, field_to_csv(f));
}

}  // namespace stumor::io
