// Copyright 2026 The csmdc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "csmdc/signal_file.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

#include "csmdc/bitstream.hpp"
#include "csmdc/error.hpp"

namespace csmdc {

namespace {
constexpr char kMagic[4] = {'C', 'S', 'S', 'G'};
}

std::vector<std::uint8_t> serialize_signal_file(const SignalFile& f) {
  const auto& s = f.signal;
  const auto& y = f.measurements;
  if (static_cast<Index>(s.support.size()) != s.k || s.theta.size() != s.n) {
    throw DimensionError("signal file: support must have k entries and theta n");
  }
  if (y.y.size() != y.m || y.n != s.n) throw DimensionError("signal file: measurement shape mismatch");
  ByteWriter w;
  for (char c : kMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u8(kSignalFileVersion);
  w.u8(static_cast<std::uint8_t>(s.basis));
  w.u16(0);
  w.u32(static_cast<std::uint32_t>(s.n));
  w.u32(static_cast<std::uint32_t>(s.k));
  w.u32(static_cast<std::uint32_t>(y.m));
  w.u64(y.matrix_seed);
  for (Index i : s.support) w.u32(static_cast<std::uint32_t>(i));
  for (Index i : s.support) w.f64(s.theta(i));
  for (Index i = 0; i < y.m; ++i) w.f64(y.y(i));
  return w.take();
}

SignalFile parse_signal_file(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const auto magic = r.raw(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) throw ParseError(ParseErrorKind::bad_magic, "not a signal file");
  if (r.u8() != kSignalFileVersion) throw ParseError(ParseErrorKind::unsupported_version, "signal file version");
  const auto basis = r.u8();
  if (basis != static_cast<std::uint8_t>(Basis::identity)) {
    throw ParseError(ParseErrorKind::invalid_field, "unknown basis");
  }
  if (r.u16() != 0) throw ParseError(ParseErrorKind::invalid_field, "reserved bits set");
  const Index n = r.u32();
  const Index k = r.u32();
  const Index m = r.u32();
  const std::uint64_t seed = r.u64();
  if (n < 1 || k > n) throw ParseError(ParseErrorKind::invalid_field, "bad dimensions");
  const std::size_t body = static_cast<std::size_t>(k) * 12 + static_cast<std::size_t>(m) * 8;
  if (r.remaining() < body) throw ParseError(ParseErrorKind::truncated, "signal file body");
  if (r.remaining() > body) throw ParseError(ParseErrorKind::trailing_bytes, "signal file body");

  SignalFile f;
  f.signal.n = n;
  f.signal.k = k;
  f.signal.basis = Basis::identity;
  f.signal.theta = Vector::Zero(n);
  for (Index i = 0; i < k; ++i) {
    const Index idx = r.u32();
    if (idx >= n || (i > 0 && idx <= f.signal.support.back())) {
      throw ParseError(ParseErrorKind::invalid_field, "support not strictly increasing within range");
    }
    f.signal.support.push_back(idx);
  }
  for (Index i = 0; i < k; ++i) f.signal.theta(f.signal.support[i]) = r.f64();
  f.measurements.m = m;
  f.measurements.n = n;
  f.measurements.matrix_seed = seed;
  f.measurements.y.resize(m);
  for (Index i = 0; i < m; ++i) f.measurements.y(i) = r.f64();
  return f;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::uint8_t> out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("cannot read " + path);
  return out;
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write " + path);
}

void write_text_file(const std::string& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace csmdc
