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

#include "csmdc/codecs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "csmdc/bitstream.hpp"
#include "csmdc/error.hpp"

namespace csmdc {

const char* to_string(ParseErrorKind kind) noexcept {
  switch (kind) {
    case ParseErrorKind::bad_magic: return "bad magic";
    case ParseErrorKind::unsupported_version: return "unsupported version";
    case ParseErrorKind::truncated: return "truncated";
    case ParseErrorKind::inconsistent_length: return "inconsistent length";
    case ParseErrorKind::invalid_field: return "invalid field";
    case ParseErrorKind::trailing_bytes: return "trailing bytes";
  }
  return "unknown";
}

const char* to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::gq: return "gq";
    case Scheme::split: return "split";
    case Scheme::mdsq: return "mdsq";
  }
  return "unknown";
}

namespace {

constexpr std::uint8_t kMagic[4] = {'C', 'S', 'M', 'D'};

bool rates_valid(Scheme scheme, int fine_bits, int coarse_bits) {
  switch (scheme) {
    case Scheme::gq:
      return fine_bits >= 1 && fine_bits <= kMaxQuantizerBits && coarse_bits >= 0 &&
             coarse_bits <= fine_bits;
    case Scheme::split:
      return fine_bits >= 1 && fine_bits <= kMaxQuantizerBits && coarse_bits == 0;
    case Scheme::mdsq:
      return fine_bits >= 1 && fine_bits <= kMaxMdsqSideBits && coarse_bits == 0;
  }
  return false;
}

// (measurement index, bit width) in payload order.
std::vector<std::pair<std::uint32_t, int>> layout(Scheme scheme, std::uint8_t desc_id,
                                                  std::uint32_t m, int fine_bits,
                                                  int coarse_bits) {
  std::vector<std::pair<std::uint32_t, int>> out;
  const auto h = first_half(m);
  switch (scheme) {
    case Scheme::gq:
      for (std::uint32_t i = 0; i < m; ++i) {
        const bool fine = (i < h) == (desc_id == 1);
        const int width = fine ? fine_bits : coarse_bits;
        if (width > 0) out.emplace_back(i, width);
      }
      break;
    case Scheme::split: {
      const auto lo = desc_id == 1 ? 0u : h;
      const auto hi = desc_id == 1 ? h : m;
      for (auto i = lo; i < hi; ++i) out.emplace_back(i, fine_bits);
      break;
    }
    case Scheme::mdsq:
      for (std::uint32_t i = 0; i < m; ++i) out.emplace_back(i, fine_bits);
      break;
  }
  return out;
}

std::uint32_t checked_m(const Measurements& y, std::uint32_t min_m) {
  if (y.y.size() != y.m) throw DimensionError("measurement vector length differs from m");
  if (y.m < static_cast<Index>(min_m)) {
    throw ConfigError("encoder needs at least " + std::to_string(min_m) + " measurements");
  }
  if (y.n < 1 || y.n > static_cast<Index>(UINT32_MAX) || y.m > static_cast<Index>(UINT32_MAX)) {
    throw ConfigError("dimensions do not fit the wire format");
  }
  return static_cast<std::uint32_t>(y.m);
}

Description header_for(const Measurements& y, Scheme scheme, std::uint8_t desc_id,
                       int fine_bits, int coarse_bits, float scale) {
  Description d;
  d.scheme = scheme;
  d.desc_id = desc_id;
  d.n = static_cast<std::uint32_t>(y.n);
  d.m = static_cast<std::uint32_t>(y.m);
  d.fine_bits = static_cast<std::uint8_t>(fine_bits);
  d.coarse_bits = static_cast<std::uint8_t>(coarse_bits);
  d.matrix_seed = y.matrix_seed;
  d.scale = scale;
  return d;
}

void pack(Description& d, const std::vector<std::uint32_t>& by_measurement_index) {
  BitWriter w;
  for (const auto& [i, width] : layout(d.scheme, d.desc_id, d.m, d.fine_bits, d.coarse_bits)) {
    w.put(by_measurement_index[i], width);
  }
  d.payload_bits = static_cast<std::uint32_t>(w.bit_length());
  d.payload = w.bytes();
}

float resolve_scale(const Measurements& y, std::optional<double> scale_override) {
  if (!scale_override) return vector_scale(y.y);
  const auto s = static_cast<float>(*scale_override);
  if (!(s > 0.0f) || !std::isfinite(s)) throw ConfigError("scale override must be positive");
  return s;
}

void check_pair(const Description& a, const Description& b) {
  if (a.scheme != b.scheme || a.n != b.n || a.m != b.m || a.fine_bits != b.fine_bits ||
      a.coarse_bits != b.coarse_bits || a.matrix_seed != b.matrix_seed ||
      std::bit_cast<std::uint32_t>(a.scale) != std::bit_cast<std::uint32_t>(b.scale)) {
    throw ConfigError("descriptions have mismatched headers");
  }
  if (a.desc_id == b.desc_id) throw ConfigError("both descriptions have the same id");
}

// Whether `d` carries `row` at the fine rate (its own half).
bool owns(const Description& d, std::uint32_t row) {
  return (row < first_half(d.m)) == (d.desc_id == 1);
}

}  // namespace

std::optional<std::uint32_t> expected_payload_bits(Scheme scheme, std::uint8_t desc_id,
                                                   std::uint32_t m, int fine_bits,
                                                   int coarse_bits) {
  if (!rates_valid(scheme, fine_bits, coarse_bits) || (desc_id != 1 && desc_id != 2)) {
    return std::nullopt;
  }
  const std::uint64_t h = first_half(m);
  const std::uint64_t rest = m - h;
  std::uint64_t bits = 0;
  switch (scheme) {
    case Scheme::gq:
      bits = desc_id == 1 ? h * fine_bits + rest * coarse_bits : h * coarse_bits + rest * fine_bits;
      break;
    case Scheme::split:
      bits = (desc_id == 1 ? h : rest) * fine_bits;
      break;
    case Scheme::mdsq:
      bits = std::uint64_t{m} * fine_bits;
      break;
  }
  if (bits > UINT32_MAX) return std::nullopt;
  return static_cast<std::uint32_t>(bits);
}

float vector_scale(const Vector& y) {
  const double s = y.size() > 0 ? y.cwiseAbs().maxCoeff() : 0.0;
  if (!(s > 0.0) || !std::isfinite(s)) return 1.0f;
  const auto f = static_cast<float>(s);
  return f > 0.0f ? f : std::numeric_limits<float>::min();
}

DescriptionPair gq_encode(const Measurements& y, int fine_bits, int coarse_bits,
                          std::optional<double> scale_override) {
  const auto m = checked_m(y, 2);
  if (coarse_bits > fine_bits) throw ConfigError("gq_encode: coarse rate exceeds fine rate");
  if (!rates_valid(Scheme::gq, fine_bits, coarse_bits)) {
    throw ConfigError("gq_encode: rates must satisfy 0 <= b <= B <= 16, B >= 1");
  }
  const float scale = resolve_scale(y, scale_override);
  const auto fine = make_uniform_quantizer(scale, fine_bits);

  std::vector<std::uint32_t> fine_idx(m), coarse_idx(m);
  for (std::uint32_t i = 0; i < m; ++i) {
    fine_idx[i] = quantize(fine, y.y(i));
    coarse_idx[i] = demote_index(fine_idx[i], fine_bits, coarse_bits);
  }
  const auto h = first_half(m);
  std::vector<std::uint32_t> v1(m), v2(m);
  for (std::uint32_t i = 0; i < m; ++i) {
    v1[i] = i < h ? fine_idx[i] : coarse_idx[i];
    v2[i] = i < h ? coarse_idx[i] : fine_idx[i];
  }
  DescriptionPair pair{header_for(y, Scheme::gq, 1, fine_bits, coarse_bits, scale),
                       header_for(y, Scheme::gq, 2, fine_bits, coarse_bits, scale)};
  pack(pair.first, v1);
  pack(pair.second, v2);
  return pair;
}

DescriptionPair split_encode(const Measurements& y, int rate, std::optional<double> scale_override) {
  const auto m = checked_m(y, 2);
  if (!rates_valid(Scheme::split, rate, 0)) throw ConfigError("split_encode: rate must be in [1, 16]");
  const float scale = resolve_scale(y, scale_override);
  const auto q = make_uniform_quantizer(scale, rate);
  std::vector<std::uint32_t> idx(m);
  for (std::uint32_t i = 0; i < m; ++i) idx[i] = quantize(q, y.y(i));
  DescriptionPair pair{header_for(y, Scheme::split, 1, rate, 0, scale),
                       header_for(y, Scheme::split, 2, rate, 0, scale)};
  pack(pair.first, idx);
  pack(pair.second, idx);
  return pair;
}

DescriptionPair mdsq_encode_vec(const Measurements& y, const MdsqCodebook& cb) {
  const auto m = checked_m(y, 1);
  const float scale = vector_scale(y.y);
  const double to_codebook = cb.scale / static_cast<double>(scale);
  std::vector<std::uint32_t> vi(m), vj(m);
  for (std::uint32_t t = 0; t < m; ++t) {
    const auto [i, j] = mdsq_encode(cb, y.y(t) * to_codebook);
    vi[t] = i;
    vj[t] = j;
  }
  DescriptionPair pair{header_for(y, Scheme::mdsq, 1, cb.side_bits, 0, scale),
                       header_for(y, Scheme::mdsq, 2, cb.side_bits, 0, scale)};
  pack(pair.first, vi);
  pack(pair.second, vj);
  return pair;
}

std::vector<std::pair<std::uint32_t, int>> payload_layout(const Description& d) {
  return layout(d.scheme, d.desc_id, d.m, d.fine_bits, d.coarse_bits);
}

std::vector<std::uint32_t> unpack_indices(const Description& d) {
  BitReader r(d.payload, d.payload_bits);
  std::vector<std::uint32_t> out;
  for (const auto& entry : payload_layout(d)) out.push_back(r.get(entry.second));
  return out;
}

std::vector<std::uint8_t> serialize(const Description& d) {
  ByteWriter w;
  w.raw(kMagic);
  w.u8(kWireVersion);
  w.u8(static_cast<std::uint8_t>(d.scheme));
  w.u8(d.desc_id);
  w.u8(0);
  w.u32(d.n);
  w.u32(d.m);
  w.u8(d.fine_bits);
  w.u8(d.coarse_bits);
  w.u16(0);
  w.u64(d.matrix_seed);
  w.f32(d.scale);
  w.u32(d.payload_bits);
  w.raw(d.payload);
  return w.take();
}

Description parse(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (bytes.size() < 4) throw ParseError(ParseErrorKind::truncated, "shorter than magic");
  const auto magic = r.raw(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic)) {
    throw ParseError(ParseErrorKind::bad_magic, "expected \"CSMD\"");
  }
  if (bytes.size() < kHeaderBytes) throw ParseError(ParseErrorKind::truncated, "incomplete header");
  const auto version = r.u8();
  if (version != kWireVersion) {
    throw ParseError(ParseErrorKind::unsupported_version, "version " + std::to_string(version));
  }
  Description d;
  const auto scheme = r.u8();
  if (scheme > 2) throw ParseError(ParseErrorKind::invalid_field, "scheme " + std::to_string(scheme));
  d.scheme = static_cast<Scheme>(scheme);
  d.desc_id = r.u8();
  if (d.desc_id != 1 && d.desc_id != 2) {
    throw ParseError(ParseErrorKind::invalid_field, "description id " + std::to_string(d.desc_id));
  }
  if (r.u8() != 0) throw ParseError(ParseErrorKind::invalid_field, "nonzero flags");
  d.n = r.u32();
  d.m = r.u32();
  d.fine_bits = r.u8();
  d.coarse_bits = r.u8();
  if (r.u16() != 0) throw ParseError(ParseErrorKind::invalid_field, "nonzero reserved field");
  d.matrix_seed = r.u64();
  d.scale = r.f32();
  d.payload_bits = r.u32();

  if (d.n == 0 || d.m < (d.scheme == Scheme::mdsq ? 1u : 2u)) {
    throw ParseError(ParseErrorKind::invalid_field, "dimensions");
  }
  if (!rates_valid(d.scheme, d.fine_bits, d.coarse_bits)) {
    throw ParseError(ParseErrorKind::invalid_field, "rates for scheme");
  }
  if (!(d.scale > 0.0f) || !std::isfinite(d.scale)) {
    throw ParseError(ParseErrorKind::invalid_field, "quantizer scale");
  }
  const auto expected = expected_payload_bits(d.scheme, d.desc_id, d.m, d.fine_bits, d.coarse_bits);
  if (!expected || *expected != d.payload_bits) {
    throw ParseError(ParseErrorKind::inconsistent_length,
                     "payload_len_bits " + std::to_string(d.payload_bits) +
                         " does not match scheme, m and rates");
  }
  const std::size_t payload_bytes = (static_cast<std::size_t>(d.payload_bits) + 7) / 8;
  if (r.remaining() < payload_bytes) throw ParseError(ParseErrorKind::truncated, "payload");
  if (r.remaining() > payload_bytes) throw ParseError(ParseErrorKind::trailing_bytes, "after payload");
  const auto payload = r.raw(payload_bytes);
  if (d.payload_bits % 8 != 0) {
    const auto pad_mask = static_cast<std::uint8_t>(0xFFu >> (d.payload_bits % 8));
    if (payload.back() & pad_mask) throw ParseError(ParseErrorKind::invalid_field, "nonzero padding");
  }
  d.payload.assign(payload.begin(), payload.end());
  return d;
}

Index DecoderInput::measurement_count() const {
  Index count = 0;
  for (const auto& g : groups) count += static_cast<Index>(g.rows.size());
  return count;
}

DecoderInput gq_central_merge(const Description& d1, const Description& d2) {
  check_pair(d1, d2);
  if (d1.scheme == Scheme::mdsq) throw ConfigError("gq_central_merge: MDSQ pair needs a codebook");
  const Description& a = d1.desc_id == 1 ? d1 : d2;
  const Description& b = d1.desc_id == 1 ? d2 : d1;
  const auto q = make_uniform_quantizer(a.scale, a.fine_bits);

  std::vector<std::uint32_t> fine(a.m);
  for (const Description* d : {&a, &b}) {
    const auto idx = unpack_indices(*d);
    const auto lay = payload_layout(*d);
    for (std::size_t t = 0; t < lay.size(); ++t) {
      if (owns(*d, lay[t].first)) fine[lay[t].first] = idx[t];
    }
  }
  MeasurementGroup g;
  g.delta = q.delta;
  g.values.resize(a.m);
  for (std::uint32_t i = 0; i < a.m; ++i) {
    g.rows.push_back(i);
    g.values(i) = dequantize(q, fine[i]);
  }
  return DecoderInput{{std::move(g)}, a.matrix_seed, static_cast<Index>(a.n), static_cast<Index>(a.m)};
}

DecoderInput gq_side_extract(const Description& d) {
  if (d.scheme == Scheme::mdsq) throw ConfigError("gq_side_extract: MDSQ description needs a codebook");
  const auto idx = unpack_indices(d);
  const auto lay = payload_layout(d);
  const auto fine_q = make_uniform_quantizer(d.scale, d.fine_bits);
  std::optional<QuantizerSpec> coarse_q;
  if (d.coarse_bits > 0) coarse_q = make_uniform_quantizer(d.scale, d.coarse_bits);

  MeasurementGroup fine, coarse;
  fine.delta = fine_q.delta;
  if (coarse_q) coarse.delta = coarse_q->delta;
  std::vector<double> fv, cv;
  for (std::size_t t = 0; t < lay.size(); ++t) {
    const auto row = lay[t].first;
    if (owns(d, row)) {
      fine.rows.push_back(row);
      fv.push_back(dequantize(fine_q, idx[t]));
    } else {
      coarse.rows.push_back(row);
      cv.push_back(dequantize(*coarse_q, idx[t]));
    }
  }
  fine.values = Eigen::Map<const Vector>(fv.data(), static_cast<Index>(fv.size()));
  coarse.values = Eigen::Map<const Vector>(cv.data(), static_cast<Index>(cv.size()));
  DecoderInput out{{}, d.matrix_seed, static_cast<Index>(d.n), static_cast<Index>(d.m)};
  out.groups.push_back(std::move(fine));
  if (coarse_q) out.groups.push_back(std::move(coarse));
  return out;
}

namespace {

void check_codebook(const Description& d, const MdsqCodebook& cb) {
  if (d.scheme != Scheme::mdsq) throw ConfigError("expected an MDSQ description");
  if (d.fine_bits != cb.side_bits) throw ConfigError("description rate differs from codebook side rate");
}

}  // namespace

DecoderInput mdsq_side_extract(const Description& d, const MdsqCodebook& cb) {
  check_codebook(d, cb);
  const auto idx = unpack_indices(d);
  const double from_codebook = static_cast<double>(d.scale) / cb.scale;
  const Side which = d.desc_id == 1 ? Side::first : Side::second;
  MeasurementGroup g;
  g.consistent = false;
  g.delta = std::sqrt(12.0 * cb.side_mse) * from_codebook;
  g.values.resize(d.m);
  for (std::uint32_t i = 0; i < d.m; ++i) {
    g.rows.push_back(i);
    g.values(i) = mdsq_decode_side(cb, idx[i], which) * from_codebook;
  }
  return DecoderInput{{std::move(g)}, d.matrix_seed, static_cast<Index>(d.n), static_cast<Index>(d.m)};
}

DecoderInput mdsq_central_merge(const Description& d1, const Description& d2,
                                const MdsqCodebook& cb) {
  check_pair(d1, d2);
  check_codebook(d1, cb);
  const Description& a = d1.desc_id == 1 ? d1 : d2;
  const Description& b = d1.desc_id == 1 ? d2 : d1;
  const auto ii = unpack_indices(a);
  const auto jj = unpack_indices(b);
  const double from_codebook = static_cast<double>(a.scale) / cb.scale;
  MeasurementGroup g;
  g.consistent = false;
  g.delta = std::sqrt(12.0 * cb.central_mse) * from_codebook;
  g.values.resize(a.m);
  for (std::uint32_t t = 0; t < a.m; ++t) {
    g.rows.push_back(t);
    g.values(t) = mdsq_decode_central(cb, ii[t], jj[t]) * from_codebook;
  }
  return DecoderInput{{std::move(g)}, a.matrix_seed, static_cast<Index>(a.n), static_cast<Index>(a.m)};
}

}  // namespace csmdc
