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

#ifndef CSMDC_CODECS_HPP
#define CSMDC_CODECS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "csmdc/core_model.hpp"
#include "csmdc/quantizers.hpp"

namespace csmdc {

enum class Scheme : std::uint8_t { gq = 0, split = 1, mdsq = 2 };

const char* to_string(Scheme s) noexcept;

/// One packetized description of a measurement vector.
///
/// GQ: measurements [0, ceil(m/2)) are carried at fine_bits by description 1
/// and at coarse_bits by description 2; the rest the other way round.
/// SPLIT: description 1 carries [0, ceil(m/2)) and description 2 the rest,
/// both at fine_bits (coarse_bits = 0). MDSQ: every measurement at fine_bits
/// (the side rate); coarse_bits = 0.
struct Description {
  Scheme scheme = Scheme::gq;
  std::uint8_t desc_id = 1;
  std::uint32_t n = 0;
  std::uint32_t m = 0;
  std::uint8_t fine_bits = 0;
  std::uint8_t coarse_bits = 0;
  std::uint64_t matrix_seed = 0;
  float scale = 1.0f;
  std::uint32_t payload_bits = 0;
  std::vector<std::uint8_t> payload;  // MSB-first, zero-padded to a byte

  friend bool operator==(const Description&, const Description&) = default;
};

struct DescriptionPair {
  Description first;
  Description second;
};

/// Number of leading measurements in description 1's fine (or carried) half.
inline std::uint32_t first_half(std::uint32_t m) { return (m + 1) / 2; }

/// Payload length implied by the header fields; nullopt if the header is invalid.
std::optional<std::uint32_t> expected_payload_bits(Scheme scheme, std::uint8_t desc_id,
                                                   std::uint32_t m, int fine_bits,
                                                   int coarse_bits);

/// Per-vector quantizer scale: max |y_i| rounded to float32 (1 for y = 0).
float vector_scale(const Vector& y);

DescriptionPair gq_encode(const Measurements& y, int fine_bits, int coarse_bits,
                          std::optional<double> scale_override = std::nullopt);

DescriptionPair split_encode(const Measurements& y, int rate,
                             std::optional<double> scale_override = std::nullopt);

/// Each measurement is mapped into the codebook's range by cb.scale / S.
DescriptionPair mdsq_encode_vec(const Measurements& y, const MdsqCodebook& cb);

/// Indices in payload order.
std::vector<std::uint32_t> unpack_indices(const Description& d);

/// Measurement indices carried by `d`, in payload order, with their bit widths.
std::vector<std::pair<std::uint32_t, int>> payload_layout(const Description& d);

/// Wire format, 36-byte big-endian header followed by the payload:
///   "CSMD" | version u8 | scheme u8 | desc_id u8 | flags u8 | n u32 | m u32 |
///   B u8 | b u8 | reserved u16 | matrix_seed u64 | S f32 | payload_len_bits u32
std::vector<std::uint8_t> serialize(const Description& d);

/// Throws ParseError with a kind describing the first failed check.
Description parse(std::span<const std::uint8_t> bytes);

constexpr std::uint8_t kWireVersion = 1;
constexpr std::size_t kHeaderBytes = 36;

/// Measurements of one quantization group handed to a decoder.
struct MeasurementGroup {
  std::vector<Index> rows;  // rows of the sensing matrix
  Vector values;            // dequantized measurements
  double delta = 0.0;       // uniform step (effective step for MDSQ)
  bool consistent = true;   // values are cell midpoints of half-width delta/2
};

struct DecoderInput {
  std::vector<MeasurementGroup> groups;
  std::uint64_t matrix_seed = 0;
  Index n = 0;
  Index m = 0;

  Index measurement_count() const;
};

/// Central decoder input for GQ and SPLIT pairs: every measurement at the
/// fine rate.
DecoderInput gq_central_merge(const Description& d1, const Description& d2);

/// Side decoder input: fine group then coarse group (a single group when the
/// coarse rate is zero).
DecoderInput gq_side_extract(const Description& d);

DecoderInput mdsq_side_extract(const Description& d, const MdsqCodebook& cb);
DecoderInput mdsq_central_merge(const Description& d1, const Description& d2,
                                const MdsqCodebook& cb);

}  // namespace csmdc

#endif  // CSMDC_CODECS_HPP
