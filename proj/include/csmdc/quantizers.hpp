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

#ifndef CSMDC_QUANTIZERS_HPP
#define CSMDC_QUANTIZERS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace csmdc {

/// Midrise uniform quantizer on [-scale, scale) with 2^bits cells.
struct QuantizerSpec {
  int bits = 1;
  double scale = 1.0;
  double delta = 1.0;

  std::uint32_t levels() const { return std::uint32_t{1} << bits; }
};

constexpr int kMaxQuantizerBits = 16;

QuantizerSpec make_uniform_quantizer(double scale, int bits);

/// Cell index, clamped into [0, 2^bits).
std::uint32_t quantize(const QuantizerSpec& spec, double v);

/// Midpoint of cell `idx`.
double dequantize(const QuantizerSpec& spec, std::uint32_t idx);

/// Coarse index of the embedded codebook: the top `coarse_bits` bits of a
/// `fine_bits` index.
std::uint32_t demote_index(std::uint32_t idx, int fine_bits, int coarse_bits);

struct IndexPair {
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  friend bool operator==(const IndexPair&, const IndexPair&) = default;
};

enum class Side : int { first = 1, second = 2 };

/// Two-description scalar quantizer with a nested (banded) index assignment.
///
/// Central cells are the occupied entries of the 2^side_bits x 2^side_bits
/// index matrix with |i - j| <= spread. Central index c counts cells in
/// increasing reproduction value; the i index goes to description 1 and the j
/// index to description 2.
struct MdsqCodebook {
  int side_bits = 1;
  int spread = 0;
  double scale = 1.0;
  std::uint32_t central_levels = 0;
  std::vector<IndexPair> ia_forward;          // central index -> (i, j)
  std::vector<std::int32_t> ia_inverse;       // row-major side x side, -1 unused
  std::vector<double> central_reproductions;  // ascending
  std::vector<double> side_reproductions_1;
  std::vector<double> side_reproductions_2;
  // Mean squared error on the design samples (a uniform grid when none).
  double central_mse = 0.0;
  double side_mse = 0.0;

  std::uint32_t side_levels() const { return std::uint32_t{1} << side_bits; }
  std::optional<std::uint32_t> central_index(std::uint32_t i, std::uint32_t j) const;
};

constexpr int kMaxMdsqSideBits = 8;
constexpr int kDefaultLloydIterations = 20;

/// Number of cells with |i - j| <= spread in a side x side matrix.
std::uint32_t band_cell_count(std::uint32_t side, int spread);

/// Band cells in canonical fill order: increasing |i - j|, then row-major.
std::vector<IndexPair> nested_band_cells(int side_bits, int spread);

MdsqCodebook mdsq_design(int side_bits, int spread, double scale, int lloyd_iters,
                         std::span<const double> samples);

IndexPair mdsq_encode(const MdsqCodebook& cb, double v);

double mdsq_decode_side(const MdsqCodebook& cb, std::uint32_t idx, Side which);

double mdsq_decode_central(const MdsqCodebook& cb, std::uint32_t i, std::uint32_t j);

struct MdsqDistortion {
  double central = 0.0;
  double side1 = 0.0;
  double side2 = 0.0;
};

/// Empirical per-sample squared error of each decoder.
MdsqDistortion mdsq_distortion(const MdsqCodebook& cb, std::span<const double> samples);

/// Versioned binary blob ("CSCB", big-endian) used inside experiment files.
std::vector<std::uint8_t> serialize_codebook(const MdsqCodebook& cb);
MdsqCodebook parse_codebook(std::span<const std::uint8_t> bytes);

}  // namespace csmdc

#endif  // CSMDC_QUANTIZERS_HPP
