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

#include "csmdc/quantizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "csmdc/bitstream.hpp"
#include "csmdc/error.hpp"

namespace csmdc {

QuantizerSpec make_uniform_quantizer(double scale, int bits) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ConfigError("uniform quantizer scale must be positive and finite");
  }
  if (bits < 1 || bits > kMaxQuantizerBits) {
    throw ConfigError("uniform quantizer bits must be in [1, 16], got " + std::to_string(bits));
  }
  // 2S / 2^bits with an exact power-of-two division, so that step sizes at
  // different rates are exact binary multiples of one another.
  return QuantizerSpec{bits, scale, std::ldexp(2.0 * scale, -bits)};
}

std::uint32_t quantize(const QuantizerSpec& spec, double v) {
  const double t = std::floor((v + spec.scale) / spec.delta);
  if (!(t >= 0.0)) return 0;
  const double top = static_cast<double>(spec.levels() - 1);
  return static_cast<std::uint32_t>(std::min(t, top));
}

double dequantize(const QuantizerSpec& spec, std::uint32_t idx) {
  if (idx >= spec.levels()) {
    throw IndexError("dequantize: index " + std::to_string(idx) + " out of range for " +
                     std::to_string(spec.bits) + " bits");
  }
  return -spec.scale + (static_cast<double>(idx) + 0.5) * spec.delta;
}

std::uint32_t demote_index(std::uint32_t idx, int fine_bits, int coarse_bits) {
  if (coarse_bits > fine_bits || coarse_bits < 0) {
    throw ConfigError("demote_index: coarse rate exceeds fine rate");
  }
  if (fine_bits < 32 && idx >= (std::uint32_t{1} << fine_bits)) {
    throw IndexError("demote_index: index does not fit in fine rate");
  }
  if (coarse_bits == 0) return 0;
  return idx >> (fine_bits - coarse_bits);
}

std::optional<std::uint32_t> MdsqCodebook::central_index(std::uint32_t i, std::uint32_t j) const {
  const auto side = side_levels();
  if (i >= side || j >= side) return std::nullopt;
  const auto c = ia_inverse[static_cast<std::size_t>(i) * side + j];
  if (c < 0) return std::nullopt;
  return static_cast<std::uint32_t>(c);
}

std::uint32_t band_cell_count(std::uint32_t side, int spread) {
  std::uint32_t count = side;
  for (int d = 1; d <= spread && static_cast<std::uint32_t>(d) < side; ++d) {
    count += 2 * (side - static_cast<std::uint32_t>(d));
  }
  return count;
}

std::vector<IndexPair> nested_band_cells(int side_bits, int spread) {
  const auto side = std::uint32_t{1} << side_bits;
  std::vector<IndexPair> cells;
  cells.reserve(band_cell_count(side, spread));
  for (int d = 0; d <= spread; ++d) {
    for (std::uint32_t i = 0; i < side; ++i) {
      for (std::uint32_t j = 0; j < side; ++j) {
        const auto dist = i > j ? i - j : j - i;
        if (dist == static_cast<std::uint32_t>(d)) cells.push_back({i, j});
      }
    }
  }
  return cells;
}

namespace {

// Order of band cells along the real line: by anti-diagonal i + j, walking
// each anti-diagonal in alternating direction so that rows (description 1)
// and columns (description 2) cover equally wide value ranges on average.
std::vector<IndexPair> value_ordered_cells(int side_bits, int spread) {
  auto cells = nested_band_cells(side_bits, spread);
  std::stable_sort(cells.begin(), cells.end(), [](const IndexPair& a, const IndexPair& b) {
    const auto sa = a.i + a.j;
    const auto sb = b.i + b.j;
    if (sa != sb) return sa < sb;
    const bool ascending = (sa / 2) % 2 == 0;
    return ascending ? a.i < b.i : a.i > b.i;
  });
  return cells;
}

std::uint32_t nearest_central(const std::vector<double>& repro, double v) {
  // Reproductions are ascending: locate the bracketing pair.
  const auto it = std::lower_bound(repro.begin(), repro.end(), v);
  if (it == repro.begin()) return 0;
  if (it == repro.end()) return static_cast<std::uint32_t>(repro.size() - 1);
  const auto hi = static_cast<std::uint32_t>(it - repro.begin());
  const auto lo = hi - 1;
  // Ties go to the lower cell.
  return (v - repro[lo] <= repro[hi] - v) ? lo : hi;
}

void update_side_reproductions(MdsqCodebook& cb, std::span<const double> samples,
                               const std::vector<std::uint32_t>& assignment) {
  const auto side = cb.side_levels();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> sum1(side, 0.0), sum2(side, 0.0);
  std::vector<std::size_t> cnt1(side, 0), cnt2(side, 0);
  // Fallback: mean of member central reproductions.
  std::vector<double> msum1(side, 0.0), msum2(side, 0.0);
  std::vector<std::size_t> mcnt1(side, 0), mcnt2(side, 0);
  for (std::uint32_t c = 0; c < cb.central_levels; ++c) {
    const auto [i, j] = cb.ia_forward[c];
    msum1[i] += cb.central_reproductions[c];
    ++mcnt1[i];
    msum2[j] += cb.central_reproductions[c];
    ++mcnt2[j];
  }
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto [i, j] = cb.ia_forward[assignment[s]];
    sum1[i] += samples[s];
    ++cnt1[i];
    sum2[j] += samples[s];
    ++cnt2[j];
  }
  cb.side_reproductions_1.assign(side, nan);
  cb.side_reproductions_2.assign(side, nan);
  for (std::uint32_t idx = 0; idx < side; ++idx) {
    if (cnt1[idx] > 0) {
      cb.side_reproductions_1[idx] = sum1[idx] / static_cast<double>(cnt1[idx]);
    } else if (mcnt1[idx] > 0) {
      cb.side_reproductions_1[idx] = msum1[idx] / static_cast<double>(mcnt1[idx]);
    }
    if (cnt2[idx] > 0) {
      cb.side_reproductions_2[idx] = sum2[idx] / static_cast<double>(cnt2[idx]);
    } else if (mcnt2[idx] > 0) {
      cb.side_reproductions_2[idx] = msum2[idx] / static_cast<double>(mcnt2[idx]);
    }
  }
}

std::vector<double> uniform_grid(double scale, std::size_t count) {
  std::vector<double> grid(count);
  for (std::size_t s = 0; s < count; ++s) {
    grid[s] = -scale + (static_cast<double>(s) + 0.5) * 2.0 * scale / static_cast<double>(count);
  }
  return grid;
}

constexpr int kMaxLloydPolishPasses = 1000;

}  // namespace

MdsqCodebook mdsq_design(int side_bits, int spread, double scale, int lloyd_iters,
                         std::span<const double> samples) {
  if (side_bits < 1 || side_bits > kMaxMdsqSideBits) {
    throw ConfigError("mdsq_design: side_bits must be in [1, 8]");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("mdsq_design: scale must be positive");
  const auto side = std::uint32_t{1} << side_bits;
  if (spread < 0 || static_cast<std::uint32_t>(spread) >= side) {
    throw ConfigError("mdsq_design: spread " + std::to_string(spread) +
                      " does not fit a " + std::to_string(side) + "x" + std::to_string(side) +
                      " index matrix");
  }
  if (lloyd_iters < 0) throw ConfigError("mdsq_design: negative Lloyd iteration count");
  if (lloyd_iters > 0 && samples.empty()) {
    throw ConfigError("mdsq_design: Lloyd refinement needs training samples");
  }

  MdsqCodebook cb;
  cb.side_bits = side_bits;
  cb.spread = spread;
  cb.scale = scale;
  cb.ia_forward = value_ordered_cells(side_bits, spread);
  cb.central_levels = static_cast<std::uint32_t>(cb.ia_forward.size());
  cb.ia_inverse.assign(static_cast<std::size_t>(side) * side, -1);
  for (std::uint32_t c = 0; c < cb.central_levels; ++c) {
    const auto [i, j] = cb.ia_forward[c];
    cb.ia_inverse[static_cast<std::size_t>(i) * side + j] = static_cast<std::int32_t>(c);
  }

  const double width = 2.0 * scale / cb.central_levels;
  cb.central_reproductions.resize(cb.central_levels);
  for (std::uint32_t c = 0; c < cb.central_levels; ++c) {
    cb.central_reproductions[c] = -scale + (c + 0.5) * width;
  }

  // lloyd_iters full passes, then further passes until the assignment is a
  // fixed point, so each central value is the centroid of its encoder cell.
  std::vector<std::uint32_t> assignment(samples.size());
  const int max_passes = lloyd_iters > 0 ? lloyd_iters + kMaxLloydPolishPasses : 0;
  for (int it = 0; it < max_passes; ++it) {
    std::vector<double> sum(cb.central_levels, 0.0);
    std::vector<std::size_t> cnt(cb.central_levels, 0);
    bool changed = it == 0;
    for (std::size_t s = 0; s < samples.size(); ++s) {
      const auto c = nearest_central(cb.central_reproductions, samples[s]);
      changed |= assignment[s] != c;
      assignment[s] = c;
      sum[c] += samples[s];
      ++cnt[c];
    }
    if (!changed && it >= lloyd_iters) break;
    // Empty cells keep their reproduction; 1-D centroids stay ordered.
    for (std::uint32_t c = 0; c < cb.central_levels; ++c) {
      if (cnt[c] > 0) cb.central_reproductions[c] = sum[c] / static_cast<double>(cnt[c]);
    }
  }

  if (lloyd_iters > 0) {
    for (std::size_t s = 0; s < samples.size(); ++s) {
      assignment[s] = nearest_central(cb.central_reproductions, samples[s]);
    }
    update_side_reproductions(cb, samples, assignment);
  } else {
    update_side_reproductions(cb, {}, {});
  }

  const auto stats = samples.empty() ? mdsq_distortion(cb, uniform_grid(scale, 4096))
                                     : mdsq_distortion(cb, samples);
  cb.central_mse = stats.central;
  cb.side_mse = 0.5 * (stats.side1 + stats.side2);
  return cb;
}

IndexPair mdsq_encode(const MdsqCodebook& cb, double v) {
  if (std::isnan(v)) v = 0.0;
  return cb.ia_forward[nearest_central(cb.central_reproductions, v)];
}

double mdsq_decode_side(const MdsqCodebook& cb, std::uint32_t idx, Side which) {
  if (idx >= cb.side_levels()) {
    throw IndexError("mdsq_decode_side: index " + std::to_string(idx) + " out of range");
  }
  const auto& repro = which == Side::first ? cb.side_reproductions_1 : cb.side_reproductions_2;
  const double v = repro[idx];
  if (std::isnan(v)) {
    throw IndexError("mdsq_decode_side: side index " + std::to_string(idx) +
                     " is not used by the index assignment");
  }
  return v;
}

double mdsq_decode_central(const MdsqCodebook& cb, std::uint32_t i, std::uint32_t j) {
  const auto c = cb.central_index(i, j);
  if (!c) {
    throw IndexError("mdsq_decode_central: pair (" + std::to_string(i) + ", " +
                     std::to_string(j) + ") is not an occupied cell");
  }
  return cb.central_reproductions[*c];
}

MdsqDistortion mdsq_distortion(const MdsqCodebook& cb, std::span<const double> samples) {
  MdsqDistortion d;
  if (samples.empty()) return d;
  for (double v : samples) {
    const auto c = nearest_central(cb.central_reproductions, v);
    const auto [i, j] = cb.ia_forward[c];
    d.central += std::pow(v - cb.central_reproductions[c], 2);
    d.side1 += std::pow(v - cb.side_reproductions_1[i], 2);
    d.side2 += std::pow(v - cb.side_reproductions_2[j], 2);
  }
  const auto n = static_cast<double>(samples.size());
  d.central /= n;
  d.side1 /= n;
  d.side2 /= n;
  return d;
}

namespace {
constexpr std::uint8_t kCodebookMagic[4] = {'C', 'S', 'C', 'B'};
constexpr std::uint8_t kCodebookVersion = 1;
}  // namespace

std::vector<std::uint8_t> serialize_codebook(const MdsqCodebook& cb) {
  ByteWriter w;
  w.raw(kCodebookMagic);
  w.u8(kCodebookVersion);
  w.u8(static_cast<std::uint8_t>(cb.side_bits));
  w.u16(static_cast<std::uint16_t>(cb.spread));
  w.f64(cb.scale);
  w.f64(cb.central_mse);
  w.f64(cb.side_mse);
  w.u32(cb.central_levels);
  for (std::uint32_t c = 0; c < cb.central_levels; ++c) {
    w.u16(static_cast<std::uint16_t>(cb.ia_forward[c].i));
    w.u16(static_cast<std::uint16_t>(cb.ia_forward[c].j));
    w.f64(cb.central_reproductions[c]);
  }
  for (std::uint32_t idx = 0; idx < cb.side_levels(); ++idx) {
    w.f64(cb.side_reproductions_1[idx]);
    w.f64(cb.side_reproductions_2[idx]);
  }
  return w.take();
}

MdsqCodebook parse_codebook(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const auto magic = r.raw(4);
  if (!std::equal(magic.begin(), magic.end(), kCodebookMagic)) {
    throw ParseError(ParseErrorKind::bad_magic, "not a codebook blob");
  }
  if (const auto v = r.u8(); v != kCodebookVersion) {
    throw ParseError(ParseErrorKind::unsupported_version, "codebook version " + std::to_string(v));
  }
  const int side_bits = r.u8();
  const int spread = r.u16();
  const double scale = r.f64();
  if (side_bits < 1 || side_bits > kMaxMdsqSideBits || spread >= (1 << side_bits) ||
      !(scale > 0.0) || !std::isfinite(scale)) {
    throw ParseError(ParseErrorKind::invalid_field, "codebook parameters out of range");
  }
  // Rebuild the band, then overwrite trained values.
  MdsqCodebook cb = mdsq_design(side_bits, spread, scale, 0, {});
  cb.central_mse = r.f64();
  cb.side_mse = r.f64();
  if (r.u32() != cb.central_levels) {
    throw ParseError(ParseErrorKind::inconsistent_length, "central level count does not match band");
  }
  for (std::uint32_t c = 0; c < cb.central_levels; ++c) {
    const IndexPair p{r.u16(), r.u16()};
    if (!(p == cb.ia_forward[c])) {
      throw ParseError(ParseErrorKind::invalid_field, "index assignment differs from nested band");
    }
    cb.central_reproductions[c] = r.f64();
  }
  for (std::uint32_t idx = 0; idx < cb.side_levels(); ++idx) {
    cb.side_reproductions_1[idx] = r.f64();
    cb.side_reproductions_2[idx] = r.f64();
  }
  if (r.remaining() != 0) throw ParseError(ParseErrorKind::trailing_bytes, "codebook blob");
  if (!std::is_sorted(cb.central_reproductions.begin(), cb.central_reproductions.end())) {
    throw ParseError(ParseErrorKind::invalid_field, "central reproductions not ascending");
  }
  return cb;
}

}  // namespace csmdc
