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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "csmdc/codecs.hpp"
#include "csmdc/error.hpp"
#include "csmdc/random.hpp"

using namespace csmdc;

namespace {

Measurements make_y(std::initializer_list<double> values, Index n = 16, std::uint64_t seed = 0x0102030405060708ull) {
  Measurements y;
  y.y = Eigen::Map<const Vector>(values.begin(), static_cast<Index>(values.size()));
  y.m = y.y.size();
  y.n = n;
  y.matrix_seed = seed;
  return y;
}

Measurements random_y(Rng& rng, Index m) {
  Measurements y;
  y.m = m;
  y.n = 64;
  y.matrix_seed = rng.next_u64();
  y.y.resize(m);
  for (Index i = 0; i < m; ++i) y.y(i) = rng.normal();
  return y;
}

Measurements example() { return make_y({0.3, -0.7, 0.1, 0.5}); }

}  // namespace

TEST(GqEncode, HandExample) {
  const auto pair = gq_encode(example(), 3, 1, 1.0);
  EXPECT_EQ(unpack_indices(pair.first), (std::vector<std::uint32_t>{5, 1, 1, 1}));
  EXPECT_EQ(unpack_indices(pair.second), (std::vector<std::uint32_t>{1, 0, 4, 6}));
  EXPECT_EQ(pair.first.payload_bits, 8u);
  EXPECT_EQ(pair.second.payload_bits, 8u);
  const auto l1 = payload_layout(pair.first);
  EXPECT_EQ(l1[0].second, 3);
  EXPECT_EQ(l1[2].second, 1);
}

TEST(GqEncode, GoldenBytes) {
  // Header fields and payload bits worked out by hand for the example above.
  const std::vector<std::uint8_t> golden1{
      'C', 'S', 'M', 'D', 0x01, 0x00, 0x01, 0x00,              // magic, version, scheme, id, flags
      0x00, 0x00, 0x00, 0x10, 0x00, 0x00, 0x00, 0x04,          // n = 16, m = 4
      0x03, 0x01, 0x00, 0x00,                                  // B, b, reserved
      0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07, 0x08,          // matrix seed
      0x3F, 0x80, 0x00, 0x00,                                  // S = 1.0f
      0x00, 0x00, 0x00, 0x08,                                  // 8 payload bits
      0xA7};                                                   // 101 001 1 1
  auto golden2 = golden1;
  golden2[6] = 0x02;
  golden2.back() = 0xA6;  // 1 0 100 110
  const auto pair = gq_encode(example(), 3, 1, 1.0);
  EXPECT_EQ(serialize(pair.first), golden1);
  EXPECT_EQ(serialize(pair.second), golden2);
  EXPECT_EQ(parse(golden1), pair.first);
}

TEST(GqEncode, EqualRatesRepeat) {
  Rng rng(1);
  const auto y = random_y(rng, 9);
  const auto pair = gq_encode(y, 5, 5);
  EXPECT_EQ(unpack_indices(pair.first), unpack_indices(pair.second));
  EXPECT_EQ(pair.first.payload, pair.second.payload);
}

TEST(GqEncode, ZeroCoarseMatchesSplit) {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto y = random_y(rng, 5 + t);
    const int R = 1 + t % 10;
    const auto g = gq_encode(y, R, 0);
    const auto s = split_encode(y, R);
    EXPECT_EQ(g.first.payload, s.first.payload);
    EXPECT_EQ(g.second.payload, s.second.payload);
    EXPECT_EQ(g.first.payload_bits, s.first.payload_bits);
    EXPECT_EQ(g.second.payload_bits, s.second.payload_bits);
  }
}

TEST(GqEncode, Errors) {
  EXPECT_THROW(gq_encode(make_y({0.5}), 3, 1), ConfigError);
  EXPECT_THROW(gq_encode(example(), 2, 3), ConfigError);
  EXPECT_THROW(gq_encode(example(), 17, 1), ConfigError);
  EXPECT_THROW(split_encode(make_y({0.5}), 3), ConfigError);
}

TEST(GqEncode, ScaleIsMaxMagnitude) {
  const auto pair = gq_encode(example(), 3, 1);
  EXPECT_EQ(pair.first.scale, 0.7f);
  EXPECT_EQ(pair.second.scale, 0.7f);
  EXPECT_EQ(gq_encode(make_y({0.0, 0.0}), 3, 1).first.scale, 1.0f);
}

TEST(GqEncode, BalanceAndRateAccounting) {
  Rng rng(3);
  for (Index m : {2, 3, 7, 50, 51}) {
    const auto y = random_y(rng, m);
    for (auto [B, b] : {std::pair{6, 2}, std::pair{4, 4}, std::pair{7, 1}}) {
      const auto pair = gq_encode(y, B, b);
      const long diff = long(pair.first.payload_bits) - long(pair.second.payload_bits);
      EXPECT_EQ(diff, m % 2 == 0 ? 0 : B - b);
      EXPECT_EQ(pair.first.payload_bits + pair.second.payload_bits, std::uint32_t(m * (B + b)));
      const auto h = (m + 1) / 2;
      EXPECT_EQ(pair.first.payload_bits, std::uint32_t(h * B + (m - h) * b));
    }
    const auto s = split_encode(y, 8);
    EXPECT_EQ(s.first.payload_bits + s.second.payload_bits, std::uint32_t(m * 8));
  }
}

TEST(SplitEncode, FourMeasurements) {
  const auto pair = split_encode(example(), 2, 1.0);
  EXPECT_EQ(pair.first.payload_bits, 4u);
  EXPECT_EQ(pair.second.payload_bits, 4u);
  EXPECT_EQ(payload_layout(pair.first).size(), 2u);
  EXPECT_EQ(parse(serialize(pair.first)), pair.first);
  EXPECT_EQ(parse(serialize(pair.second)), pair.second);
}

TEST(SplitEncode, CentralMergeIsFullQuantization) {
  Rng rng(4);
  const auto y = random_y(rng, 11);
  const auto pair = split_encode(y, 6);
  const auto in = gq_central_merge(pair.first, pair.second);
  ASSERT_EQ(in.groups.size(), 1u);
  const auto q = make_uniform_quantizer(pair.first.scale, 6);
  ASSERT_EQ(in.groups[0].rows.size(), 11u);
  for (Index i = 0; i < 11; ++i) {
    EXPECT_EQ(in.groups[0].rows[i], i);
    EXPECT_EQ(in.groups[0].values(i), dequantize(q, quantize(q, y.y(i))));
  }
  EXPECT_EQ(in.groups[0].delta, q.delta);
}

TEST(GqCentralMerge, PicksFineHalves) {
  const auto pair = gq_encode(example(), 3, 1, 1.0);
  for (const auto& in : {gq_central_merge(pair.first, pair.second), gq_central_merge(pair.second, pair.first)}) {
    ASSERT_EQ(in.groups.size(), 1u);
    const auto q = make_uniform_quantizer(1.0, 3);
    const std::uint32_t expected[] = {5, 1, 4, 6};
    for (int i = 0; i < 4; ++i) EXPECT_EQ(in.groups[0].values(i), dequantize(q, expected[i]));
    EXPECT_EQ(in.groups[0].delta, 0.25);
  }
}

TEST(GqCentralMerge, EqualRatesMatchEitherDescription) {
  Rng rng(5);
  const auto y = random_y(rng, 8);
  const auto pair = gq_encode(y, 4, 4);
  const auto in = gq_central_merge(pair.first, pair.second);
  const auto q = make_uniform_quantizer(pair.first.scale, 4);
  const auto idx = unpack_indices(pair.second);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(in.groups[0].values(i), dequantize(q, idx[i]));
}

TEST(GqCentralMerge, MismatchedHeaders) {
  const auto a = gq_encode(example(), 3, 1, 1.0);
  const auto b = gq_encode(example(), 4, 1, 1.0);
  EXPECT_THROW(gq_central_merge(a.first, b.second), ConfigError);
  EXPECT_THROW(gq_central_merge(a.first, a.first), ConfigError);
}

TEST(GqSideExtract, HandExample) {
  const auto pair = gq_encode(example(), 3, 1, 1.0);
  const auto in = gq_side_extract(pair.first);
  ASSERT_EQ(in.groups.size(), 2u);
  EXPECT_EQ(in.groups[0].rows, (std::vector<Index>{0, 1}));
  EXPECT_EQ(in.groups[0].delta, 0.25);
  EXPECT_EQ(in.groups[1].rows, (std::vector<Index>{2, 3}));
  EXPECT_EQ(in.groups[1].delta, 1.0);
  EXPECT_EQ(in.groups[1].values(0), 0.5);
  const auto in2 = gq_side_extract(pair.second);
  EXPECT_EQ(in2.groups[0].rows, (std::vector<Index>{2, 3}));
  EXPECT_EQ(in2.groups[1].rows, (std::vector<Index>{0, 1}));
}

TEST(GqSideExtract, ZeroCoarseSingleGroup) {
  Rng rng(6);
  const auto y = random_y(rng, 7);
  EXPECT_EQ(gq_side_extract(gq_encode(y, 5, 0).first).groups.size(), 1u);
  EXPECT_EQ(gq_side_extract(split_encode(y, 5).second).groups.size(), 1u);
  EXPECT_EQ(gq_side_extract(split_encode(y, 5).second).groups[0].rows.size(), 3u);
}

TEST(GqSideExtract, GroupsPartition) {
  Rng rng(7);
  for (Index m : {2, 5, 50, 51}) {
    const auto y = random_y(rng, m);
    const auto pair = gq_encode(y, 6, 2);
    for (const auto* d : {&pair.first, &pair.second}) {
      std::set<Index> seen;
      std::size_t total = 0;
      for (const auto& g : gq_side_extract(*d).groups) {
        total += g.rows.size();
        seen.insert(g.rows.begin(), g.rows.end());
      }
      EXPECT_EQ(total, std::size_t(m));
      EXPECT_EQ(seen.size(), std::size_t(m));
    }
  }
}

TEST(GqSideExtract, ValuesAreConsistentWithTruth) {
  // The unquantized measurement lies inside every reported cell.
  Rng rng(8);
  const auto y = random_y(rng, 20);
  const auto pair = gq_encode(y, 6, 2);
  for (const auto& g : gq_side_extract(pair.second).groups) {
    for (std::size_t t = 0; t < g.rows.size(); ++t) {
      EXPECT_LE(std::abs(g.values(Index(t)) - y.y(g.rows[t])), g.delta / 2 * (1 + 1e-6));
    }
  }
}

TEST(MdsqEncodeVec, SpreadZeroIdentical) {
  Rng rng(9);
  const auto cb = mdsq_design(4, 0, 1.0, 0, {});
  const auto pair = mdsq_encode_vec(random_y(rng, 30), cb);
  EXPECT_EQ(pair.first.payload, pair.second.payload);
}

TEST(MdsqEncodeVec, SingleMeasurement) {
  const auto cb = mdsq_design(3, 1, 1.0, 0, {});
  const auto pair = mdsq_encode_vec(make_y({0.4}), cb);
  EXPECT_EQ(pair.first.payload_bits, 3u);
  EXPECT_EQ(pair.second.payload_bits, 3u);
}

TEST(MdsqEncodeVec, MatchesPerSampleOracle) {
  Rng rng(10);
  const auto cb = mdsq_design(3, 1, 1.0, 0, {});
  const auto y = random_y(rng, 25);
  const auto pair = mdsq_encode_vec(y, cb);
  const double s = y.y.cwiseAbs().maxCoeff();
  const auto i_idx = unpack_indices(pair.first);
  const auto j_idx = unpack_indices(pair.second);
  for (Index t = 0; t < 25; ++t) {
    const double v = y.y(t) * cb.scale / double(float(s));
    std::uint32_t best = 0;
    for (std::uint32_t c = 1; c < cb.central_levels; ++c) {
      if (std::abs(v - cb.central_reproductions[c]) < std::abs(v - cb.central_reproductions[best])) best = c;
    }
    EXPECT_EQ(i_idx[t], cb.ia_forward[best].i);
    EXPECT_EQ(j_idx[t], cb.ia_forward[best].j);
  }
}

TEST(MdsqMerge, CentralAndSideValues) {
  Rng rng(11);
  const auto cb = mdsq_design(4, 1, 1.0, 0, {});
  const auto y = random_y(rng, 12);
  const auto pair = mdsq_encode_vec(y, cb);
  const double s = pair.first.scale;
  const auto c = mdsq_central_merge(pair.first, pair.second, cb);
  const auto s1 = mdsq_side_extract(pair.first, cb);
  ASSERT_EQ(c.groups.size(), 1u);
  ASSERT_EQ(s1.groups.size(), 1u);
  EXPECT_FALSE(c.groups[0].consistent);
  const auto i_idx = unpack_indices(pair.first);
  const auto j_idx = unpack_indices(pair.second);
  for (Index t = 0; t < 12; ++t) {
    EXPECT_NEAR(c.groups[0].values(t), mdsq_decode_central(cb, i_idx[t], j_idx[t]) * s / cb.scale, 1e-12);
    EXPECT_NEAR(s1.groups[0].values(t), mdsq_decode_side(cb, i_idx[t], Side::first) * s / cb.scale, 1e-12);
  }
}

TEST(Wire, RoundTripAllSchemes) {
  Rng rng(12);
  const auto cb = mdsq_design(5, 2, 1.0, 0, {});
  for (Index m : {2, 3, 17, 64}) {
    const auto y = random_y(rng, m);
    for (const auto& pair : {gq_encode(y, 6, 2), split_encode(y, 8), mdsq_encode_vec(y, cb), gq_encode(y, 16, 0)}) {
      for (const auto* d : {&pair.first, &pair.second}) {
        const auto bytes = serialize(*d);
        EXPECT_EQ(bytes.size(), kHeaderBytes + (d->payload_bits + 7) / 8);
        const auto back = parse(bytes);
        EXPECT_EQ(back, *d);
        EXPECT_EQ(serialize(back), bytes);
      }
    }
  }
}

TEST(Wire, TypedErrors) {
  const auto good = serialize(gq_encode(example(), 3, 1, 1.0).first);
  auto expect_kind = [](std::vector<std::uint8_t> b, ParseErrorKind kind) {
    try {
      parse(b);
      ADD_FAILURE() << "accepted";
    } catch (const ParseError& e) {
      EXPECT_EQ(e.kind(), kind) << e.what();
    }
  };
  auto b = good;
  b[0] = 'X';
  expect_kind(b, ParseErrorKind::bad_magic);
  b = good;
  b[4] = 2;
  expect_kind(b, ParseErrorKind::unsupported_version);
  b = good;
  b[5] = 3;
  expect_kind(b, ParseErrorKind::invalid_field);
  b = good;
  b[6] = 0;
  expect_kind(b, ParseErrorKind::invalid_field);
  b = good;
  b[7] = 1;
  expect_kind(b, ParseErrorKind::invalid_field);
  b = good;
  b[18] = 1;
  expect_kind(b, ParseErrorKind::invalid_field);
  b = good;
  b[17] = 4;  // b > B
  expect_kind(b, ParseErrorKind::invalid_field);
  b = good;
  b[35] = 9;
  expect_kind(b, ParseErrorKind::inconsistent_length);
  b = good;
  b[15] = 5;  // m = 5 changes the implied payload length
  expect_kind(b, ParseErrorKind::inconsistent_length);
  b = good;
  b.pop_back();
  expect_kind(b, ParseErrorKind::truncated);
  expect_kind({good.begin(), good.begin() + 20}, ParseErrorKind::truncated);
  expect_kind({good.begin(), good.begin() + 2}, ParseErrorKind::truncated);
  b = good;
  b.push_back(0);
  expect_kind(b, ParseErrorKind::trailing_bytes);
  b = good;
  b[28] = 0xFF;  // S becomes NaN
  b[29] = 0xC0;
  expect_kind(b, ParseErrorKind::invalid_field);

  // Nonzero padding bits: m = 3, B = 3, b = 1 gives 7 payload bits.
  auto pad = serialize(gq_encode(make_y({0.3, -0.7, 0.1}), 3, 1, 1.0).first);
  ASSERT_EQ(pad[35], 7);
  pad.back() |= 1;
  expect_kind(pad, ParseErrorKind::invalid_field);
}

TEST(Wire, RandomMutationsNeverCrash) {
  Rng rng(13);
  const auto base = serialize(gq_encode(random_y(rng, 21), 6, 2).second);
  for (int t = 0; t < 2000; ++t) {
    auto b = base;
    const int edits = 1 + int(rng.uniform_index(4));
    for (int e = 0; e < edits; ++e) b[rng.uniform_index(b.size())] ^= std::uint8_t(1 + rng.uniform_index(255));
    try {
      const auto d = parse(b);
      // Accepted strings must be canonical.
      EXPECT_EQ(serialize(d), b);
    } catch (const ParseError&) {
    }
  }
}
