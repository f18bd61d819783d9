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

#ifndef CSMDC_BITSTREAM_HPP
#define CSMDC_BITSTREAM_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "csmdc/error.hpp"

namespace csmdc {

/// Big-endian byte sink.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(std::span<const std::uint8_t> b) { bytes_.insert(bytes_.end(), b.begin(), b.end()); }

  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  void put(std::uint64_t v, int n) {
    for (int s = 8 * (n - 1); s >= 0; s -= 8) bytes_.push_back(static_cast<std::uint8_t>(v >> s));
  }
  std::vector<std::uint8_t> bytes_;
};

/// Big-endian byte source; every read past the end throws ParseError(truncated).
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }

  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }

  std::span<const std::uint8_t> raw(std::size_t n) {
    need(n);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) throw ParseError(ParseErrorKind::truncated, "unexpected end of input");
  }
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 8) | bytes_[pos_++];
    return v;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

/// MSB-first bit packer; the final byte is zero-padded.
class BitWriter {
 public:
  void put(std::uint32_t value, int width) {
    for (int b = width - 1; b >= 0; --b) {
      if (bit_len_ % 8 == 0) bytes_.push_back(0);
      if ((value >> b) & 1u) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (bit_len_ % 8));
      ++bit_len_;
    }
  }

  std::size_t bit_length() const { return bit_len_; }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t bit_len_ = 0;
};

class BitReader {
 public:
  BitReader(std::span<const std::uint8_t> bytes, std::size_t bit_length)
      : bytes_(bytes), bit_len_(bit_length) {}

  std::uint32_t get(int width) {
    if (pos_ + static_cast<std::size_t>(width) > bit_len_) {
      throw ParseError(ParseErrorKind::truncated, "bit stream exhausted");
    }
    std::uint32_t v = 0;
    for (int b = 0; b < width; ++b, ++pos_) {
      v = (v << 1) | ((bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1u);
    }
    return v;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t bit_len_;
  std::size_t pos_ = 0;
};

}  // namespace csmdc

#endif  // CSMDC_BITSTREAM_HPP
