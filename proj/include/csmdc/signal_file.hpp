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

#ifndef CSMDC_SIGNAL_FILE_HPP
#define CSMDC_SIGNAL_FILE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "csmdc/core_model.hpp"

namespace csmdc {

/// A generated signal together with its measurements.
///
/// Layout, big-endian: "CSSG" | version u8 = 1 | basis u8 | reserved u16 = 0 |
/// n u32 | k u32 | m u32 | matrix_seed u64 | support k x u32 |
/// theta k x f64 | y m x f64.
struct SignalFile {
  SparseSignal signal;
  Measurements measurements;
};

inline constexpr std::uint8_t kSignalFileVersion = 1;

std::vector<std::uint8_t> serialize_signal_file(const SignalFile& f);
SignalFile parse_signal_file(std::span<const std::uint8_t> bytes);

/// Whole-file helpers; throw IoError.
std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace csmdc

#endif  // CSMDC_SIGNAL_FILE_HPP
