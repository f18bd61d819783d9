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

#ifndef CSMDC_RANDOM_HPP
#define CSMDC_RANDOM_HPP

#include <cstdint>
#include <random>

namespace csmdc {

// Every generator in the project is built on std::mt19937_64, whose output
// sequence is fixed by the standard. The uniform and normal transforms below
// are written out by hand because the <random> distributions are
// implementation-defined and would break bit-exact reproducibility across
// standard libraries.

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Purpose tags used when deriving per-trial seeds.
enum class SeedPurpose : std::uint64_t {
  signal = 1,
  matrix = 2,
  channel = 3,
  codebook = 4,
  fuzz = 5,
};

/// Seed for (master, trial, purpose). Pure; no global state.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial,
                          SeedPurpose purpose) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer in [0, bound) by rejection; bound must be > 0.
  std::uint64_t uniform_index(std::uint64_t bound);

  /// Standard normal variate (Marsaglia polar method).
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace csmdc

#endif  // CSMDC_RANDOM_HPP
