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

#ifndef CSMDC_BOUNDS_HPP
#define CSMDC_BOUNDS_HPP

#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csmdc/quantizers.hpp"

namespace csmdc {

/// Base of the logarithm in the "m > 60 log n" condition and the bound
/// denominators.
inline constexpr double kDefaultLogBase = std::numbers::e;

struct BoundInputs {
  long n = 256;
  long m = 50;
  long k = 10;
  double sigma_x2 = 1.0;
  int R = 4;
  /// Coherence of the sensing matrix. When absent it is computed from a
  /// Gaussian matrix drawn with matrix_seed.
  std::optional<double> mu;
  /// Per-measurement side quantizer MSE, needed by thm2_central only.
  std::optional<double> d_sm_side;
  std::uint64_t matrix_seed = 1;
  double log_base = kDefaultLogBase;
};

/// One named inequality. margin > 0 exactly when it holds.
struct HypothesisCheck {
  std::string name;
  bool passed = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
};

struct BoundReport {
  double lower = 0.0;
  double upper = 0.0;  // +inf when the denominator is not positive
  bool hypotheses_ok = false;
  std::vector<HypothesisCheck> checks;
  std::vector<std::string> violated;
  std::optional<double> gamma_d;  // thm2_central only
};

BoundReport thm1_side(const BoundInputs& in);
BoundReport thm1_central(const BoundInputs& in);
BoundReport thm2_side(const BoundInputs& in);
BoundReport thm2_central(const BoundInputs& in);

/// Nullopt when the square root's argument is negative or the bracket is not
/// positive.
std::optional<double> gamma_d(double d_sm_side, double sigma_x2, long m, long k, int R);

/// Mean squared quantization error of a uniform quantizer over samples.
double estimate_d_sm_side(const QuantizerSpec& spec, std::span<const double> samples);
/// Same for the side-1 decoder of an MDSQ codebook.
double estimate_d_sm_side(const MdsqCodebook& cb, std::span<const double> samples);

/// m > 60 log n, k < (1/mu + 1)/4, and positivity of both denominators.
std::vector<HypothesisCheck> check_hypotheses(const BoundInputs& in);

/// Denominator 1 - sqrt(c log n / m)(4k - 1).
double bound_denominator(const BoundInputs& in, double c);

}  // namespace csmdc

#endif  // CSMDC_BOUNDS_HPP
