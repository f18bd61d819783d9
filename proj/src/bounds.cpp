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

#include "csmdc/bounds.hpp"

#include <cmath>
#include <limits>

#include "csmdc/core_model.hpp"
#include "csmdc/error.hpp"

namespace csmdc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const char* const kMCondition = "m > 60 log n";
const char* const kKCondition = "k < (1/mu + 1)/4";
const char* const kDenom30 = "1 - sqrt(30 log n / m)(4k - 1) > 0";
const char* const kDenom15 = "1 - sqrt(15 log n / m)(4k - 1) > 0";
const char* const kGammaDefined = "gamma_D defined";

void validate(const BoundInputs& in) {
  if (in.n < 2 || in.m < 1 || in.k < 1) throw ConfigError("bounds: need n >= 2, m >= 1, k >= 1");
  if (!(in.sigma_x2 > 0.0)) throw ConfigError("bounds: sigma_x2 must be positive");
  if (in.R < 1) throw ConfigError("bounds: R must be at least 1");
  if (in.mu && !(*in.mu >= 0.0)) throw ConfigError("bounds: mu must be non-negative");
  if (!(in.log_base > 1.0)) throw ConfigError("bounds: log base must exceed 1");
}

double log_n(const BoundInputs& in) {
  return std::log(static_cast<double>(in.n)) / std::log(in.log_base);
}

double coherence_of(const BoundInputs& in) {
  if (in.mu) return *in.mu;
  return coherence(gen_sensing_matrix(in.m, in.n, in.matrix_seed));
}

HypothesisCheck greater(const char* name, double lhs, double rhs) {
  return {name, lhs > rhs, lhs, rhs, lhs - rhs};
}

HypothesisCheck m_check(const BoundInputs& in) {
  return greater(kMCondition, static_cast<double>(in.m), 60.0 * log_n(in));
}

HypothesisCheck k_check(const BoundInputs& in) {
  const double mu = coherence_of(in);
  const double rhs = mu > 0.0 ? 0.25 * (1.0 / mu + 1.0) : kInf;
  const double k = static_cast<double>(in.k);
  return {kKCondition, k < rhs, k, rhs, rhs - k};
}

HypothesisCheck denom_check(const BoundInputs& in, double c) {
  return greater(c == 30.0 ? kDenom30 : kDenom15, bound_denominator(in, c), 0.0);
}

BoundReport make_report(const BoundInputs& in, double scale, double c,
                        std::vector<HypothesisCheck> extra = {}) {
  BoundReport r;
  const double k = static_cast<double>(in.k);
  const double m = static_cast<double>(in.m);
  r.lower = (k * k / m) * in.sigma_x2 * scale;
  const double denom = bound_denominator(in, c);
  r.upper = denom > 0.0 ? 4.0 * k * in.sigma_x2 * scale / denom : kInf;
  r.checks = {m_check(in), k_check(in), denom_check(in, c)};
  for (auto& e : extra) r.checks.push_back(std::move(e));
  r.hypotheses_ok = true;
  for (const auto& chk : r.checks) {
    if (!chk.passed) {
      r.hypotheses_ok = false;
      r.violated.push_back(chk.name);
    }
  }
  return r;
}

}  // namespace

double bound_denominator(const BoundInputs& in, double c) {
  return 1.0 - std::sqrt(c * log_n(in) / static_cast<double>(in.m)) * (4.0 * static_cast<double>(in.k) - 1.0);
}

BoundReport thm1_side(const BoundInputs& in) {
  validate(in);
  return make_report(in, std::exp2(-2.0 * in.R), 30.0);
}

BoundReport thm1_central(const BoundInputs& in) {
  validate(in);
  return make_report(in, std::exp2(-2.0 * in.R), 15.0);
}

BoundReport thm2_side(const BoundInputs& in) {
  validate(in);
  return make_report(in, std::exp2(-2.0 * in.R), 15.0);
}

BoundReport thm2_central(const BoundInputs& in) {
  validate(in);
  if (!in.d_sm_side) throw ConfigError("thm2_central: d_sm_side is required");
  const auto g = gamma_d(*in.d_sm_side, in.sigma_x2, in.m, in.k, in.R);
  HypothesisCheck defined{kGammaDefined, g.has_value(), g ? *g : 0.0, 0.0, g ? *g : -1.0};
  BoundReport r = g ? make_report(in, std::exp2(-4.0 * in.R) * *g, 15.0, {defined})
                    : make_report(in, std::numeric_limits<double>::quiet_NaN(), 15.0, {defined});
  if (!g) {
    r.lower = std::numeric_limits<double>::quiet_NaN();
    r.upper = kInf;
  }
  r.gamma_d = g;
  return r;
}

std::optional<double> gamma_d(double d_sm_side, double sigma_x2, long m, long k, int R) {
  if (!(d_sm_side >= 0.0) || !(sigma_x2 > 0.0) || m < 1 || k < 1) {
    throw ConfigError("gamma_d: inputs must be positive");
  }
  const double d = d_sm_side / ((sigma_x2 / static_cast<double>(m)) * static_cast<double>(k));
  const double radicand = d * d - std::exp2(-4.0 * R);
  if (radicand < 0.0) return std::nullopt;
  const double a = (1.0 - d) - std::sqrt(radicand);
  const double bracket = 1.0 - a * a;
  if (!(bracket > 0.0)) return std::nullopt;
  return 1.0 / bracket;
}

double estimate_d_sm_side(const QuantizerSpec& spec, std::span<const double> samples) {
  if (samples.empty()) throw ConfigError("estimate_d_sm_side: no samples");
  double acc = 0.0;
  for (double v : samples) {
    const double e = v - dequantize(spec, quantize(spec, v));
    acc += e * e;
  }
  return acc / static_cast<double>(samples.size());
}

double estimate_d_sm_side(const MdsqCodebook& cb, std::span<const double> samples) {
  if (samples.empty()) throw ConfigError("estimate_d_sm_side: no samples");
  double acc = 0.0;
  for (double v : samples) {
    const auto p = mdsq_encode(cb, v);
    const double e = v - mdsq_decode_side(cb, p.i, Side::first);
    acc += e * e;
  }
  return acc / static_cast<double>(samples.size());
}

std::vector<HypothesisCheck> check_hypotheses(const BoundInputs& in) {
  validate(in);
  return {m_check(in), k_check(in), denom_check(in, 30.0), denom_check(in, 15.0)};
}

}  // namespace csmdc
