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

#ifndef CSMDC_HARNESS_HPP
#define CSMDC_HARNESS_HPP

#include <optional>
#include <string>
#include <vector>

#include "csmdc/bounds.hpp"
#include "csmdc/channel.hpp"
#include "csmdc/experiment.hpp"

namespace csmdc {

/// Sweep configuration read from a key-value text file.
///
///   # comment
///   scheme = gq 6 2        (repeatable; also "split 8", "mdsq 4 [spread]")
///   n = 256
///   k = 10
///   m = 50                 (or "78:122:11" as first:last:step, or "50,60,70")
///   sigma_x2 = 1
///   trials = 100
///   seed = 1
///   p = 0.1                (optional loss probability)
///   kappa = 1
///   max_iters = 5000
///   abs_tol = 1e-6
///   rel_tol = 1e-4
///   penalty = 1
///   feasibility_slack = 1e-3
///   lloyd_iters = 20
///   training_vectors = 200
///   threads = 0
///   rate = 8               (total rate for the optimizer)
///   out = results.csv
///
/// Unknown keys and malformed values are rejected.
struct HarnessConfig {
  ExperimentConfig experiment;
  std::optional<int> rate;
  std::optional<std::string> out;
};

HarnessConfig parse_config(const std::string& text);
HarnessConfig load_config(const std::string& path);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

struct CsvOptions {
  bool timing = false;
};

std::string records_csv(const std::vector<TrialRecord>& records, const CsvOptions& opts = {});
std::string records_json(const std::vector<TrialRecord>& records, const CsvOptions& opts = {});
std::string summary_csv(const std::vector<CaseSummary>& summary);
/// Human-readable per-case table.
std::string summary_text(const std::vector<CaseSummary>& summary);

struct OptimizerReport {
  double p = 0.0;
  int rate = 0;
  std::vector<TradeoffPoint> curve;
  std::vector<TradeoffPoint> hull;
  TradeoffPoint selected;
};

/// Rate defaults to the total rate of the first configured scheme.
OptimizerReport run_optimizer(const HarnessConfig& cfg, double p);
std::string curve_csv(const OptimizerReport& report);
std::string optimizer_text(const OptimizerReport& report);

struct BoundsRow {
  int R = 0;
  BoundReport thm1_side;
  BoundReport thm1_central;
  BoundReport thm2_side;
  std::optional<BoundReport> thm2_central;
  std::optional<double> d_sm_side;
};

/// Side-1 MSE of an MDSQ quantizer (R side bits, spread 1, loading 4 standard
/// deviations) on Gaussian measurements of variance k sigma_x2 / m.
/// Nullopt when R exceeds the MDSQ side-bit limit.
std::optional<double> default_d_sm_side(const BoundInputs& in, std::uint64_t seed);

/// Evaluates every bound for R in [r_first, r_last]. Uses in.d_sm_side if set,
/// otherwise default_d_sm_side.
std::vector<BoundsRow> run_bounds(const BoundInputs& in, int r_first, int r_last);
std::string bounds_csv(const std::vector<BoundsRow>& rows);
std::string bounds_text(const BoundInputs& in, const std::vector<BoundsRow>& rows);

}  // namespace csmdc

#endif  // CSMDC_HARNESS_HPP
