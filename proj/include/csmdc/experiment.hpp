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

#ifndef CSMDC_EXPERIMENT_HPP
#define CSMDC_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csmdc/codecs.hpp"
#include "csmdc/core_model.hpp"
#include "csmdc/quantizers.hpp"
#include "csmdc/solvers.hpp"

namespace csmdc {

/// One coding scheme with its rate parameters.
///   gq:    fine_bits = B, coarse_bits = b
///   split: fine_bits = R
///   mdsq:  fine_bits = side_bits, spread
struct SchemeConfig {
  Scheme scheme = Scheme::gq;
  int fine_bits = 6;
  int coarse_bits = 2;
  int spread = 1;

  static SchemeConfig gq(int fine, int coarse) { return {Scheme::gq, fine, coarse, 0}; }
  static SchemeConfig split(int rate) { return {Scheme::split, rate, 0, 0}; }
  static SchemeConfig mdsq(int side_bits, int spread) { return {Scheme::mdsq, side_bits, 0, spread}; }

  /// Total payload bits per measurement across both descriptions.
  int total_rate() const;
  std::string label() const;

  friend bool operator==(const SchemeConfig&, const SchemeConfig&) = default;
};

struct ExperimentConfig {
  std::vector<SchemeConfig> schemes{SchemeConfig::gq(6, 2)};
  Index n = 256;
  Index k = 10;
  std::vector<Index> m_values{50};
  double sigma_x2 = 1.0;
  std::size_t trials = 100;
  std::uint64_t master_seed = 1;
  std::optional<double> loss_p;
  SolverOptions solver;
  double kappa = 1.0;
  int lloyd_iters = kDefaultLloydIterations;
  std::size_t codebook_training_vectors = 200;
  /// Worker threads for the trial loop; 0 picks hardware concurrency.
  unsigned threads = 0;

  /// Throws ConfigError on parameter combinations the codecs would reject.
  void validate() const;
};

enum class DecoderCase : std::uint8_t { side1 = 0, side2 = 1, central = 2, lost_all = 3 };

const char* to_string(DecoderCase c) noexcept;

/// A (scheme, m) cell of the sweep grid.
struct ConfigPoint {
  SchemeConfig scheme;
  Index m = 0;
};

/// Grid cells in scheme-major, then m order.
std::vector<ConfigPoint> expand(const ExperimentConfig& cfg);

struct TrialRecord {
  std::size_t config_index = 0;
  ConfigPoint point;
  std::size_t trial = 0;
  std::uint64_t signal_seed = 0;
  std::uint64_t matrix_seed = 0;
  std::uint64_t channel_seed = 0;
  std::uint8_t received_mask = 0b11;  // bit 0: description 1, bit 1: description 2
  DecoderCase decoder_case = DecoderCase::central;
  double rel_distortion = 0.0;
  double sq_rel_distortion = 0.0;
  int iterations = 0;
  std::string status;  // solver status, "skipped" for lost-all, "error: ..." on failure
  bool boxes_dropped = false;
  double wall_seconds = 0.0;

  bool failed() const { return status.rfind("error", 0) == 0 || status == "infeasible"; }
};

/// Codebook shared by encoder and decoder for an MDSQ configuration: trained
/// on measurement vectors normalized by their max magnitude, drawn from
/// seeds disjoint from the evaluation trials.
MdsqCodebook train_codebook(const ExperimentConfig& cfg, const SchemeConfig& scheme, Index m);

/// Stacks the selected rows of the sensing matrix.
Matrix select_rows(const Matrix& phi, const std::vector<Index>& rows);

/// Standard BPDN over every group, with one aggregate epsilon.
SolverResult<double> decode_bpdn(const DecoderInput& in, const Matrix& phi, double kappa,
                                 const SolverOptions& opts);

/// Side decoder with one l2 ball and one consistency box per group.
SolverResult<double> decode_gq_side(const DecoderInput& in, const Matrix& phi, double kappa,
                                    const SolverOptions& opts);

enum class ReceivedSet : std::uint8_t { none = 0, first = 1, second = 2, both = 3 };

/// Reconstruction from whichever descriptions arrived, using the decoder each
/// scheme prescribes: GQ side descriptions go through decode_gq_side, all
/// other cases through decode_bpdn.
SolverResult<double> decode_received(const std::optional<Description>& first,
                                     const std::optional<Description>& second,
                                     const Matrix& phi, const MdsqCodebook* cb, double kappa,
                                     const SolverOptions& opts);

/// Runs every (config point, trial) of the sweep. Records are ordered by
/// (config, trial, decoder case) regardless of how work was scheduled.
std::vector<TrialRecord> run_sweep(const ExperimentConfig& cfg);

/// Mean and normal-approximation 95% confidence half-width.
struct MeanCi {
  double mean = 0.0;
  double half_width = 0.0;
  std::size_t count = 0;
};

MeanCi mean_ci(const std::vector<double>& values);

struct CaseSummary {
  std::size_t config_index = 0;
  ConfigPoint point;
  DecoderCase decoder_case = DecoderCase::central;
  MeanCi rel;
  MeanCi sq_rel;
  std::size_t failures = 0;
};

std::vector<CaseSummary> summarize(const std::vector<TrialRecord>& records);

}  // namespace csmdc

#endif  // CSMDC_EXPERIMENT_HPP
