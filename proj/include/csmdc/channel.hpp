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

#ifndef CSMDC_CHANNEL_HPP
#define CSMDC_CHANNEL_HPP

#include <cstdint>
#include <vector>

#include "csmdc/codecs.hpp"
#include "csmdc/experiment.hpp"

namespace csmdc {

/// Memoryless channel losing each description independently with probability p.
struct LossModel {
  double p = 0.0;
  std::uint64_t seed = 0;
};

struct Received {
  bool first = true;
  bool second = true;

  std::uint8_t mask() const {
    return static_cast<std::uint8_t>((first ? 1 : 0) | (second ? 2 : 0));
  }
  int count() const { return (first ? 1 : 0) + (second ? 1 : 0); }
};

/// Which descriptions of `pair` survive trial `trial`; a pure function of
/// (model.seed, trial).
Received transmit(const DescriptionPair& pair, const LossModel& model, std::uint64_t trial);

/// Expected distortion over the four loss events, with total loss counted as
/// distortion 1 (zero reconstruction in normalized units).
inline double avg_distortion(double d_side, double d_central, double p) {
  return 2.0 * d_side * p * (1.0 - p) + d_central * (1.0 - p) * (1.0 - p) + p * p;
}

struct TradeoffPoint {
  SchemeConfig config;
  double d_side = 0.0;     // mean squared relative distortion, both side decoders
  double d_central = 0.0;  // mean squared relative distortion, central decoder
  std::size_t trials = 0;
  MeanCi side_rel;         // unsquared relative distortion, for plotting
  MeanCi central_rel;
  MeanCi side_sq;
  MeanCi central_sq;
  std::size_t failures = 0;

  bool flagged() const { return failures > 0; }
};

/// One point per split of the rate R into B + b with B >= b >= 0; the b = 0
/// point is CS-SPLIT at rate R. Every point reuses the same trial seeds.
/// Uses base.m_values.front().
std::vector<TradeoffPoint> tradeoff_curve(const ExperimentConfig& base, int rate);

/// Lower-left convex hull in the (d_side, d_central) plane, sorted by d_side.
/// Dominated points are removed; collinear hull points are kept.
std::vector<TradeoffPoint> lower_left_hull(const std::vector<TradeoffPoint>& points);

/// Hull point minimizing avg_distortion at loss probability p; ties go to the
/// smaller d_central. Equivalent to the tangency point of slope -2p/(1-p).
TradeoffPoint optimal_operating_point(const std::vector<TradeoffPoint>& hull, double p);

}  // namespace csmdc

#endif  // CSMDC_CHANNEL_HPP
