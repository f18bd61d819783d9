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

#include "csmdc/channel.hpp"

#include <algorithm>

#include "csmdc/error.hpp"
#include "csmdc/random.hpp"

namespace csmdc {

Received transmit(const DescriptionPair& pair, const LossModel& model, std::uint64_t trial) {
  (void)pair;
  if (!(model.p >= 0.0 && model.p <= 1.0)) throw ConfigError("transmit: p must be in [0, 1]");
  Rng rng(derive_seed(model.seed, trial, SeedPurpose::channel));
  Received r;
  r.first = !(rng.uniform() < model.p);
  r.second = !(rng.uniform() < model.p);
  return r;
}

std::vector<TradeoffPoint> tradeoff_curve(const ExperimentConfig& base, int rate) {
  if (rate < 2) throw ConfigError("tradeoff_curve: rate must be at least 2");
  if (base.m_values.empty()) throw ConfigError("tradeoff_curve: no m value");
  ExperimentConfig cfg = base;
  cfg.loss_p.reset();
  cfg.m_values = {base.m_values.front()};
  cfg.schemes.clear();
  for (int b = 0; 2 * b <= rate; ++b) {
    cfg.schemes.push_back(b == 0 ? SchemeConfig::split(rate) : SchemeConfig::gq(rate - b, b));
  }
  const auto records = run_sweep(cfg);

  std::vector<TradeoffPoint> points(cfg.schemes.size());
  std::vector<std::vector<double>> side_rel(points.size()), side_sq(points.size());
  std::vector<std::vector<double>> central_rel(points.size()), central_sq(points.size());
  for (const auto& r : records) {
    auto& pt = points[r.config_index];
    if (r.failed()) ++pt.failures;
    // Side statistics pool both side decoders.
    const bool side = r.decoder_case != DecoderCase::central;
    (side ? side_rel : central_rel)[r.config_index].push_back(r.rel_distortion);
    (side ? side_sq : central_sq)[r.config_index].push_back(r.sq_rel_distortion);
  }
  for (std::size_t c = 0; c < points.size(); ++c) {
    auto& pt = points[c];
    pt.config = cfg.schemes[c];
    pt.side_rel = mean_ci(side_rel[c]);
    pt.side_sq = mean_ci(side_sq[c]);
    pt.central_rel = mean_ci(central_rel[c]);
    pt.central_sq = mean_ci(central_sq[c]);
    pt.d_side = pt.side_sq.mean;
    pt.d_central = pt.central_sq.mean;
    pt.trials = pt.central_sq.count;
  }
  return points;
}

namespace {

bool dominates(const TradeoffPoint& a, const TradeoffPoint& b) {
  return a.d_side <= b.d_side && a.d_central <= b.d_central &&
         (a.d_side < b.d_side || a.d_central < b.d_central);
}

// z-component of (b - a) x (c - a).
double cross(const TradeoffPoint& a, const TradeoffPoint& b, const TradeoffPoint& c) {
  return (b.d_side - a.d_side) * (c.d_central - a.d_central) -
         (b.d_central - a.d_central) * (c.d_side - a.d_side);
}

}  // namespace

std::vector<TradeoffPoint> lower_left_hull(const std::vector<TradeoffPoint>& points) {
  // Points with failed decodes are not trusted estimates and never enter.
  std::vector<TradeoffPoint> front;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool keep = !points[i].flagged();
    for (std::size_t j = 0; j < points.size() && keep; ++j) {
      if (j == i || points[j].flagged()) continue;
      if (dominates(points[j], points[i])) keep = false;
      // Exact duplicates: keep the first occurrence only.
      if (j < i && points[j].d_side == points[i].d_side && points[j].d_central == points[i].d_central) {
        keep = false;
      }
    }
    if (keep) front.push_back(points[i]);
  }
  // The Pareto front has d_central strictly decreasing in d_side.
  std::sort(front.begin(), front.end(), [](const TradeoffPoint& a, const TradeoffPoint& b) {
    return a.d_side < b.d_side;
  });
  // Monotone chain, lower side; pop only on strict clockwise turns so that
  // collinear points stay on the hull.
  std::vector<TradeoffPoint> hull;
  for (const auto& p : front) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) < 0.0) hull.pop_back();
    hull.push_back(p);
  }
  return hull;
}

TradeoffPoint optimal_operating_point(const std::vector<TradeoffPoint>& hull, double p) {
  if (hull.empty()) throw ConfigError("optimal_operating_point: empty hull");
  if (!(p >= 0.0 && p < 1.0)) throw ConfigError("optimal_operating_point: p must be in [0, 1)");
  std::size_t best = 0;
  double best_val = avg_distortion(hull[0].d_side, hull[0].d_central, p);
  for (std::size_t i = 1; i < hull.size(); ++i) {
    const double v = avg_distortion(hull[i].d_side, hull[i].d_central, p);
    if (v < best_val || (v == best_val && hull[i].d_central < hull[best].d_central)) {
      best = i;
      best_val = v;
    }
  }
  return hull[best];
}

}  // namespace csmdc
