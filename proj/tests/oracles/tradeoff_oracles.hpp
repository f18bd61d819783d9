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

#ifndef CSMDC_TESTS_TRADEOFF_ORACLES_HPP
#define CSMDC_TESTS_TRADEOFF_ORACLES_HPP

#include <algorithm>
#include <utility>
#include <vector>

namespace oracle {

/// Expected distortion by listing the four loss events of two independent
/// descriptions: (received 1, received 2) -> distortion.
inline double avg_distortion_events(double d_side, double d_central, double p) {
  const double q = 1.0 - p;
  struct Event {
    double prob;
    double distortion;
  };
  const Event events[] = {
      {q * q, d_central},  // both arrive
      {q * p, d_side},     // only the first
      {p * q, d_side},     // only the second
      {p * p, 1.0},        // neither
  };
  double total = 0.0;
  for (const auto& e : events) total += e.prob * e.distortion;
  return total;
}

using Point = std::pair<double, double>;

/// Membership in the lower-left hull: a point is excluded iff some convex
/// combination of two other points (possibly the same one twice) is no worse
/// in both coordinates and strictly better in one. O(n^3).
inline std::vector<bool> lower_left_hull_members(const std::vector<Point>& pts) {
  const std::size_t n = pts.size();
  std::vector<bool> member(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n && member[i]; ++j) {
      for (std::size_t k = 0; k < n && member[i]; ++k) {
        if (j == i || k == i) continue;
        // q(l) = l * p_j + (1 - l) * p_k, l in [0, 1]; need q(l) <= p_i.
        double lo = 0.0, hi = 1.0;
        bool empty = false;
        auto constrain = [&](double a, double c) {  // a * l <= c
          if (a > 0) hi = std::min(hi, c / a);
          else if (a < 0) lo = std::max(lo, c / a);
          else if (c < 0) empty = true;
        };
        const auto& pj = pts[j];
        const auto& pk = pts[k];
        const auto& pi = pts[i];
        constrain(pj.first - pk.first, pi.first - pk.first);
        constrain(pj.second - pk.second, pi.second - pk.second);
        if (empty || lo > hi) continue;
        for (double l : {lo, hi}) {
          const double qx = l * pj.first + (1 - l) * pk.first;
          const double qy = l * pj.second + (1 - l) * pk.second;
          if ((qx < pi.first - 1e-12 && qy <= pi.second + 1e-12) ||
              (qy < pi.second - 1e-12 && qx <= pi.first + 1e-12)) {
            member[i] = false;
          }
        }
      }
    }
  }
  return member;
}

}  // namespace oracle

#endif  // CSMDC_TESTS_TRADEOFF_ORACLES_HPP
