// Copyright (c) 2026, the svault authors
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

#pragma once

// Naive recursive Ramer-Douglas-Peucker reference used as the test oracle.
// Intentionally written in the textbook recursive form, independent of the
// iterative implementation it checks. Test code only.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "svault/types.hpp"

namespace svault::testing {

inline double reference_distance(const TimePoint& p, const TimePoint& a, const TimePoint& b,
                                 const DistanceMetric& metric) {
  if (metric.is_vertical()) {
    const double u =
        static_cast<double>(p.timestamp - a.timestamp) / static_cast<double>(b.timestamp - a.timestamp);
    double chord;
    if (p.timestamp == a.timestamp)
      chord = a.value;
    else if (p.timestamp == b.timestamp)
      chord = b.value;
    else
      chord = a.value + (b.value - a.value) * u;
    return std::fabs(p.value - chord);
  }
  const double inv = 1.0 / metric.time_scale();
  const double dx = static_cast<double>(b.timestamp - a.timestamp) * inv;
  const double dy = b.value - a.value;
  const double px = static_cast<double>(p.timestamp - a.timestamp) * inv;
  const double py = p.value - a.value;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return std::hypot(px, py);
  double u = (px * dx + py * dy) / len2;
  if (u < 0.0) u = 0.0;
  if (u > 1.0) u = 1.0;
  return std::hypot(px - u * dx, py - u * dy);
}

inline void reference_rdp_recurse(std::span<const TimePoint> pts, std::size_t lo, std::size_t hi,
                                  double epsilon, const DistanceMetric& metric,
                                  std::vector<bool>& keep) {
  if (hi - lo < 2) return;
  double max_dist = -1.0;
  std::size_t max_idx = lo;
  for (std::size_t k = lo + 1; k < hi; ++k) {
    const double d = reference_distance(pts[k], pts[lo], pts[hi], metric);
    if (d > max_dist) {
      max_dist = d;
      max_idx = k;
    }
  }
  if (max_dist > epsilon) {
    keep[max_idx] = true;
    reference_rdp_recurse(pts, lo, max_idx, epsilon, metric, keep);
    reference_rdp_recurse(pts, max_idx, hi, epsilon, metric, keep);
  }
}

/// Kept indices per the textbook recursion, lowest-index tie-break.
inline std::vector<std::size_t> reference_rdp(std::span<const TimePoint> pts, double epsilon,
                                              const DistanceMetric& metric) {
  std::vector<std::size_t> out;
  if (pts.empty()) return out;
  if (pts.size() <= 2) {
    for (std::size_t i = 0; i < pts.size(); ++i) out.push_back(i);
    return out;
  }
  std::vector<bool> keep(pts.size(), false);
  keep.front() = true;
  keep.back() = true;
  reference_rdp_recurse(pts, 0, pts.size() - 1, epsilon, metric, keep);
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (keep[i]) out.push_back(i);
  return out;
}

}  // namespace svault::testing
