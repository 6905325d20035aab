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

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "svault/errors.hpp"
#include "svault/types.hpp"

namespace svault {

/// Value of the chord a-b at time t. Reconstruction and the vertical
/// distance use this exact expression, so the epsilon bound of the
/// simplifier holds bit-for-bit at reconstruction time.
inline double chord_value_at(const TimePoint& a, const TimePoint& b, Timestamp t) {
  if (t == a.timestamp) return a.value;
  if (t == b.timestamp) return b.value;
  const double u = static_cast<double>(t - a.timestamp) / static_cast<double>(b.timestamp - a.timestamp);
  return a.value + (b.value - a.value) * u;
}

/// Distance from point p to the chord a-b under the chosen metric.
/// Requires a.timestamp <= p.timestamp <= b.timestamp and a before b.
inline double point_to_chord_distance(const TimePoint& p, const TimePoint& a, const TimePoint& b,
                                      const DistanceMetric& metric) {
  if (a.timestamp >= b.timestamp)
    throw OrderingError("chord endpoints must satisfy a.timestamp < b.timestamp");
  if (p.timestamp < a.timestamp || p.timestamp > b.timestamp)
    throw OrderingError("point must lie within the chord's time span");

  if (metric.is_vertical()) return std::fabs(p.value - chord_value_at(a, b, p.timestamp));

  // Map seconds into value units, then measure true point-to-segment distance.
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

/// Indices of the points kept by Ramer-Douglas-Peucker simplification.
///
/// Iterative worklist form of the canonical recursion: for a chord (i, j),
/// the interior point of maximum distance is kept and the chord split when
/// that distance exceeds epsilon; otherwise all interior points are
/// discarded. Ties on the maximum break toward the lowest index, which makes
/// the split tree independent of epsilon and the kept sets nested across
/// epsilon values.
inline std::vector<std::size_t> simplify_indices(std::span<const TimePoint> points, Epsilon epsilon,
                                                 const DistanceMetric& metric) {
  const std::size_t n = points.size();
  if (n == 0) throw EmptyInputError("cannot simplify an empty series");
  if (n <= 2) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    return all;
  }

  std::vector<bool> keep(n, false);
  keep[0] = true;
  keep[n - 1] = true;

  std::vector<std::pair<std::size_t, std::size_t>> stack;
  stack.reserve(64);
  stack.emplace_back(0, n - 1);

  while (!stack.empty()) {
    const auto [lo, hi] = stack.back();
    stack.pop_back();
    if (hi - lo < 2) continue;

    double max_dist = -1.0;
    std::size_t max_idx = lo;
    for (std::size_t k = lo + 1; k < hi; ++k) {
      const double d = point_to_chord_distance(points[k], points[lo], points[hi], metric);
      if (d > max_dist) {
        max_dist = d;
        max_idx = k;
      }
    }

    if (max_dist > epsilon.value) {
      keep[max_idx] = true;
      stack.emplace_back(lo, max_idx);
      stack.emplace_back(max_idx, hi);
    }
  }

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < n; ++i)
    if (keep[i]) kept.push_back(i);
  return kept;
}

/// Simplified copy of the series: a subsequence of the input that always
/// contains the first and last point, with every discarded point within
/// epsilon of the simplified polyline.
inline TimeSeries simplify(const TimeSeries& series, Epsilon epsilon, const DistanceMetric& metric) {
  const auto kept = simplify_indices(series.points(), epsilon, metric);
  std::vector<TimePoint> out;
  out.reserve(kept.size());
  for (const std::size_t i : kept) out.push_back(series[i]);
  return TimeSeries{series.sensor(), std::move(out)};
}

/// Values of the simplified polyline at the requested timestamps: exact at
/// kept points, linear interpolation in between. Timestamps outside
/// [first, last] are an error; this function never extrapolates.
inline TimeSeries reconstruct(const TimeSeries& simplified, std::span<const Timestamp> at) {
  if (simplified.empty()) throw EmptyInputError("cannot reconstruct from an empty series");
  const auto& pts = simplified.points();

  std::vector<TimePoint> out;
  out.reserve(at.size());
  std::size_t seg = 0;
  for (const Timestamp t : at) {
    if (t < pts.front().timestamp || t > pts.back().timestamp)
      throw OutOfRangeError("timestamp " + std::to_string(t) + " outside simplified range [" +
                            std::to_string(pts.front().timestamp) + ", " +
                            std::to_string(pts.back().timestamp) + "]");
    if (t < pts[seg].timestamp) seg = 0;  // unordered request; restart the scan
    while (seg + 1 < pts.size() && pts[seg + 1].timestamp < t) ++seg;
    if (pts[seg].timestamp == t) {
      out.push_back(pts[seg]);
    } else {
      // t > pts[seg].timestamp and t <= back().timestamp, so seg+1 exists.
      out.push_back({t, chord_value_at(pts[seg], pts[seg + 1], t)});
    }
  }
  return TimeSeries{simplified.sensor(), std::move(out)};
}

}  // namespace svault
