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

#include <map>
#include <span>
#include <vector>

#include "svault/errors.hpp"
#include "svault/rdp.hpp"
#include "svault/types.hpp"

namespace svault {

struct ResampleResult {
  TimeSeries series;
  /// Inter-sample gaps wider than max_gap; nothing was fabricated inside.
  std::vector<GapInterval> gaps;
};

/// Sorts and deduplicates raw points (duplicate timestamps: last writer
/// wins), then fills a uniform 1-second grid between consecutive samples by
/// linear interpolation. A gap wider than max_gap_seconds is never
/// interpolated across; it is recorded instead.
inline ResampleResult resample_1s(std::span<const TimePoint> raw, std::int64_t max_gap_seconds,
                                  SensorId sensor = {}) {
  if (max_gap_seconds < 1) throw InvalidArgumentError("max_gap must be at least 1 second");

  std::map<Timestamp, double> dedup;
  for (const auto& p : raw) dedup[p.timestamp] = p.value;
  if (dedup.size() < 2)
    throw InsufficientDataError("resampling needs at least 2 distinct timestamps, got " +
                                std::to_string(dedup.size()));

  ResampleResult out;
  out.series = TimeSeries{sensor};
  out.series.reserve(static_cast<std::size_t>(dedup.rbegin()->first - dedup.begin()->first) + 1);

  auto it = dedup.begin();
  TimePoint prev{it->first, it->second};
  out.series.append(prev);
  for (++it; it != dedup.end(); ++it) {
    const TimePoint cur{it->first, it->second};
    const Timestamp delta = cur.timestamp - prev.timestamp;
    if (delta > max_gap_seconds) {
      out.gaps.push_back({prev.timestamp, cur.timestamp});
    } else {
      for (Timestamp t = prev.timestamp + 1; t < cur.timestamp; ++t)
        out.series.append({t, chord_value_at(prev, cur, t)});
    }
    out.series.append(cur);
    prev = cur;
  }
  return out;
}

}  // namespace svault
