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

#include <charconv>
#include <chrono>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "svault/errors.hpp"

namespace svault {

/// Seconds since the Unix epoch, UTC. All measurement timestamps have
/// one-second granularity.
using Timestamp = std::int64_t;

inline constexpr Timestamp kSecondsPerDay = 86400;

/// Global sensor identity assigned by the catalog registry. Value 0 is
/// reserved as "unset".
struct SensorId {
  std::uint64_t value = 0;

  bool valid() const { return value != 0; }
  auto operator<=>(const SensorId&) const = default;
};

/// Days since the Unix epoch (floor division, so negative timestamps land in
/// the correct day).
inline std::int64_t day_of(Timestamp ts) {
  std::int64_t d = ts / kSecondsPerDay;
  if (ts % kSecondsPerDay < 0) --d;
  return d;
}

inline Timestamp day_start(std::int64_t epoch_day) {
  return epoch_day * kSecondsPerDay;
}

/// Second within the UTC day, 0..86399.
inline std::int32_t second_of_day(Timestamp ts) {
  return static_cast<std::int32_t>(ts - day_start(day_of(ts)));
}

inline std::string format_date(std::int64_t epoch_day) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{days{epoch_day}}};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

inline std::optional<std::int64_t> parse_date(const std::string& text) {
  int y = 0, m = 0, d = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%4d-%2d-%2d%c", &y, &m, &d, &tail) != 3) return std::nullopt;
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd}.time_since_epoch().count();
}

inline std::string format_timestamp(Timestamp ts) {
  const std::int64_t ed = day_of(ts);
  const std::int32_t sod = second_of_day(ts);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%sT%02d:%02d:%02dZ", format_date(ed).c_str(), sod / 3600,
                (sod / 60) % 60, sod % 60);
  return buf;
}

/// Accepts either an integer epoch-seconds value or an ISO-8601 UTC instant
/// of the form YYYY-MM-DDTHH:MM:SS (optional trailing 'Z', 'T' or ' '
/// separator).
inline std::optional<Timestamp> parse_timestamp(const std::string& text) {
  if (text.empty()) return std::nullopt;
  bool digits = true;
  for (std::size_t i = (text[0] == '-' ? 1 : 0); i < text.size(); ++i) {
    if (text[i] < '0' || text[i] > '9') {
      digits = false;
      break;
    }
  }
  if (digits && !(text.size() == 1 && text[0] == '-')) {
    try {
      return static_cast<Timestamp>(std::stoll(text));
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char sep = 0, tail = 0;
  const int got =
      std::sscanf(text.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2d%c", &y, &mo, &d, &sep, &h, &mi, &s, &tail);
  if (got < 7 || (sep != 'T' && sep != ' ')) return std::nullopt;
  if (got == 8 && tail != 'Z') return std::nullopt;
  if (h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 59) return std::nullopt;
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd}.time_since_epoch().count() * kSecondsPerDay + h * 3600 + mi * 60 + s;
}

/// Shortest round-trip decimal form of a double.
inline std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

/// One vertex of a sensor polyline.
struct TimePoint {
  Timestamp timestamp = 0;
  double value = 0.0;

  bool operator==(const TimePoint&) const = default;
};

/// RDP distance threshold, expressed in sensor measurement units.
struct Epsilon {
  double value = 0.0;

  Epsilon() = default;
  explicit Epsilon(double v) : value(v) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw InvalidArgumentError("epsilon must be a finite non-negative value");
  }
};

/// Point-to-chord distance definition used by the simplifier.
///
/// Vertical measures deviation along the value axis only, which makes the
/// epsilon bound exact in sensor units. Perpendicular measures true 2-D
/// point-to-segment distance after the time axis has been mapped into value
/// units via the given scale (seconds per value unit).
class DistanceMetric {
 public:
  static DistanceMetric vertical() { return DistanceMetric{0.0}; }

  static DistanceMetric perpendicular(double seconds_per_value_unit) {
    if (!(seconds_per_value_unit > 0.0) || !std::isfinite(seconds_per_value_unit))
      throw InvalidArgumentError("perpendicular time_scale must be finite and > 0");
    return DistanceMetric{seconds_per_value_unit};
  }

  bool is_vertical() const { return time_scale_ == 0.0; }
  /// Seconds per value unit; only meaningful for the perpendicular variant.
  double time_scale() const { return time_scale_; }

  bool operator==(const DistanceMetric&) const = default;

 private:
  explicit DistanceMetric(double scale) : time_scale_(scale) {}
  double time_scale_;
};

/// Ordered (timestamp, value) pairs for one sensor. Construction and append
/// enforce strictly increasing timestamps and finite values; NaN or infinite
/// measurements are rejected rather than silently skipped.
class TimeSeries {
 public:
  TimeSeries() = default;
  explicit TimeSeries(SensorId sensor) : sensor_(sensor) {}

  TimeSeries(SensorId sensor, std::vector<TimePoint> points) : sensor_(sensor) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!std::isfinite(points[i].value))
        throw InvalidArgumentError("non-finite value at timestamp " +
                                   std::to_string(points[i].timestamp));
      if (i > 0 && points[i].timestamp <= points[i - 1].timestamp)
        throw OrderingError("timestamps must be strictly increasing (at index " +
                            std::to_string(i) + ")");
    }
    points_ = std::move(points);
  }

  void append(TimePoint p) {
    if (!std::isfinite(p.value))
      throw InvalidArgumentError("non-finite value at timestamp " + std::to_string(p.timestamp));
    if (!points_.empty() && p.timestamp <= points_.back().timestamp)
      throw OrderingError("timestamps must be strictly increasing");
    points_.push_back(p);
  }

  SensorId sensor() const { return sensor_; }
  const std::vector<TimePoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const TimePoint& front() const { return points_.front(); }
  const TimePoint& back() const { return points_.back(); }
  const TimePoint& operator[](std::size_t i) const { return points_[i]; }

  void reserve(std::size_t n) { points_.reserve(n); }

  bool operator==(const TimeSeries&) const = default;

 private:
  SensorId sensor_;
  std::vector<TimePoint> points_;
};

/// Open interval between two stored points across which no data exists and
/// no interpolation may be fabricated.
struct GapInterval {
  Timestamp last_before = 0;
  Timestamp first_after = 0;

  bool operator==(const GapInterval&) const = default;
  auto operator<=>(const GapInterval&) const = default;

  /// True when the grid timestamp lies strictly inside the gap.
  bool contains(Timestamp ts) const { return ts > last_before && ts < first_after; }
};

}  // namespace svault
