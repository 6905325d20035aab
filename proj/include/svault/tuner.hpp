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

// Epsilon decision making: pick the day with the strongest fluctuation,
// estimate the sensor's steady-state noise floor, sweep candidate epsilons
// over that day and select the operating value at the savings knee.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "svault/errors.hpp"
#include "svault/rdp.hpp"
#include "svault/types.hpp"

namespace svault {

/// Calendar-aligned window over which per-day standard deviations are taken.
struct FluctuationWindow {
  std::int64_t seconds = 7200;

  FluctuationWindow() = default;
  explicit FluctuationWindow(std::int64_t s) : seconds(s) {
    if (s <= 0 || kSecondsPerDay % s != 0)
      throw InvalidArgumentError("fluctuation window must be positive and divide 24h evenly");
  }
};

/// Daily clock interval during which the sensor is expected to sit at a
/// known steady value (for irradiance-like sensors: night). The interval may
/// wrap past midnight. Clock times are applied at the given fixed UTC
/// offset.
struct SteadyStateSpec {
  std::int32_t start_second_of_day = 0;
  std::int32_t end_second_of_day = 3 * 3600;
  double expected_value = 0.0;
  std::int32_t utc_offset_seconds = 0;

  bool contains(Timestamp ts) const {
    const std::int64_t local = ts + utc_offset_seconds;
    const std::int32_t sod = static_cast<std::int32_t>(((local % kSecondsPerDay) + kSecondsPerDay) %
                                                       kSecondsPerDay);
    if (start_second_of_day < end_second_of_day)
      return sod >= start_second_of_day && sod < end_second_of_day;
    if (start_second_of_day > end_second_of_day)
      return sod >= start_second_of_day || sod < end_second_of_day;
    return false;
  }

  void validate() const {
    if (start_second_of_day == end_second_of_day)
      throw InvalidArgumentError("steady-state window must be non-empty");
    if (start_second_of_day < 0 || start_second_of_day >= kSecondsPerDay ||
        end_second_of_day < 0 || end_second_of_day >= kSecondsPerDay)
      throw InvalidArgumentError("steady-state clock times must be within a day");
  }
};

/// Outcome of compressing one day with one candidate epsilon.
struct EpsilonReport {
  double epsilon = 0.0;
  std::size_t kept_points = 0;
  double reduction = 0.0;  // removed fraction, 0..1
  double mae = 0.0;
  double rmse = 0.0;
  double max_error = 0.0;
};

struct EpsilonSelection {
  Epsilon epsilon;
  double noise_floor = 0.0;
  /// Set when the noise floor exceeds every candidate; the largest candidate
  /// was returned as a fallback.
  bool floor_above_candidates = false;
  std::string rationale;
};

namespace detail {

struct RunningStats {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double stddev() const { return n == 0 ? 0.0 : std::sqrt(m2 / static_cast<double>(n)); }
};

/// Linear-interpolation percentile of a sorted sample, q in [0, 1].
inline double percentile_sorted(const std::vector<double>& sorted, double q) {
  const double h = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + (sorted[lo + 1] - sorted[lo]) * frac;
}

}  // namespace detail

/// Date (epoch day) with the maximum daily average of per-window standard
/// deviations. Windows with under 50% sample coverage at 1 Hz are skipped;
/// a day participates only when at least half of its windows are usable.
/// Ties break toward the earliest date.
inline std::int64_t find_high_fluctuation_day(const TimeSeries& history, FluctuationWindow window) {
  const std::int64_t windows_per_day = kSecondsPerDay / window.seconds;

  std::map<std::int64_t, std::vector<detail::RunningStats>> days;
  for (const auto& p : history.points()) {
    const std::int64_t day = day_of(p.timestamp);
    auto& stats = days[day];
    if (stats.empty()) stats.resize(static_cast<std::size_t>(windows_per_day));
    const std::int64_t w = (p.timestamp - day_start(day)) / window.seconds;
    stats[static_cast<std::size_t>(w)].add(p.value);
  }

  const std::size_t min_count =
      static_cast<std::size_t>(window.seconds / 2);  // 50% coverage at 1 Hz
  bool found = false;
  std::int64_t best_day = 0;
  double best_score = 0.0;
  for (const auto& [day, stats] : days) {
    double sum = 0.0;
    std::int64_t usable = 0;
    for (const auto& s : stats) {
      if (s.n < min_count) continue;
      sum += s.stddev();
      ++usable;
    }
    if (usable * 2 < windows_per_day) continue;
    const double score = sum / static_cast<double>(usable);
    if (!found || score > best_score) {
      found = true;
      best_day = day;
      best_score = score;
    }
  }
  if (!found)
    throw InsufficientDataError("no day with enough coverage for fluctuation scoring");
  return best_day;
}

/// Noise floor of the sensor: p99 - p1 spread of its readings inside the
/// steady-state windows. Percentiles rather than min/max so a single spike
/// cannot inflate the estimate.
inline Epsilon estimate_noise_floor(const TimeSeries& history, const SteadyStateSpec& spec) {
  spec.validate();
  std::vector<double> samples;
  for (const auto& p : history.points())
    if (spec.contains(p.timestamp)) samples.push_back(p.value);
  if (samples.empty()) throw InsufficientDataError("no samples inside the steady-state window");

  std::sort(samples.begin(), samples.end());
  const double spread =
      detail::percentile_sorted(samples, 0.99) - detail::percentile_sorted(samples, 0.01);
  return Epsilon{std::max(0.0, spread)};
}

/// Compresses the day once per candidate and measures what survives:
/// kept points, removed fraction, and reconstruction error at the original
/// timestamps. Expects the day on the uniform 1 s grid and the candidates
/// strictly increasing.
inline std::vector<EpsilonReport> sweep_epsilon(const TimeSeries& day,
                                                std::span<const Epsilon> candidates,
                                                const DistanceMetric& metric) {
  if (candidates.empty()) throw InvalidArgumentError("candidate list must not be empty");
  for (std::size_t i = 1; i < candidates.size(); ++i)
    if (!(candidates[i].value > candidates[i - 1].value))
      throw InvalidArgumentError("candidates must be strictly increasing");
  if (day.empty()) throw EmptyInputError("cannot sweep an empty day");

  std::vector<Timestamp> stamps;
  stamps.reserve(day.size());
  for (const auto& p : day.points()) stamps.push_back(p.timestamp);

  std::vector<EpsilonReport> reports;
  reports.reserve(candidates.size());
  for (const Epsilon eps : candidates) {
    const TimeSeries slim = simplify(day, eps, metric);
    const TimeSeries recon = reconstruct(slim, stamps);

    EpsilonReport r;
    r.epsilon = eps.value;
    r.kept_points = slim.size();
    r.reduction = static_cast<double>(day.size() - slim.size()) / static_cast<double>(day.size());
    double abs_sum = 0.0, sq_sum = 0.0;
    for (std::size_t i = 0; i < day.size(); ++i) {
      const double e = std::fabs(day[i].value - recon[i].value);
      abs_sum += e;
      sq_sum += e * e;
      r.max_error = std::max(r.max_error, e);
    }
    r.mae = abs_sum / static_cast<double>(day.size());
    r.rmse = std::sqrt(sq_sum / static_cast<double>(day.size()));
    reports.push_back(r);
  }
  return reports;
}

/// Operating epsilon: the smallest candidate at or above the noise floor
/// whose marginal storage savings toward the next candidate have flattened
/// below knee_threshold. Without such a knee the smallest candidate at or
/// above the floor is used; if the floor tops every candidate, the largest
/// candidate is returned with a warning flag.
inline EpsilonSelection select_epsilon(std::span<const EpsilonReport> reports, Epsilon noise_floor,
                                       double knee_threshold = 0.01) {
  if (reports.empty()) throw InvalidArgumentError("report list must not be empty");
  for (std::size_t i = 1; i < reports.size(); ++i)
    if (!(reports[i].epsilon > reports[i - 1].epsilon))
      throw InvalidArgumentError("reports must be in ascending epsilon order");

  EpsilonSelection sel;
  sel.noise_floor = noise_floor.value;

  for (std::size_t i = 0; i + 1 < reports.size(); ++i) {
    if (reports[i].epsilon < noise_floor.value) continue;
    const double gain = reports[i + 1].reduction - reports[i].reduction;
    if (gain < knee_threshold) {
      sel.epsilon = Epsilon{reports[i].epsilon};
      sel.rationale = "savings knee: moving to epsilon " + format_double(reports[i + 1].epsilon) +
                      " would only gain " + format_double(gain) +
                      " reduction (threshold " + format_double(knee_threshold) + ")";
      return sel;
    }
  }
  for (const auto& r : reports) {
    if (r.epsilon >= noise_floor.value) {
      sel.epsilon = Epsilon{r.epsilon};
      sel.rationale = "no savings plateau among candidates; smallest candidate at or above the "
                      "noise floor " + format_double(noise_floor.value);
      return sel;
    }
  }
  sel.epsilon = Epsilon{reports.back().epsilon};
  sel.floor_above_candidates = true;
  sel.rationale = "warning: noise floor " + format_double(noise_floor.value) +
                  " exceeds every candidate; using the largest candidate";
  return sel;
}

}  // namespace svault
