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

// Live ingest pipeline: producers stage raw points into a durable buffer;
// a periodic mover snapshots the staged range, resamples it to 1 Hz,
// simplifies it, appends the kept points to the main store, and deletes
// exactly the snapshotted records. Delivery is at-least-once: a crash
// between append and delete replays the range, and the store's idempotent
// append absorbs the replay.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "svault/csv.hpp"
#include "svault/errors.hpp"
#include "svault/rdp.hpp"
#include "svault/resample.hpp"
#include "svault/staging.hpp"
#include "svault/store.hpp"
#include "svault/types.hpp"

namespace svault {

struct MoverConfig {
  std::int64_t period_seconds = 300;
  std::int64_t max_gap_seconds = 600;
  Epsilon default_epsilon{5.0};
  std::map<SensorId, Epsilon> sensor_epsilon;
  DistanceMetric metric = DistanceMetric::vertical();

  Epsilon epsilon_for(SensorId sensor) const {
    const auto it = sensor_epsilon.find(sensor);
    return it == sensor_epsilon.end() ? default_epsilon : it->second;
  }

  void validate() const {
    if (period_seconds <= 0) throw InvalidArgumentError("mover period must be positive");
    if (max_gap_seconds < 1) throw InvalidArgumentError("max_gap must be at least 1 second");
  }
};

struct MoveReport {
  SensorId sensor;
  Timestamp first = 0;  // snapshot range, from the staged data
  Timestamp last = 0;
  std::size_t staged_count = 0;
  std::size_t resampled_count = 0;
  std::size_t kept_count = 0;
  std::size_t appended_count = 0;
  std::vector<GapInterval> gaps;
  Timestamp executed_at = 0;
  bool skipped = false;  // fewer than 2 distinct staged timestamps
};

struct FileIngestResult {
  std::vector<MoveReport> reports;  // one per mapped column, map order
  std::vector<RowError> row_errors;
  std::size_t total_rows = 0;
  std::size_t valid_rows = 0;
};

class Pipeline {
 public:
  /// `is_registered`, when provided, gates stage() and ingest_file() on
  /// catalog registration.
  Pipeline(StagingStore& staging, Store& store, MoverConfig config,
           std::function<bool(SensorId)> is_registered = nullptr)
      : staging_(staging),
        store_(store),
        config_(std::move(config)),
        is_registered_(std::move(is_registered)) {
    config_.validate();
  }

  const MoverConfig& config() const { return config_; }

  void stage(SensorId sensor, TimePoint point) {
    require_registered(sensor);
    staging_.stage(sensor, point);
  }

  /// Moves the currently staged range for one sensor into the main store.
  /// Points staged while the move runs stay behind for the next run. With
  /// fewer than 2 distinct staged timestamps the move is skipped and nothing
  /// is deleted.
  MoveReport run_mover(SensorId sensor) {
    std::lock_guard lock(mover_mutex(sensor));

    MoveReport report;
    report.sensor = sensor;
    const auto snap = staging_.snapshot(sensor);
    if (snap) {
      report.staged_count = snap->record_count;
      report.first = snap->first;
      report.last = snap->last;
    }
    if (!snap || distinct_timestamps(snap->points) < 2) {
      report.skipped = true;
      report.executed_at = now();
      return report;
    }

    // The last stored point anchors interpolation across the batch boundary
    // unless the sensor was silent for longer than max_gap, which becomes a
    // recorded gap instead.
    std::optional<TimePoint> anchor;
    std::optional<GapInterval> boundary_gap;
    if (const auto prev = store_.last_point(sensor); prev && prev->timestamp < snap->first) {
      if (snap->first - prev->timestamp <= config_.max_gap_seconds)
        anchor = *prev;
      else
        boundary_gap = GapInterval{prev->timestamp, snap->first};
    }

    std::vector<TimePoint> input;
    input.reserve(snap->points.size() + 1);
    if (anchor) input.push_back(*anchor);
    input.insert(input.end(), snap->points.begin(), snap->points.end());

    auto resampled = resample_1s(input, config_.max_gap_seconds, sensor);
    report.resampled_count = resampled.series.size() - (anchor ? 1 : 0);

    const TimeSeries kept = simplify(resampled.series, config_.epsilon_for(sensor), config_.metric);
    TimeSeries emitted{sensor};
    emitted.reserve(kept.size());
    for (const auto& p : kept.points())
      if (!anchor || p.timestamp > anchor->timestamp) emitted.append(p);
    report.kept_count = emitted.size();

    // Gaps go in first so a crash right after append still leaves the
    // outage recorded; record_gap is idempotent on replay.
    if (boundary_gap) report.gaps.push_back(*boundary_gap);
    report.gaps.insert(report.gaps.end(), resampled.gaps.begin(), resampled.gaps.end());
    for (const auto& g : report.gaps) store_.record_gap(sensor, g);

    report.appended_count = store_.append(sensor, emitted);
    if (after_append_hook) after_append_hook(sensor);
    staging_.discard(sensor, *snap);
    report.executed_at = now();
    return report;
  }

  /// Runs the mover for every sensor with staged data.
  std::vector<MoveReport> run_all() {
    std::vector<MoveReport> reports;
    for (const SensorId sensor : staging_.sensors()) reports.push_back(run_mover(sensor));
    return reports;
  }

  /// Compresses a whole CSV file straight into the store, no staging.
  /// Malformed rows are collected, not fatal; a file with zero valid rows is.
  FileIngestResult ingest_file(const std::filesystem::path& path,
                               const std::map<std::string, SensorId>& sensor_map) {
    for (const auto& [col, sensor] : sensor_map) require_registered(sensor);

    const SensorCsv csv = read_sensor_csv_file(path.string());
    FileIngestResult result;
    result.row_errors = csv.row_errors;
    result.total_rows = csv.valid_rows + csv.row_errors.size();
    result.valid_rows = csv.valid_rows;
    if (csv.valid_rows == 0)
      throw ParseError("no valid rows in " + path.string() + " (" +
                       std::to_string(csv.row_errors.size()) + " bad rows)");

    for (const auto& [col, sensor] : sensor_map) {
      const auto it = std::find(csv.columns.begin(), csv.columns.end(), col);
      if (it == csv.columns.end())
        throw InvalidArgumentError("column '" + col + "' not present in " + path.string());
      const auto& raw = csv.series[static_cast<std::size_t>(it - csv.columns.begin())];

      MoveReport report;
      report.sensor = sensor;
      report.staged_count = raw.size();
      if (distinct_timestamps(raw) < 2) {
        report.skipped = true;
        report.executed_at = now();
        result.reports.push_back(report);
        continue;
      }

      auto resampled = resample_1s(raw, config_.max_gap_seconds, sensor);
      report.first = resampled.series.front().timestamp;
      report.last = resampled.series.back().timestamp;
      report.resampled_count = resampled.series.size();

      if (const auto prev = store_.last_point(sensor);
          prev && prev->timestamp < report.first &&
          report.first - prev->timestamp > config_.max_gap_seconds)
        report.gaps.push_back({prev->timestamp, report.first});
      report.gaps.insert(report.gaps.end(), resampled.gaps.begin(), resampled.gaps.end());
      for (const auto& g : report.gaps) store_.record_gap(sensor, g);

      const TimeSeries kept =
          simplify(resampled.series, config_.epsilon_for(sensor), config_.metric);
      report.kept_count = kept.size();
      report.appended_count = store_.append(sensor, kept);
      report.executed_at = now();
      result.reports.push_back(report);
    }
    return result;
  }

  /// Called between the store append and the staging delete; tests inject
  /// faults here to exercise the at-least-once path.
  std::function<void(SensorId)> after_append_hook;

 private:
  static Timestamp now() {
    return static_cast<Timestamp>(std::chrono::duration_cast<std::chrono::seconds>(
                                      std::chrono::system_clock::now().time_since_epoch())
                                      .count());
  }

  static std::size_t distinct_timestamps(const std::vector<TimePoint>& pts) {
    std::set<Timestamp> seen;
    for (const auto& p : pts) seen.insert(p.timestamp);
    return seen.size();
  }

  void require_registered(SensorId sensor) const {
    if (is_registered_ && !is_registered_(sensor))
      throw UnknownSensorError("sensor " + std::to_string(sensor.value) +
                               " is not registered in the catalog");
  }

  std::mutex& mover_mutex(SensorId sensor) {
    std::lock_guard lock(map_mu_);
    auto& slot = mover_mu_[sensor];
    if (!slot) slot = std::make_unique<std::mutex>();
    return *slot;
  }

  StagingStore& staging_;
  Store& store_;
  MoverConfig config_;
  std::function<bool(SensorId)> is_registered_;
  std::mutex map_mu_;
  std::map<SensorId, std::unique_ptr<std::mutex>> mover_mu_;
};

}  // namespace svault
