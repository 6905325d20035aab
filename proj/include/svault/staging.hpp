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

// Durable temporary buffer holding raw points between mover runs. One
// append-only log file per sensor; records arriving out of order are kept in
// arrival order and sorted at move time, duplicate timestamps resolve last
// writer wins. A move discards exactly the records it snapshotted, so
// points staged while a move is in flight are never lost.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "svault/errors.hpp"
#include "svault/io.hpp"
#include "svault/segment.hpp"
#include "svault/types.hpp"

namespace svault {

class StagingStore {
 public:
  struct Snapshot {
    std::vector<TimePoint> points;  // arrival order
    std::size_t record_count = 0;   // log records covered by this snapshot
    Timestamp first = 0;            // min timestamp in the snapshot
    Timestamp last = 0;             // max timestamp in the snapshot
  };

  explicit StagingStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
      if (!entry.is_regular_file() || entry.path().extension() != ".slog") continue;
      std::uint64_t id = 0;
      const std::string stem = entry.path().stem().string();
      const auto r = std::from_chars(stem.data(), stem.data() + stem.size(), id);
      if (r.ec != std::errc{} || r.ptr != stem.data() + stem.size()) continue;
      replay(SensorId{id});
    }
  }

  /// Durably appends one raw point to the sensor's log.
  void stage(SensorId sensor, TimePoint point) {
    if (!std::isfinite(point.value))
      throw InvalidArgumentError("refusing to stage non-finite value for sensor " +
                                 std::to_string(sensor.value));
    auto& s = state(sensor);
    std::lock_guard lock(s.mu);
    if (!s.file.is_open()) s.file.open(log_path(sensor));
    std::uint8_t rec[kRecordSize];
    encode_record(point, rec);
    s.file.append(rec, kRecordSize);
    s.file.sync();
    s.points.push_back(point);
  }

  std::size_t count(SensorId sensor) const {
    auto* s = find_state(sensor);
    if (!s) return 0;
    std::lock_guard lock(s->mu);
    return s->points.size();
  }

  /// Current records for the sensor, or nullopt when empty.
  std::optional<Snapshot> snapshot(SensorId sensor) const {
    auto* s = find_state(sensor);
    if (!s) return std::nullopt;
    std::lock_guard lock(s->mu);
    if (s->points.empty()) return std::nullopt;
    Snapshot snap;
    snap.points = s->points;
    snap.record_count = s->points.size();
    auto [mn, mx] = std::minmax_element(
        snap.points.begin(), snap.points.end(),
        [](const TimePoint& a, const TimePoint& b) { return a.timestamp < b.timestamp; });
    snap.first = mn->timestamp;
    snap.last = mx->timestamp;
    return snap;
  }

  /// Removes exactly the snapshotted records; anything staged after the
  /// snapshot survives. The log rewrite is atomic.
  void discard(SensorId sensor, const Snapshot& snap) {
    auto& s = state(sensor);
    std::lock_guard lock(s.mu);
    if (snap.record_count > s.points.size())
      throw InvalidArgumentError("stale snapshot: staging has fewer records than it covers");

    std::vector<std::uint8_t> rest;
    rest.reserve((s.points.size() - snap.record_count) * kRecordSize);
    for (std::size_t i = snap.record_count; i < s.points.size(); ++i) {
      std::uint8_t rec[kRecordSize];
      encode_record(s.points[i], rec);
      rest.insert(rest.end(), rec, rec + kRecordSize);
    }
    s.file.close();
    atomic_write_file(log_path(sensor), rest);
    s.file.open(log_path(sensor));
    s.points.erase(s.points.begin(), s.points.begin() + static_cast<std::ptrdiff_t>(snap.record_count));
  }

  /// Deduplicated (last writer wins) view of the staged points, sorted.
  std::vector<TimePoint> staged_points(SensorId sensor) const {
    auto* s = find_state(sensor);
    if (!s) return {};
    std::map<Timestamp, double> dedup;
    {
      std::lock_guard lock(s->mu);
      for (const auto& p : s->points) dedup[p.timestamp] = p.value;
    }
    std::vector<TimePoint> out;
    out.reserve(dedup.size());
    for (const auto& [ts, v] : dedup) out.push_back({ts, v});
    return out;
  }

  std::vector<SensorId> sensors() const {
    std::lock_guard lock(map_mu_);
    std::vector<SensorId> ids;
    ids.reserve(states_.size());
    for (const auto& [id, _] : states_) ids.push_back(id);
    return ids;
  }

 private:
  static constexpr std::size_t kRecordSize = 8 + 8 + 4;  // ts + value + crc

  struct SensorState {
    mutable std::mutex mu;
    std::vector<TimePoint> points;
    AppendFile file;
  };

  static void encode_record(const TimePoint& p, std::uint8_t out[kRecordSize]) {
    std::memcpy(out, &p.timestamp, 8);
    std::memcpy(out + 8, &p.value, 8);
    const std::uint32_t crc = crc32(out, 16);
    std::memcpy(out + 16, &crc, 4);
  }

  std::filesystem::path log_path(SensorId sensor) const {
    return dir_ / (std::to_string(sensor.value) + ".slog");
  }

  SensorState& state(SensorId sensor) {
    std::lock_guard lock(map_mu_);
    auto& slot = states_[sensor];
    if (!slot) slot = std::make_unique<SensorState>();
    return *slot;
  }

  SensorState* find_state(SensorId sensor) const {
    std::lock_guard lock(map_mu_);
    const auto it = states_.find(sensor);
    return it == states_.end() ? nullptr : it->second.get();
  }

  /// Loads the sensor's log, truncating any torn tail record.
  void replay(SensorId sensor) {
    const auto bytes = read_file_bytes(log_path(sensor));
    auto& s = state(sensor);
    std::lock_guard lock(s.mu);
    std::size_t valid = 0;
    while (valid + kRecordSize <= bytes.size()) {
      const std::uint8_t* rec = bytes.data() + valid;
      std::uint32_t stored = 0;
      std::memcpy(&stored, rec + 16, 4);
      if (crc32(rec, 16) != stored) break;
      TimePoint p;
      std::memcpy(&p.timestamp, rec, 8);
      std::memcpy(&p.value, rec + 8, 8);
      s.points.push_back(p);
      valid += kRecordSize;
    }
    if (valid != bytes.size()) {
      std::vector<std::uint8_t> good(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(valid));
      atomic_write_file(log_path(sensor), good);
    }
    s.file.open(log_path(sensor));
  }

  std::filesystem::path dir_;
  mutable std::mutex map_mu_;
  std::map<SensorId, std::unique_ptr<SensorState>> states_;
};

}  // namespace svault
