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

// Day-bucketed store for compressed sensor points.
//
// Points for days still open live in per-sensor write-ahead logs and
// in-memory buckets; sealing a day freezes its bucket into an immutable,
// checksummed segment file and drops the day from the WAL. Layout:
//
//   <root>/<sensor_id>/wal.log
//   <root>/<sensor_id>/<YYYY-MM-DD>.seg
//
// Concurrency: one writer per sensor, any number of readers. Writers build
// a modified copy of the state and publish it with a pointer swap, so
// readers work from consistent snapshots and never block the writer.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "svault/errors.hpp"
#include "svault/io.hpp"
#include "svault/rdp.hpp"
#include "svault/segment.hpp"
#include "svault/types.hpp"

namespace svault {

struct QuerySpec {
  SensorId sensor;
  Timestamp start = 0;
  Timestamp end = 0;  // inclusive
  /// When set, resample onto a uniform grid at this resolution (seconds)
  /// via linear interpolation; grid points inside recorded gaps or outside
  /// the stored data extent are omitted.
  std::optional<std::int64_t> materialize;
};

class Store {
 public:
  using Clock = std::function<Timestamp()>;

  explicit Store(std::filesystem::path root, Clock clock = nullptr)
      : root_(std::move(root)), clock_(clock ? std::move(clock) : system_clock) {
    std::filesystem::create_directories(root_);
    auto st = std::make_shared<State>();
    for (const auto& entry : std::filesystem::directory_iterator(root_)) {
      if (!entry.is_directory()) continue;
      std::uint64_t id = 0;
      const std::string name = entry.path().filename().string();
      const auto r = std::from_chars(name.data(), name.data() + name.size(), id);
      if (r.ec != std::errc{} || r.ptr != name.data() + name.size()) continue;
      st->sensors[SensorId{id}] = load_sensor(SensorId{id}, entry.path());
    }
    state_ = std::move(st);
  }

  /// Appends sorted points, routing each into its day bucket. All-or-nothing:
  /// the batch is validated in full before anything is written. Re-appending
  /// an existing (timestamp, value) pair is a no-op; a sealed day rejects the
  /// whole batch even for duplicates. Returns the number of new points.
  std::size_t append(SensorId sensor, const TimeSeries& points) {
    if (points.empty()) return 0;
    std::lock_guard wl(writer_mu_);
    auto st = snapshot();
    const SensorState* cur = find_sensor(*st, sensor);

    std::vector<TimePoint> fresh;
    fresh.reserve(points.size());
    for (const auto& p : points.points()) {
      const std::int64_t day = day_of(p.timestamp);
      if (cur && cur->segments.count(day))
        throw SealedSegmentError("sensor " + std::to_string(sensor.value) + " day " +
                                 format_date(day) + " is sealed");
      const double* existing = cur ? find_open_value(*cur, p.timestamp) : nullptr;
      if (existing) {
        if (*existing == p.value) continue;
        throw ConflictError("sensor " + std::to_string(sensor.value) + " already holds " +
                            format_double(*existing) + " at " + std::to_string(p.timestamp) +
                            ", refusing " + format_double(p.value));
      }
      fresh.push_back(p);
    }
    if (fresh.empty()) return 0;

    auto& wal = wal_file(sensor);
    std::vector<std::uint8_t> buf;
    buf.reserve(fresh.size() * kWalRecordSize);
    for (const auto& p : fresh) encode_wal_point(p, buf);
    wal.append(buf.data(), buf.size());
    wal.sync();

    auto next = std::make_shared<State>(*st);
    auto ss = cur ? std::make_shared<SensorState>(*cur) : std::make_shared<SensorState>();
    for (const auto& p : fresh)
      ss->open[day_of(p.timestamp)][second_of_day(p.timestamp)] = p.value;
    next->sensors[sensor] = std::move(ss);
    publish(std::move(next));
    return fresh.size();
  }

  /// Records a known hole in the data so that materialized queries never
  /// interpolate across it. `gap.first_after` must exceed `gap.last_before`.
  void record_gap(SensorId sensor, GapInterval gap) {
    if (gap.first_after <= gap.last_before)
      throw InvalidArgumentError("gap interval endpoints must be ordered");
    if (gap.first_after == gap.last_before + 1) return;  // no missing seconds
    std::lock_guard wl(writer_mu_);
    auto st = snapshot();
    const SensorState* cur = find_sensor(*st, sensor);
    if (cur) {
      for (const auto& g : cur->gaps)
        if (g.last_before == gap.last_before && g.first_after == gap.first_after) return;
    }

    auto& wal = wal_file(sensor);
    std::vector<std::uint8_t> buf;
    encode_wal_gap(gap, buf);
    wal.append(buf.data(), buf.size());
    wal.sync();

    auto next = std::make_shared<State>(*st);
    auto ss = cur ? std::make_shared<SensorState>(*cur) : std::make_shared<SensorState>();
    ss->gaps.push_back(gap);
    sort_gaps(ss->gaps);
    next->sensors[sensor] = std::move(ss);
    publish(std::move(next));
  }

  /// Freezes the day's open bucket into an immutable segment. Idempotent:
  /// sealing an already-sealed day returns the existing segment.
  std::shared_ptr<const Segment> seal_day(SensorId sensor, std::int64_t day) {
    std::lock_guard wl(writer_mu_);
    auto st = snapshot();
    const SensorState* cur = find_sensor(*st, sensor);
    if (!cur) throw UnknownSensorError("no data for sensor " + std::to_string(sensor.value));
    if (const auto it = cur->segments.find(day); it != cur->segments.end()) return it->second;
    const auto open_it = cur->open.find(day);
    if (open_it == cur->open.end() || open_it->second.empty())
      throw NothingToSealError("sensor " + std::to_string(sensor.value) + " has no open points on " +
                               format_date(day));
    if (day_start(day + 1) > clock_())
      throw NotSealableError(format_date(day) + " is not fully in the past yet");

    auto seg = std::make_shared<Segment>();
    seg->sensor = sensor;
    seg->day = day;
    seg->offsets.reserve(open_it->second.size());
    seg->values.reserve(open_it->second.size());
    for (const auto& [off, v] : open_it->second) {
      seg->offsets.push_back(off);
      seg->values.push_back(v);
    }
    for (const auto& g : cur->gaps)
      if (const auto span = clip_gap_to_day(g, day)) seg->gaps.push_back(*span);

    write_segment_file(segment_path(sensor, day), *seg);

    auto ss = std::make_shared<SensorState>(*cur);
    ss->open.erase(day);
    ss->segments[day] = seg;
    ss->gaps.erase(std::remove_if(ss->gaps.begin(), ss->gaps.end(),
                                  [&](const GapInterval& g) { return gap_fully_sealed(g, *ss); }),
                   ss->gaps.end());
    rewrite_wal(sensor, *ss);

    auto next = std::make_shared<State>(*st);
    next->sensors[sensor] = std::move(ss);
    publish(std::move(next));
    return seg;
  }

  /// Stored points in [start, end], merged across segments and open buckets;
  /// with `materialize` set, a uniform interpolated grid instead.
  TimeSeries query(const QuerySpec& spec) const {
    if (spec.start > spec.end) throw InvalidArgumentError("query range start exceeds end");
    if (spec.materialize && *spec.materialize < 1)
      throw InvalidArgumentError("materialize resolution must be at least 1 second");
    auto st = snapshot();
    const SensorState* ss = find_sensor(*st, spec.sensor);
    if (!ss) throw UnknownSensorError("unknown sensor " + std::to_string(spec.sensor.value));
    if (!spec.materialize) return TimeSeries(spec.sensor, stored_in_range(*ss, spec.start, spec.end));
    return materialize_grid(*ss, spec);
  }

  std::optional<TimePoint> last_point(SensorId sensor) const {
    auto st = snapshot();
    const SensorState* ss = find_sensor(*st, sensor);
    if (!ss) return std::nullopt;
    std::optional<TimePoint> best;
    if (!ss->segments.empty()) {
      const auto& seg = *ss->segments.rbegin()->second;
      if (seg.count() > 0)
        best = TimePoint{seg.timestamp_at(seg.count() - 1), seg.values.back()};
    }
    for (auto it = ss->open.rbegin(); it != ss->open.rend(); ++it) {
      if (it->second.empty()) continue;
      const auto& [off, v] = *it->second.rbegin();
      const Timestamp ts = day_start(it->first) + off;
      if (!best || ts > best->timestamp) best = TimePoint{ts, v};
      break;
    }
    return best;
  }

  /// Recorded gaps intersecting [start, end], overlapping intervals merged.
  std::vector<GapInterval> gaps_in_range(SensorId sensor, Timestamp start, Timestamp end) const {
    auto st = snapshot();
    const SensorState* ss = find_sensor(*st, sensor);
    if (!ss) throw UnknownSensorError("unknown sensor " + std::to_string(sensor.value));
    return collect_gaps(*ss, start, end);
  }

  /// Open (unsealed) days whose end lies at least `min_age_seconds` in the
  /// past, oldest first.
  std::vector<std::int64_t> sealable_days(SensorId sensor, std::int64_t min_age_seconds = 0) const {
    auto st = snapshot();
    const SensorState* ss = find_sensor(*st, sensor);
    if (!ss) return {};
    const Timestamp now = clock_();
    std::vector<std::int64_t> days;
    for (const auto& [day, bucket] : ss->open)
      if (!bucket.empty() && day_start(day + 1) + min_age_seconds <= now) days.push_back(day);
    return days;
  }

  std::vector<SensorId> sensors() const {
    auto st = snapshot();
    std::vector<SensorId> ids;
    ids.reserve(st->sensors.size());
    for (const auto& [id, _] : st->sensors) ids.push_back(id);
    return ids;
  }

  bool has_sensor(SensorId sensor) const {
    auto st = snapshot();
    return find_sensor(*st, sensor) != nullptr;
  }

  const std::filesystem::path& root() const { return root_; }

 private:
  static constexpr std::size_t kWalRecordSize = 1 + 16 + 4;
  static constexpr std::uint8_t kWalPoint = 1;
  static constexpr std::uint8_t kWalGap = 2;

  struct SensorState {
    std::map<std::int64_t, std::shared_ptr<const Segment>> segments;
    std::map<std::int64_t, std::map<std::uint32_t, double>> open;  // day -> offset -> value
    std::vector<GapInterval> gaps;  // recorded, not yet covered by sealed segments
  };

  struct State {
    std::map<SensorId, std::shared_ptr<const SensorState>> sensors;
  };

  static Timestamp system_clock() {
    return static_cast<Timestamp>(std::chrono::duration_cast<std::chrono::seconds>(
                                      std::chrono::system_clock::now().time_since_epoch())
                                      .count());
  }

  static void sort_gaps(std::vector<GapInterval>& gaps) {
    std::sort(gaps.begin(), gaps.end(), [](const GapInterval& a, const GapInterval& b) {
      return a.last_before < b.last_before;
    });
  }

  static const SensorState* find_sensor(const State& st, SensorId sensor) {
    const auto it = st.sensors.find(sensor);
    return it == st.sensors.end() ? nullptr : it->second.get();
  }

  static const double* find_open_value(const SensorState& ss, Timestamp ts) {
    const auto day_it = ss.open.find(day_of(ts));
    if (day_it == ss.open.end()) return nullptr;
    const auto it = day_it->second.find(second_of_day(ts));
    return it == day_it->second.end() ? nullptr : &it->second;
  }

  /// Clips a gap to one day, returning the uncovered span in day seconds.
  static std::optional<std::pair<std::uint32_t, std::uint32_t>> clip_gap_to_day(
      const GapInterval& g, std::int64_t day) {
    const Timestamp lo = std::max(g.last_before + 1, day_start(day));
    const Timestamp hi = std::min(g.first_after, day_start(day + 1));
    if (lo >= hi) return std::nullopt;
    return std::make_pair(static_cast<std::uint32_t>(lo - day_start(day)),
                          static_cast<std::uint32_t>(hi - day_start(day)));
  }

  static bool gap_fully_sealed(const GapInterval& g, const SensorState& ss) {
    const std::int64_t first_day = day_of(g.last_before + 1);
    const std::int64_t last_day = day_of(g.first_after - 1);
    for (std::int64_t d = first_day; d <= last_day; ++d)
      if (!ss.segments.count(d)) return false;
    return true;
  }

  static void encode_wal_point(const TimePoint& p, std::vector<std::uint8_t>& buf) {
    const std::size_t base = buf.size();
    buf.push_back(kWalPoint);
    detail::put_le(buf, static_cast<std::uint64_t>(p.timestamp));
    detail::put_f64(buf, p.value);
    detail::put_le(buf, crc32(buf.data() + base, 17));
  }

  static void encode_wal_gap(const GapInterval& g, std::vector<std::uint8_t>& buf) {
    const std::size_t base = buf.size();
    buf.push_back(kWalGap);
    detail::put_le(buf, static_cast<std::uint64_t>(g.last_before));
    detail::put_le(buf, static_cast<std::uint64_t>(g.first_after));
    detail::put_le(buf, crc32(buf.data() + base, 17));
  }

  std::filesystem::path sensor_dir(SensorId sensor) const {
    return root_ / std::to_string(sensor.value);
  }

  std::filesystem::path wal_path(SensorId sensor) const { return sensor_dir(sensor) / "wal.log"; }

  std::filesystem::path segment_path(SensorId sensor, std::int64_t day) const {
    return sensor_dir(sensor) / (format_date(day) + ".seg");
  }

  AppendFile& wal_file(SensorId sensor) {
    auto& f = wals_[sensor];
    if (!f.is_open()) {
      std::filesystem::create_directories(sensor_dir(sensor));
      f.open(wal_path(sensor));
    }
    return f;
  }

  std::shared_ptr<const SensorState> load_sensor(SensorId sensor,
                                                 const std::filesystem::path& dir) {
    auto ss = std::make_shared<SensorState>();
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (!entry.is_regular_file() || entry.path().extension() != ".seg") continue;
      auto seg = std::make_shared<Segment>(read_segment_file(entry.path()));
      if (seg->sensor != sensor)
        throw CorruptionError("segment " + entry.path().string() + " belongs to sensor " +
                              std::to_string(seg->sensor.value));
      ss->segments[seg->day] = std::move(seg);
    }
    if (std::filesystem::exists(wal_path(sensor))) replay_wal(sensor, *ss);
    return ss;
  }

  void replay_wal(SensorId sensor, SensorState& ss) {
    const auto bytes = read_file_bytes(wal_path(sensor));
    std::size_t valid = 0;
    while (valid + kWalRecordSize <= bytes.size()) {
      const std::uint8_t* rec = bytes.data() + valid;
      std::uint32_t stored = 0;
      std::memcpy(&stored, rec + 17, 4);
      if (crc32(rec, 17) != stored) break;
      detail::ByteReader rd(rec, 17);
      const auto type = rd.get_le<std::uint8_t>();
      if (type == kWalPoint) {
        const auto ts = static_cast<Timestamp>(rd.get_le<std::uint64_t>());
        const double v = rd.get_f64();
        // A sealed day already holds these points; the WAL record is a
        // leftover from a crash between segment write and WAL rewrite.
        if (!ss.segments.count(day_of(ts))) ss.open[day_of(ts)][second_of_day(ts)] = v;
      } else if (type == kWalGap) {
        GapInterval g;
        g.last_before = static_cast<Timestamp>(rd.get_le<std::uint64_t>());
        g.first_after = static_cast<Timestamp>(rd.get_le<std::uint64_t>());
        if (!gap_fully_sealed(g, ss)) ss.gaps.push_back(g);
      } else {
        break;
      }
      valid += kWalRecordSize;
    }
    sort_gaps(ss.gaps);
    if (valid != bytes.size()) {
      std::vector<std::uint8_t> good(bytes.begin(),
                                     bytes.begin() + static_cast<std::ptrdiff_t>(valid));
      atomic_write_file(wal_path(sensor), good);
    }
  }

  /// Regenerates the sensor's WAL from in-memory open state (after a seal
  /// dropped a day). Runs under the writer lock.
  void rewrite_wal(SensorId sensor, const SensorState& ss) {
    std::vector<std::uint8_t> buf;
    for (const auto& [day, bucket] : ss.open)
      for (const auto& [off, v] : bucket)
        encode_wal_point({day_start(day) + off, v}, buf);
    for (const auto& g : ss.gaps) encode_wal_gap(g, buf);
    wals_.erase(sensor);  // close before replacing the file underneath it
    atomic_write_file(wal_path(sensor), buf);
  }

  static std::vector<TimePoint> stored_in_range(const SensorState& ss, Timestamp start,
                                                Timestamp end) {
    // A day lives in exactly one of the two maps, so concatenating and
    // sorting merges without duplicates.
    std::vector<TimePoint> out;
    const std::int64_t first_day = day_of(start);
    const std::int64_t last_day = day_of(end);
    for (auto it = ss.segments.lower_bound(first_day);
         it != ss.segments.end() && it->first <= last_day; ++it) {
      const Segment& seg = *it->second;
      const Timestamp base = day_start(it->first);
      for (std::size_t i = 0; i < seg.count(); ++i) {
        const Timestamp ts = base + seg.offsets[i];
        if (ts < start) continue;
        if (ts > end) break;
        out.push_back({ts, seg.values[i]});
      }
    }
    for (auto it = ss.open.lower_bound(first_day); it != ss.open.end() && it->first <= last_day;
         ++it) {
      const Timestamp base = day_start(it->first);
      for (const auto& [off, v] : it->second) {
        const Timestamp ts = base + off;
        if (ts < start) continue;
        if (ts > end) break;
        out.push_back({ts, v});
      }
    }
    std::sort(out.begin(), out.end(),
              [](const TimePoint& a, const TimePoint& b) { return a.timestamp < b.timestamp; });
    return out;
  }

  /// Last stored point with timestamp strictly before `ts`, if any.
  static std::optional<TimePoint> point_before(const SensorState& ss, Timestamp ts) {
    std::optional<TimePoint> best;
    auto consider = [&](Timestamp t, double v) {
      if (!best || t > best->timestamp) best = TimePoint{t, v};
    };
    // Walk each map backwards by day; the first day yielding a hit wins for
    // that map, since earlier days only hold older points.
    for (auto it = ss.segments.upper_bound(day_of(ts)); it != ss.segments.begin();) {
      --it;
      const Segment& seg = *it->second;
      bool found = false;
      for (std::size_t i = seg.count(); i-- > 0;) {
        const Timestamp t = seg.timestamp_at(i);
        if (t < ts) {
          consider(t, seg.values[i]);
          found = true;
          break;
        }
      }
      if (found) break;
    }
    for (auto it = ss.open.upper_bound(day_of(ts)); it != ss.open.begin();) {
      --it;
      const Timestamp base = day_start(it->first);
      bool found = false;
      for (auto pit = it->second.rbegin(); pit != it->second.rend(); ++pit) {
        const Timestamp t = base + pit->first;
        if (t < ts) {
          consider(t, pit->second);
          found = true;
          break;
        }
      }
      if (found) break;
    }
    return best;
  }

  /// First stored point with timestamp strictly after `ts`, if any.
  static std::optional<TimePoint> point_after(const SensorState& ss, Timestamp ts) {
    std::optional<TimePoint> best;
    auto consider = [&](Timestamp t, double v) {
      if (!best || t < best->timestamp) best = TimePoint{t, v};
    };
    for (auto it = ss.segments.lower_bound(day_of(ts)); it != ss.segments.end(); ++it) {
      const Segment& seg = *it->second;
      bool found = false;
      for (std::size_t i = 0; i < seg.count(); ++i) {
        const Timestamp t = seg.timestamp_at(i);
        if (t > ts) {
          consider(t, seg.values[i]);
          found = true;
          break;
        }
      }
      if (found) break;
    }
    for (auto it = ss.open.lower_bound(day_of(ts)); it != ss.open.end(); ++it) {
      const Timestamp base = day_start(it->first);
      bool found = false;
      for (const auto& [off, v] : it->second) {
        const Timestamp t = base + off;
        if (t > ts) {
          consider(t, v);
          found = true;
          break;
        }
      }
      if (found) break;
    }
    return best;
  }

  /// All recorded gaps whose interior intersects [start, end], from both the
  /// unsealed list and sealed segment metadata, merged where they overlap.
  static std::vector<GapInterval> collect_gaps(const SensorState& ss, Timestamp start,
                                               Timestamp end) {
    std::vector<GapInterval> gaps;
    for (const auto& g : ss.gaps)
      if (g.last_before < end && g.first_after > start) gaps.push_back(g);
    for (auto it = ss.segments.lower_bound(day_of(start));
         it != ss.segments.end() && it->first <= day_of(end); ++it) {
      const Timestamp base = day_start(it->first);
      for (const auto& [s, e] : it->second->gaps) {
        const GapInterval g{base + s - 1, base + e};
        if (g.last_before < end && g.first_after > start) gaps.push_back(g);
      }
    }
    sort_gaps(gaps);
    std::vector<GapInterval> merged;
    for (const auto& g : gaps) {
      if (!merged.empty() && g.last_before < merged.back().first_after) {
        merged.back().first_after = std::max(merged.back().first_after, g.first_after);
      } else {
        merged.push_back(g);
      }
    }
    return merged;
  }

  TimeSeries materialize_grid(const SensorState& ss, const QuerySpec& spec) const {
    const std::int64_t step = *spec.materialize;
    std::vector<TimePoint> stored = stored_in_range(ss, spec.start, spec.end);
    if (const auto prev = point_before(ss, spec.start))
      stored.insert(stored.begin(), *prev);
    if (const auto next = point_after(ss, spec.end)) stored.push_back(*next);
    const auto gaps = collect_gaps(ss, spec.start, spec.end);

    std::vector<TimePoint> out;
    if (stored.empty()) return TimeSeries(spec.sensor, out);
    std::size_t seg = 0;
    std::size_t gi = 0;
    for (Timestamp t = spec.start; t <= spec.end; t += step) {
      while (gi < gaps.size() && gaps[gi].first_after <= t) ++gi;
      if (gi < gaps.size() && gaps[gi].contains(t)) continue;
      while (seg + 1 < stored.size() && stored[seg + 1].timestamp <= t) ++seg;
      if (stored[seg].timestamp == t) {
        out.push_back({t, stored[seg].value});
        continue;
      }
      if (stored[seg].timestamp > t) continue;   // before the data extent
      if (seg + 1 >= stored.size()) continue;    // past the data extent
      out.push_back({t, chord_value_at(stored[seg], stored[seg + 1], t)});
    }
    return TimeSeries(spec.sensor, std::move(out));
  }

  std::shared_ptr<const State> snapshot() const {
    std::lock_guard lock(ptr_mu_);
    return state_;
  }

  void publish(std::shared_ptr<const State> next) {
    std::lock_guard lock(ptr_mu_);
    state_ = std::move(next);
  }

  std::filesystem::path root_;
  Clock clock_;
  mutable std::mutex ptr_mu_;
  std::shared_ptr<const State> state_;
  std::mutex writer_mu_;
  std::map<SensorId, AppendFile> wals_;
};

}  // namespace svault
