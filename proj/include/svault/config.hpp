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

// Tool configuration: one versioned JSON file (// comments allowed) with
// sections mirroring the mover, tuner steady-state window, and daemon
// options. Every field has a default; an absent file means defaults.
// See docs/config-format.md for a commented example.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "svault/daemon.hpp"
#include "svault/errors.hpp"
#include "svault/io.hpp"
#include "svault/pipeline.hpp"
#include "svault/tuner.hpp"
#include "svault/types.hpp"

namespace svault {

inline constexpr int kConfigVersion = 1;

struct AppConfig {
  MoverConfig mover;
  SteadyStateSpec steady_state;  // defaults to 00:00-03:00 UTC, expected 0
  FluctuationWindow tuner_window;
  double knee_threshold = 0.01;
  DaemonOptions daemon;
};

/// Parses "HH:MM" into seconds since midnight.
inline std::int64_t parse_clock_time(const std::string& text) {
  const auto bad = [&] {
    return ParseError("clock time '" + text + "' is not HH:MM");
  };
  if (text.size() != 5 || text[2] != ':') throw bad();
  for (const std::size_t i : {0u, 1u, 3u, 4u})
    if (text[i] < '0' || text[i] > '9') throw bad();
  const int h = (text[0] - '0') * 10 + (text[1] - '0');
  const int m = (text[3] - '0') * 10 + (text[4] - '0');
  if (h > 23 || m > 59) throw bad();
  return h * 3600 + m * 60;
}

/// Accepts "vertical" or "perpendicular:<seconds-per-unit>".
inline DistanceMetric parse_metric(const std::string& text) {
  if (text == "vertical") return DistanceMetric::vertical();
  const std::string prefix = "perpendicular:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string num = text.substr(prefix.size());
    try {
      return DistanceMetric::perpendicular(std::stod(num));
    } catch (const std::exception&) {
      throw ParseError("bad perpendicular time scale '" + num + "'");
    }
  }
  throw ParseError("metric must be 'vertical' or 'perpendicular:<seconds-per-unit>', got '" +
                   text + "'");
}

inline AppConfig load_config(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr,
                                /*allow_exceptions=*/true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config " + path.string() + " is not valid JSON: " + e.what());
  }

  AppConfig cfg;
  try {
    const int version = doc.at("config_version").get<int>();
    if (version != kConfigVersion)
      throw ParseError("unsupported config_version " + std::to_string(version));

    if (doc.contains("mover")) {
      const auto& m = doc["mover"];
      cfg.mover.period_seconds = m.value("period_seconds", cfg.mover.period_seconds);
      cfg.mover.max_gap_seconds = m.value("max_gap_seconds", cfg.mover.max_gap_seconds);
      if (m.contains("default_epsilon"))
        cfg.mover.default_epsilon = Epsilon{m["default_epsilon"].get<double>()};
      if (m.contains("metric")) cfg.mover.metric = parse_metric(m["metric"].get<std::string>());
      if (m.contains("sensor_epsilon")) {
        for (auto it = m["sensor_epsilon"].begin(); it != m["sensor_epsilon"].end(); ++it) {
          std::uint64_t id = 0;
          const std::string& key = it.key();
          const auto r = std::from_chars(key.data(), key.data() + key.size(), id);
          if (r.ec != std::errc{} || r.ptr != key.data() + key.size() || id == 0)
            throw ParseError("sensor_epsilon key '" + key + "' is not a sensor id");
          cfg.mover.sensor_epsilon.emplace(SensorId{id}, Epsilon{it.value().get<double>()});
        }
      }
      cfg.mover.validate();
    }

    if (doc.contains("steady_state")) {
      const auto& s = doc["steady_state"];
      if (s.contains("start"))
        cfg.steady_state.start_second_of_day =
            static_cast<std::int32_t>(parse_clock_time(s["start"].get<std::string>()));
      if (s.contains("end"))
        cfg.steady_state.end_second_of_day =
            static_cast<std::int32_t>(parse_clock_time(s["end"].get<std::string>()));
      cfg.steady_state.expected_value = s.value("expected_value", cfg.steady_state.expected_value);
      cfg.steady_state.utc_offset_seconds =
          s.value("utc_offset_seconds", cfg.steady_state.utc_offset_seconds);
      cfg.steady_state.validate();
    }

    if (doc.contains("tuner")) {
      const auto& t = doc["tuner"];
      if (t.contains("window_seconds"))
        cfg.tuner_window = FluctuationWindow{t["window_seconds"].get<std::int64_t>()};
      cfg.knee_threshold = t.value("knee_threshold", cfg.knee_threshold);
      if (cfg.knee_threshold <= 0 || cfg.knee_threshold >= 1)
        throw ParseError("knee_threshold must be in (0, 1)");
    }

    if (doc.contains("daemon")) {
      const auto& d = doc["daemon"];
      cfg.daemon.seal_delay_seconds = d.value("seal_delay_seconds", cfg.daemon.seal_delay_seconds);
      cfg.daemon.worker_threads = d.value("worker_threads", cfg.daemon.worker_threads);
      if (d.contains("sensors"))
        for (const auto& id : d["sensors"])
          cfg.daemon.sensors.push_back(SensorId{id.get<std::uint64_t>()});
      if (cfg.daemon.seal_delay_seconds < 0) throw ParseError("seal_delay_seconds must be >= 0");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config " + path.string() + " has a malformed field: " + e.what());
  }
  return cfg;
}

}  // namespace svault
