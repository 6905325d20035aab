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

// Periodic driver for the ingest pipeline: every period it runs the mover
// for each configured sensor on a small worker pool, then seals any day
// that has aged past the seal delay. Mover work happens off the staging
// intake path, so producers keep streaming while compression runs. One
// sensor's failure is reported and isolated; it never stalls the others.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "svault/pipeline.hpp"
#include "svault/store.hpp"
#include "svault/types.hpp"

namespace svault {

struct DaemonOptions {
  std::vector<SensorId> sensors;
  /// Day D is sealed at the first tick after D+1 00:05 UTC by default.
  std::int64_t seal_delay_seconds = 300;
  unsigned worker_threads = 2;
};

class Daemon {
 public:
  struct TickResult {
    std::vector<MoveReport> reports;
    std::vector<std::string> errors;
    std::size_t sealed = 0;
  };

  Daemon(Pipeline& pipeline, Store& store, DaemonOptions options)
      : pipeline_(pipeline), store_(store), options_(std::move(options)) {
    if (options_.worker_threads == 0) options_.worker_threads = 1;
  }

  /// One round: movers for every configured sensor (in parallel), then
  /// sealing. Synchronous; returns only when all moves have finished.
  TickResult tick() {
    TickResult result;
    std::mutex result_mu;
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= options_.sensors.size()) return;
        const SensorId sensor = options_.sensors[i];
        try {
          MoveReport report = pipeline_.run_mover(sensor);
          std::lock_guard lock(result_mu);
          result.reports.push_back(std::move(report));
        } catch (const std::exception& e) {
          std::lock_guard lock(result_mu);
          result.errors.push_back("sensor " + std::to_string(sensor.value) + ": " + e.what());
        }
      }
    };

    std::vector<std::thread> pool;
    const unsigned n = std::min<unsigned>(options_.worker_threads,
                                          std::max<std::size_t>(options_.sensors.size(), 1));
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    for (const SensorId sensor : options_.sensors) {
      try {
        for (const std::int64_t day : store_.sealable_days(sensor, options_.seal_delay_seconds)) {
          store_.seal_day(sensor, day);
          ++result.sealed;
        }
      } catch (const std::exception& e) {
        result.errors.push_back("sealing sensor " + std::to_string(sensor.value) + ": " + e.what());
      }
    }
    return result;
  }

  /// Ticks every mover period until stop() or, when given, max_ticks.
  /// Invokes `on_tick` (if set) after each round.
  void run(std::optional<std::uint64_t> max_ticks = std::nullopt) {
    stopping_ = false;
    std::uint64_t done = 0;
    while (!stopping_) {
      TickResult result = tick();
      if (on_tick) on_tick(result);
      ++done;
      if (max_ticks && done >= *max_ticks) return;
      // Sliced wait so a signal handler only has to flip the atomic.
      std::unique_lock lock(mu_);
      const auto deadline = std::chrono::steady_clock::now() +
                            std::chrono::seconds(pipeline_.config().period_seconds);
      while (!stopping_ && std::chrono::steady_clock::now() < deadline)
        cv_.wait_for(lock, std::chrono::milliseconds(200), [&] { return stopping_.load(); });
    }
  }

  /// Signals run() to exit. The in-flight tick, if any, completes first.
  void stop() {
    stopping_ = true;
    cv_.notify_all();
  }

  std::function<void(const TickResult&)> on_tick;

 private:
  Pipeline& pipeline_;
  Store& store_;
  DaemonOptions options_;
  std::atomic<bool> stopping_{false};
  std::mutex mu_;
  std::condition_variable cv_;
};

}  // namespace svault
