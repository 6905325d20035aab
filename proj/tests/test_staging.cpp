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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "support/temp_dir.hpp"
#include "svault/staging.hpp"

using namespace svault;

namespace {
const SensorId kSensor{5};
}

TEST_CASE("staged points survive a process restart", "[staging]") {
  const testing::ScopedTempDir dir("svault-staging");
  {
    StagingStore staging(dir.path());
    staging.stage(kSensor, {100, 1.0});
    staging.stage(kSensor, {101, 2.0});
    staging.stage(SensorId{6}, {100, 3.0});
  }
  StagingStore reopened(dir.path());
  CHECK(reopened.count(kSensor) == 2);
  CHECK(reopened.count(SensorId{6}) == 1);
  REQUIRE(reopened.sensors().size() == 2);
  const auto snap = reopened.snapshot(kSensor);
  REQUIRE(snap);
  CHECK(snap->points == std::vector<TimePoint>{{100, 1.0}, {101, 2.0}});
}

TEST_CASE("snapshot covers the staged range", "[staging]") {
  const testing::ScopedTempDir dir("svault-staging");
  StagingStore staging(dir.path());
  CHECK_FALSE(staging.snapshot(kSensor));

  staging.stage(kSensor, {105, 1.0});
  staging.stage(kSensor, {101, 2.0});  // out of order arrival is fine
  staging.stage(kSensor, {103, 3.0});
  const auto snap = staging.snapshot(kSensor);
  REQUIRE(snap);
  CHECK(snap->record_count == 3);
  CHECK(snap->first == 101);
  CHECK(snap->last == 105);
  // arrival order preserved in the raw snapshot
  CHECK(snap->points[0].timestamp == 105);
}

TEST_CASE("discard removes exactly the snapshotted records", "[staging]") {
  const testing::ScopedTempDir dir("svault-staging");
  StagingStore staging(dir.path());
  staging.stage(kSensor, {1, 1.0});
  staging.stage(kSensor, {2, 2.0});
  const auto snap = staging.snapshot(kSensor);
  REQUIRE(snap);

  // Points staged while the mover is busy are not part of the snapshot.
  staging.stage(kSensor, {3, 3.0});
  staging.discard(kSensor, *snap);
  CHECK(staging.count(kSensor) == 1);
  const auto rest = staging.snapshot(kSensor);
  REQUIRE(rest);
  CHECK(rest->points == std::vector<TimePoint>{{3, 3.0}});

  // The log on disk was rewritten too.
  StagingStore reopened(dir.path());
  CHECK(reopened.count(kSensor) == 1);
}

TEST_CASE("discard rejects a snapshot covering more than is staged", "[staging]") {
  const testing::ScopedTempDir dir("svault-staging");
  StagingStore staging(dir.path());
  staging.stage(kSensor, {1, 1.0});
  auto snap = staging.snapshot(kSensor);
  REQUIRE(snap);
  snap->record_count = 99;
  CHECK_THROWS_AS(staging.discard(kSensor, *snap), InvalidArgumentError);
}

TEST_CASE("staged_points deduplicates with last writer wins", "[staging]") {
  const testing::ScopedTempDir dir("svault-staging");
  StagingStore staging(dir.path());
  staging.stage(kSensor, {5, 1.0});
  staging.stage(kSensor, {3, 2.0});
  staging.stage(kSensor, {5, 9.0});
  CHECK(staging.staged_points(kSensor) == std::vector<TimePoint>{{3, 2.0}, {5, 9.0}});
  CHECK(staging.staged_points(SensorId{999}).empty());
}

TEST_CASE("a torn tail record is truncated on replay", "[staging]") {
  const testing::ScopedTempDir dir("svault-staging");
  {
    StagingStore staging(dir.path());
    staging.stage(kSensor, {1, 1.0});
    staging.stage(kSensor, {2, 2.0});
  }
  const auto log = dir / "5.slog";
  const auto size = std::filesystem::file_size(log);
  std::filesystem::resize_file(log, size - 7);  // mid-record crash

  StagingStore reopened(dir.path());
  CHECK(reopened.count(kSensor) == 1);
  const auto snap = reopened.snapshot(kSensor);
  REQUIRE(snap);
  CHECK(snap->points == std::vector<TimePoint>{{1, 1.0}});
  // The file was repaired, so a further restart sees a clean log.
  CHECK(std::filesystem::file_size(log) == 20);
}

TEST_CASE("a corrupted record stops replay at the last good prefix", "[staging]") {
  const testing::ScopedTempDir dir("svault-staging");
  {
    StagingStore staging(dir.path());
    staging.stage(kSensor, {1, 1.0});
    staging.stage(kSensor, {2, 2.0});
    staging.stage(kSensor, {3, 3.0});
  }
  const auto log = dir / "5.slog";
  {
    std::fstream f(log, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(20 + 3);  // value bytes of the second record
    f.put('\x7F');
  }
  StagingStore reopened(dir.path());
  CHECK(reopened.count(kSensor) == 1);
}

TEST_CASE("non-finite values are refused at the door", "[staging]") {
  const testing::ScopedTempDir dir("svault-staging");
  StagingStore staging(dir.path());
  CHECK_THROWS_AS(staging.stage(kSensor, {1, std::nan("")}), InvalidArgumentError);
  CHECK(staging.count(kSensor) == 0);
}

TEST_CASE("unrelated files in the staging directory are ignored", "[staging]") {
  const testing::ScopedTempDir dir("svault-staging");
  std::ofstream(dir / "notes.txt") << "not a log";
  std::ofstream(dir / "abc.slog") << "not numeric";
  StagingStore staging(dir.path());
  CHECK(staging.sensors().empty());
}
