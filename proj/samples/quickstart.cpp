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

// End-to-end library walkthrough: synthesize a day of 1 Hz PAR data, stage
// it, run the mover, seal the day, then query and reconstruct.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>

#include "svault/svault.hpp"

int main() {
  namespace fs = std::filesystem;
  using namespace svault;

  const fs::path root = fs::temp_directory_path() / "svault-quickstart";
  fs::remove_all(root);

  const SensorId par{42};

  // One synthetic day: bell-shaped clear-sky curve, cloud transients, noise.
  SynthSpec spec;
  spec.days = 1;
  spec.seed = 7;
  const TimeSeries day = generate_par_series(spec);
  std::cout << "synthesized " << day.size() << " points\n";

  // Stage the raw points, then let the mover compress them into the store.
  Store store(root / "store");
  StagingStore staging(root / "store" / "staging");
  for (const auto& p : day.points()) staging.stage(par, p);

  MoverConfig mover;
  mover.default_epsilon = Epsilon{5.0};
  Pipeline pipeline(staging, store, mover);
  for (const MoveReport& r : pipeline.run_all()) {
    std::cout << "sensor " << r.sensor.value << ": staged " << r.staged_count << ", kept "
              << r.kept_count << " ("
              << format_double(100.0 * (1.0 - static_cast<double>(r.kept_count) /
                                                  static_cast<double>(r.resampled_count)))
              << "% reduction)\n";
  }

  // Seal the finished day into an immutable columnar segment.
  const auto segment = store.seal_day(par, day_of(spec.start));
  std::cout << "sealed " << format_date(segment->day) << " with " << segment->count()
            << " points\n";

  // Query raw kept points, then materialize the full 1 Hz grid back.
  QuerySpec q;
  q.sensor = par;
  q.start = spec.start;
  q.end = spec.start + kSecondsPerDay - 1;
  const TimeSeries kept = store.query(q);
  q.materialize = 1;
  const TimeSeries grid = store.query(q);
  std::cout << "query: " << kept.size() << " kept points, " << grid.size()
            << " materialized points\n";

  // Check the compression error bound on the reconstruction.
  double max_err = 0.0;
  for (std::size_t i = 0; i < day.size(); ++i)
    max_err = std::max(max_err, std::fabs(day[i].value - grid[i].value));
  std::cout << "max reconstruction error: " << format_double(max_err) << " (epsilon 5)\n";

  fs::remove_all(root);
  return 0;
}
