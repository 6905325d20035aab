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

// Deterministic synthetic photosynthetically-active-radiation (PAR) signal
// at 1 Hz: a clear-sky bell between 05:30 and 19:30 UTC, darkened by
// randomly arriving cloud transients with ramped edges, riding on a small
// positive offset plus uniform sensor noise, so night readings sit in
// [offset, offset + noise_amplitude]. Same seed, same bytes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "svault/errors.hpp"
#include "svault/types.hpp"

namespace svault {

struct SynthSpec {
  std::int64_t days = 1;
  Timestamp start = 1622505600;  // 2021-06-01T00:00:00Z
  double clear_sky_peak = 2000.0;
  double clouds_per_hour = 6.0;
  double noise_amplitude = 5.0;
  double night_offset = 1.0;
  std::uint64_t seed = 1;

  void validate() const {
    if (days < 1) throw InvalidArgumentError("synth days must be at least 1");
    if (clear_sky_peak <= 0) throw InvalidArgumentError("clear_sky_peak must be positive");
    if (clouds_per_hour < 0) throw InvalidArgumentError("clouds_per_hour must be non-negative");
    if (noise_amplitude < 0) throw InvalidArgumentError("noise_amplitude must be non-negative");
  }
};

namespace detail {

/// Uniform in [0, 1) from the top 53 bits, identical on every platform.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

inline constexpr std::int64_t kSynthSunriseSecond = 19800;  // 05:30 UTC
inline constexpr std::int64_t kSynthSunsetSecond = 70200;   // 19:30 UTC

/// Clear-sky curve for one second of day, before clouds and noise.
inline double synth_clear_sky(std::int64_t second_of_day, double peak) {
  if (second_of_day <= kSynthSunriseSecond || second_of_day >= kSynthSunsetSecond) return 0.0;
  const double u = static_cast<double>(second_of_day - kSynthSunriseSecond) /
                   static_cast<double>(kSynthSunsetSecond - kSynthSunriseSecond);
  return peak * std::pow(std::sin(u * 3.141592653589793), 1.2);
}

/// Generates `spec.days` days of 1 Hz PAR readings starting at `spec.start`.
inline TimeSeries generate_par_series(const SynthSpec& spec, SensorId sensor = {}) {
  spec.validate();
  const std::int64_t n = spec.days * kSecondsPerDay;
  std::mt19937_64 rng(spec.seed);

  // Cloud transients: Poisson arrivals, 30..300 s long, blocking 20..80% of
  // the clear-sky signal, with short linear ramps at both edges.
  std::vector<double> transmittance(static_cast<std::size_t>(n), 1.0);
  if (spec.clouds_per_hour > 0) {
    const double rate_per_second = spec.clouds_per_hour / 3600.0;
    double t = -std::log(1.0 - detail::uniform01(rng)) / rate_per_second;
    while (t < static_cast<double>(n)) {
      const double duration = 30.0 + detail::uniform01(rng) * 270.0;
      const double depth = 0.2 + detail::uniform01(rng) * 0.6;
      const double ramp = std::min(15.0, duration / 4.0);
      const auto from = static_cast<std::int64_t>(std::max(0.0, std::floor(t)));
      const auto to = std::min(n, static_cast<std::int64_t>(std::ceil(t + duration)));
      for (std::int64_t i = from; i < to; ++i) {
        const double into = static_cast<double>(i) - t;
        const double left = (t + duration) - static_cast<double>(i);
        const double w = std::min({1.0, into / ramp, left / ramp});
        if (w > 0) transmittance[static_cast<std::size_t>(i)] *= 1.0 - depth * w;
      }
      t += -std::log(1.0 - detail::uniform01(rng)) / rate_per_second;
    }
  }

  TimeSeries out{sensor};
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t sec = i % kSecondsPerDay;
    const double sky = synth_clear_sky(sec, spec.clear_sky_peak);
    const double noise = spec.noise_amplitude * detail::uniform01(rng);
    out.append({spec.start + i, sky * transmittance[static_cast<std::size_t>(i)] +
                                    spec.night_offset + noise});
  }
  return out;
}

}  // namespace svault
