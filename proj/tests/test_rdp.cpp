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

#include <algorithm>
#include <cmath>
#include <set>

#include "support/generators.hpp"
#include "support/rdp_reference.hpp"
#include "svault/rdp.hpp"

using namespace svault;

namespace {

TimeSeries make_series(std::vector<TimePoint> pts) { return TimeSeries{SensorId{1}, std::move(pts)}; }

}  // namespace

TEST_CASE("point_to_chord_distance basics", "[rdp]") {
  const TimePoint a{0, 0.0};
  const TimePoint b{2, 2.0};
  const TimePoint flat_b{2, 0.0};

  SECTION("collinear point has zero vertical distance") {
    CHECK(point_to_chord_distance({1, 1.0}, a, b, DistanceMetric::vertical()) == 0.0);
  }
  SECTION("flat chord, vertical deviation is the value") {
    CHECK(point_to_chord_distance({1, 5.0}, a, flat_b, DistanceMetric::vertical()) == 5.0);
  }
  SECTION("flat chord lies on the time axis, perpendicular equals vertical") {
    CHECK(point_to_chord_distance({1, 5.0}, a, flat_b, DistanceMetric::perpendicular(1.0)) == 5.0);
  }
  SECTION("ordering violations are rejected") {
    CHECK_THROWS_AS(point_to_chord_distance({1, 0.0}, b, a, DistanceMetric::vertical()),
                    OrderingError);
    CHECK_THROWS_AS(point_to_chord_distance({5, 0.0}, a, b, DistanceMetric::vertical()),
                    OrderingError);
  }
  SECTION("time scale shrinks the time axis") {
    // A huge seconds-per-unit scale collapses the chord (0,0)->(2,2) onto the
    // value axis; the nearest segment point for (1,5) is then the upper
    // endpoint, at distance 3.
    const TimePoint p{1, 5.0};
    const double d = point_to_chord_distance(p, a, b, DistanceMetric::perpendicular(1e9));
    CHECK_THAT(d, Catch::Matchers::WithinAbs(3.0, 1e-6));
  }
}

TEST_CASE("simplify keeps endpoints and removes collinear interior", "[rdp]") {
  SECTION("two points survive any epsilon") {
    const auto s = make_series({{0, 0.0}, {1, 1.0}});
    CHECK(simplify(s, Epsilon{1000.0}, DistanceMetric::vertical()) == s);
  }
  SECTION("exactly collinear interior removed at epsilon zero") {
    const auto s = make_series({{0, 0.0}, {1, 1.0}, {2, 2.0}, {3, 3.0}});
    const auto out = simplify(s, Epsilon{0.0}, DistanceMetric::vertical());
    REQUIRE(out.size() == 2);
    CHECK(out[0] == TimePoint{0, 0.0});
    CHECK(out[1] == TimePoint{3, 3.0});
  }
  SECTION("empty series is an error") {
    CHECK_THROWS_AS(simplify(TimeSeries{SensorId{1}}, Epsilon{1.0}, DistanceMetric::vertical()),
                    EmptyInputError);
  }
  SECTION("single point passes through") {
    const auto s = make_series({{7, 3.5}});
    CHECK(simplify(s, Epsilon{0.0}, DistanceMetric::vertical()) == s);
  }
}

TEST_CASE("simplify matches the recursive reference", "[rdp]") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto pts = testing::random_series(seed, 2, 1200);
    for (const auto& metric : {DistanceMetric::vertical(), DistanceMetric::perpendicular(1.0)}) {
      for (const double eps : {0.0, 0.5, 2.0}) {
        const auto got = simplify_indices(pts, Epsilon{eps}, metric);
        const auto want = testing::reference_rdp(pts, eps, metric);
        REQUIRE(got == want);
      }
    }
  }
}

TEST_CASE("simplify output is a subsequence including both endpoints", "[rdp]") {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto pts = testing::random_series(seed, 2, 500);
    const auto kept = simplify_indices(pts, Epsilon{1.0}, DistanceMetric::vertical());
    REQUIRE(!kept.empty());
    CHECK(kept.front() == 0);
    CHECK(kept.back() == pts.size() - 1);
    CHECK(std::is_sorted(kept.begin(), kept.end()));
    CHECK(std::adjacent_find(kept.begin(), kept.end()) == kept.end());
  }
}

TEST_CASE("kept sets are nested across epsilon", "[rdp]") {
  const std::vector<double> ladder{0.0, 0.1, 1.0, 5.0, 25.0};
  for (std::uint64_t seed = 200; seed < 215; ++seed) {
    const auto pts = testing::random_series(seed, 3, 600);
    std::vector<std::set<std::size_t>> sets;
    for (const double eps : ladder) {
      const auto kept = simplify_indices(pts, Epsilon{eps}, DistanceMetric::vertical());
      sets.emplace_back(kept.begin(), kept.end());
    }
    for (std::size_t i = 1; i < sets.size(); ++i) {
      CHECK(sets[i].size() <= sets[i - 1].size());
      CHECK(std::includes(sets[i - 1].begin(), sets[i - 1].end(), sets[i].begin(), sets[i].end()));
    }
  }
}

TEST_CASE("simplify is idempotent", "[rdp]") {
  for (std::uint64_t seed = 300; seed < 312; ++seed) {
    const auto series = make_series(testing::random_series(seed, 3, 400));
    for (const auto& metric : {DistanceMetric::vertical(), DistanceMetric::perpendicular(10.0)}) {
      const auto once = simplify(series, Epsilon{0.7}, metric);
      const auto twice = simplify(once, Epsilon{0.7}, metric);
      CHECK(once == twice);
    }
  }
}

TEST_CASE("reconstruct interpolates linearly", "[rdp]") {
  const auto s = make_series({{0, 0.0}, {10, 10.0}});
  SECTION("midpoint lerp") {
    const auto r = reconstruct(s, std::vector<Timestamp>{5});
    REQUIRE(r.size() == 1);
    CHECK(r[0] == TimePoint{5, 5.0});
  }
  SECTION("kept points are exact") {
    const auto r = reconstruct(s, std::vector<Timestamp>{0, 10});
    REQUIRE(r.size() == 2);
    CHECK(r[0] == TimePoint{0, 0.0});
    CHECK(r[1] == TimePoint{10, 10.0});
  }
  SECTION("no extrapolation") {
    CHECK_THROWS_AS(reconstruct(s, std::vector<Timestamp>{11}), OutOfRangeError);
    CHECK_THROWS_AS(reconstruct(s, std::vector<Timestamp>{-1}), OutOfRangeError);
  }
  SECTION("empty simplified series is an error") {
    CHECK_THROWS_AS(reconstruct(TimeSeries{SensorId{1}}, std::vector<Timestamp>{0}), EmptyInputError);
  }
}

TEST_CASE("vertical epsilon bound holds after reconstruction", "[rdp]") {
  for (std::uint64_t seed = 400; seed < 420; ++seed) {
    const auto pts = testing::random_series(seed, 2, 800);
    const auto series = make_series(pts);
    for (const double eps : {0.0, 0.3, 2.5}) {
      const auto slim = simplify(series, Epsilon{eps}, DistanceMetric::vertical());
      std::vector<Timestamp> stamps;
      stamps.reserve(pts.size());
      for (const auto& p : pts) stamps.push_back(p.timestamp);
      const auto recon = reconstruct(slim, stamps);
      REQUIRE(recon.size() == pts.size());
      double worst = 0.0;
      for (std::size_t i = 0; i < pts.size(); ++i)
        worst = std::max(worst, std::fabs(pts[i].value - recon[i].value));
      CHECK(worst <= eps);
    }
  }
}
