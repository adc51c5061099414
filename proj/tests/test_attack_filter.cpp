#include <doctest.h>

#include <cmath>

#include "evfl/attack.hpp"
#include "evfl/filter.hpp"
#include "evfl/rng.hpp"
#include "evfl/series.hpp"

using namespace evfl;

namespace {

TimeSeries constant_series(Index n, double value) {
  TimeSeries series;
  series.client_id = "c";
  series.values = Vector::Constant(n, value);
  return series;
}

struct ReferenceResult {
  bool no_anchors = false;  // merged regions cover the whole series
  Vector values;
};

// Independent reference interpolator: walks the mask directly, merging runs
// separated by <= max_gap and interpolating point by point. Written without
// reusing any of the filter module's segment machinery.
ReferenceResult reference_filter(const Vector& values, const AnomalyMask& mask,
                                 Index max_gap) {
  const Index n = values.size();
  // Mark every index belonging to a merged region.
  std::vector<bool> in_region(static_cast<std::size_t>(n), false);
  Index i = 0;
  while (i < n) {
    if (!mask.at(i)) {
      ++i;
      continue;
    }
    // Extend the region while the next flagged point is within max_gap.
    Index end = i;
    Index j = i + 1;
    Index last_flag = i;
    while (j < n && j - last_flag <= max_gap + 1) {
      if (mask.at(j)) {
        last_flag = j;
        end = j;
      }
      ++j;
    }
    for (Index k = i; k <= end; ++k) {
      in_region[static_cast<std::size_t>(k)] = true;
    }
    i = end + 1;
  }

  Vector out = values;
  i = 0;
  while (i < n) {
    if (!in_region[static_cast<std::size_t>(i)]) {
      ++i;
      continue;
    }
    Index end = i;
    while (end + 1 < n && in_region[static_cast<std::size_t>(end + 1)]) {
      ++end;
    }
    const bool has_left = i > 0;
    const bool has_right = end < n - 1;
    for (Index k = i; k <= end; ++k) {
      if (has_left && has_right) {
        const double x0 = static_cast<double>(i - 1);
        const double x1 = static_cast<double>(end + 1);
        const double t = (static_cast<double>(k) - x0) / (x1 - x0);
        out[k] = values[i - 1] + t * (values[end + 1] - values[i - 1]);
      } else if (has_right) {
        out[k] = values[end + 1];
      } else {
        out[k] = values[i - 1];
      }
    }
    i = end + 1;
  }
  return out;
}

}  // namespace

TEST_CASE("inject_attacks multiplies flagged steps by the intensity") {
  TimeSeries clean = constant_series(100, 10.0);
  AttackConfig config;
  config.anomaly_fraction = 0.01;  // exactly one flagged step
  config.burst_min = 1;
  config.burst_max = 1;
  config.multiplier_jitter = 0.0;
  config.seed = 3;
  InjectionResult result = inject_attacks(clean, config);
  CHECK(result.truth.count() == 1);
  Index flagged = -1;
  for (Index i = 0; i < 100; ++i) {
    if (result.truth.at(i)) {
      flagged = i;
      CHECK(result.attacked.values[i] == doctest::Approx(106.0).epsilon(1e-15));
    } else {
      CHECK(result.attacked.values[i] == 10.0);
    }
  }
  CHECK(flagged >= 0);
}

TEST_CASE("inject_attacks hits the requested fraction on the benchmark length") {
  SyntheticProfile profile;
  profile.length = 4344;
  profile.seed = 5;
  TimeSeries clean = generate_synthetic(profile);
  AttackConfig config;
  config.seed = 11;
  InjectionResult result = inject_attacks(clean, config);
  const Index target = 217;  // 5% of 4344
  CHECK(std::abs(static_cast<double>(result.truth.count() - target)) <=
        0.05 * static_cast<double>(target));
  CHECK(attacked_fraction(result.truth) ==
        doctest::Approx(0.05).epsilon(0.05));
}

TEST_CASE("inject_attacks leaves unflagged steps bit-identical") {
  SyntheticProfile profile;
  profile.length = 500;
  profile.seed = 1;
  TimeSeries clean = generate_synthetic(profile);
  AttackConfig config;
  config.seed = 2;
  InjectionResult result = inject_attacks(clean, config);
  for (Index i = 0; i < clean.size(); ++i) {
    if (!result.truth.at(i)) {
      CHECK(result.attacked.values[i] == clean.values[i]);
    } else {
      // Monotone severity: flagged values strictly exceed positive clean ones.
      if (clean.values[i] > 0.0) {
        CHECK(result.attacked.values[i] > clean.values[i]);
      }
    }
  }
}

TEST_CASE("inject_attacks is deterministic per seed") {
  SyntheticProfile profile;
  profile.length = 300;
  TimeSeries clean = generate_synthetic(profile);
  AttackConfig config;
  config.seed = 42;
  InjectionResult a = inject_attacks(clean, config);
  InjectionResult b = inject_attacks(clean, config);
  CHECK(a.attacked.values == b.attacked.values);
  CHECK(a.truth.flags == b.truth.flags);
}

TEST_CASE("inject_attacks additive mode raises flagged steps") {
  TimeSeries clean = constant_series(200, 4.0);
  AttackConfig config;
  config.additive = true;
  config.multiplier_jitter = 0.0;
  config.seed = 7;
  InjectionResult result = inject_attacks(clean, config);
  for (Index i = 0; i < 200; ++i) {
    if (result.truth.at(i)) {
      CHECK(result.attacked.values[i] ==
            doctest::Approx(4.0 + 10.6 * 4.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("inject_attacks validates its configuration") {
  TimeSeries clean = constant_series(50, 1.0);
  AttackConfig config;
  config.intensity_multiplier = 0.9;
  CHECK_THROWS_AS(inject_attacks(clean, config), std::invalid_argument);
  config = {};
  config.multiplier_jitter = 10.0;  // lower bound dips below 1
  CHECK_THROWS_AS(inject_attacks(clean, config), std::invalid_argument);
  config = {};
  config.anomaly_fraction = 0.001;  // selects no timestamps at length 50
  CHECK_THROWS_AS(inject_attacks(clean, config), std::invalid_argument);
  config = {};
  config.burst_min = 3;
  config.burst_max = 2;
  CHECK_THROWS_AS(inject_attacks(clean, config), std::invalid_argument);
}

TEST_CASE("attacked_fraction counts flags") {
  AnomalyMask mask = AnomalyMask::all_false(4);
  CHECK(attacked_fraction(mask) == 0.0);
  mask.set(0, true);
  mask.set(2, true);
  CHECK(attacked_fraction(mask) == 0.5);
  for (Index i = 0; i < 4; ++i) mask.set(i, true);
  CHECK(attacked_fraction(mask) == 1.0);
  CHECK_THROWS_AS(attacked_fraction(AnomalyMask{}), std::invalid_argument);
}

TEST_CASE("merge_segments merges runs over small gaps") {
  AnomalyMask mask = AnomalyMask::all_false(4);
  mask.set(1, true);
  mask.set(2, true);
  auto segments = merge_segments(mask, 2);
  REQUIRE(segments.size() == 1);
  CHECK(segments[0] == AnomalySegment{1, 2});

  AnomalyMask gap2 = AnomalyMask::all_false(10);
  gap2.set(2, true);
  gap2.set(3, true);
  gap2.set(6, true);
  gap2.set(7, true);
  segments = merge_segments(gap2, 2);
  REQUIRE(segments.size() == 1);
  CHECK(segments[0] == AnomalySegment{2, 7});

  AnomalyMask gap3 = AnomalyMask::all_false(10);
  gap3.set(2, true);
  gap3.set(6, true);
  segments = merge_segments(gap3, 2);
  REQUIRE(segments.size() == 2);
  CHECK(segments[0] == AnomalySegment{2, 2});
  CHECK(segments[1] == AnomalySegment{6, 6});
}

TEST_CASE("filter interpolates between the anchors") {
  Vector values(3);
  values << 10.0, 100.0, 12.0;
  AnomalyMask mask = AnomalyMask::all_false(3);
  mask.set(1, true);
  FilterResult result = filter_anomalies(values, mask);
  CHECK(result.values[0] == 10.0);
  CHECK(result.values[1] == doctest::Approx(11.0).epsilon(1e-15));
  CHECK(result.values[2] == 12.0);
}

TEST_CASE("filter with no flags is the identity") {
  Vector values(4);
  values << 10.0, 9.0, 8.0, 7.0;
  FilterResult result = filter_anomalies(values, AnomalyMask::all_false(4));
  CHECK(result.values == values);
  CHECK(result.segments.empty());
}

TEST_CASE("filter rejects a fully flagged series") {
  Vector values = Vector::Ones(5);
  AnomalyMask mask = AnomalyMask::all_false(5);
  for (Index i = 0; i < 5; ++i) mask.set(i, true);
  CHECK_THROWS_WITH_AS(filter_anomalies(values, mask),
                       doctest::Contains("anchor"), std::invalid_argument);
}

TEST_CASE("filter matches the reference interpolator on randomized instances") {
  Rng rng(404);
  int start_edge_cases = 0, end_edge_cases = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = 5 + static_cast<Index>(rng.uniform_index(60));
    Vector values(n);
    for (Index i = 0; i < n; ++i) values[i] = rng.uniform(0.0, 100.0);
    AnomalyMask mask = AnomalyMask::all_false(n);
    const double rate = rng.uniform(0.0, 0.3);
    for (Index i = 0; i < n; ++i) {
      if (rng.uniform() < rate) mask.set(i, true);
    }
    // Force start/end coverage on a slice of the trials.
    if (trial % 7 == 0) mask.set(0, true);
    if (trial % 11 == 0) mask.set(n - 1, true);
    if (mask.count() == n) mask.set(n / 2, false);
    if (mask.count() == 0) continue;
    if (mask.at(0)) ++start_edge_cases;
    if (mask.at(n - 1)) ++end_edge_cases;

    const Index max_gap = static_cast<Index>(rng.uniform_index(4));
    Vector expected;
    bool reference_rejects = false;
    // The reference also refuses an all-merged series (no anchors anywhere).
    {
      AnomalyMask probe = mask;
      auto segments = merge_segments(probe, max_gap);
      reference_rejects = segments.size() == 1 && segments[0].start == 0 &&
                          segments[0].end == n - 1;
    }
    if (reference_rejects) {
      CHECK_THROWS_AS(filter_anomalies(values, mask, max_gap),
                      std::invalid_argument);
      continue;
    }
    expected = reference_filter(values, mask, max_gap);
    FilterResult result = filter_anomalies(values, mask, max_gap);
    CHECK(result.values == expected);  // bit-for-bit

    // Idempotence: filtering the filtered series again changes nothing.
    FilterResult again = filter_anomalies(result.values, mask, max_gap);
    CHECK(again.values == result.values);

    // Locality: untouched outside merged segments.
    std::vector<bool> covered(static_cast<std::size_t>(n), false);
    for (const AnomalySegment& segment : result.segments) {
      for (Index k = segment.start; k <= segment.end; ++k) {
        covered[static_cast<std::size_t>(k)] = true;
      }
    }
    for (Index k = 0; k < n; ++k) {
      if (!covered[static_cast<std::size_t>(k)]) {
        CHECK(result.values[k] == values[k]);
      }
    }

    // Boundedness within each segment's anchors.
    for (const AnomalySegment& segment : result.segments) {
      const bool has_left = segment.start > 0;
      const bool has_right = segment.end < n - 1;
      double lo, hi;
      if (has_left && has_right) {
        lo = std::min(values[segment.start - 1], values[segment.end + 1]);
        hi = std::max(values[segment.start - 1], values[segment.end + 1]);
      } else if (has_right) {
        lo = hi = values[segment.end + 1];
      } else {
        lo = hi = values[segment.start - 1];
      }
      for (Index k = segment.start; k <= segment.end; ++k) {
        CHECK(result.values[k] >= lo - 1e-12);
        CHECK(result.values[k] <= hi + 1e-12);
      }
    }
  }
  // Make sure the edge cases genuinely occurred.
  CHECK(start_edge_cases > 50);
  CHECK(end_edge_cases > 30);
}
