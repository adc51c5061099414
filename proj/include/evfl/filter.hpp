#pragma once

#include <string>
#include <vector>

#include "evfl/attack.hpp"
#include "evfl/types.hpp"

namespace evfl {

/// Inclusive index range of one merged anomalous region.
struct AnomalySegment {
  Index start = 0;
  Index end = 0;

  bool operator==(const AnomalySegment&) const = default;
};

/// Maximal runs of flagged points; runs separated by at most `max_gap`
/// unflagged points merge into one segment (the gap points join it).
std::vector<AnomalySegment> merge_segments(const AnomalyMask& mask,
                                           Index max_gap = 2);

struct FilterResult {
  Vector values;
  std::vector<AnomalySegment> segments;
};

/// Replaces every merged segment [s, e] with linear interpolation between
/// value(s-1) and value(e+1). Segments touching the series start are
/// back-filled with the right anchor, segments touching the end are
/// forward-filled with the left anchor. Rejects a fully flagged series.
FilterResult filter_anomalies(const Vector& values, const AnomalyMask& mask,
                              Index max_gap = 2);
FilterResult filter_anomalies(const TimeSeries& series, const AnomalyMask& mask,
                              Index max_gap = 2);

/// `timestamp,volume,was_interpolated` rows.
void save_filtered_csv(const TimeSeries& filtered,
                       const std::vector<AnomalySegment>& segments,
                       const std::string& path);

}  // namespace evfl
