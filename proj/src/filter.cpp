#include "evfl/filter.hpp"

#include <fstream>
#include <stdexcept>

#include "evfl/io/csv.hpp"

namespace evfl {

std::vector<AnomalySegment> merge_segments(const AnomalyMask& mask, Index max_gap) {
  if (max_gap < 0) {
    throw std::invalid_argument("merge_segments: max_gap must be >= 0");
  }
  std::vector<AnomalySegment> segments;
  const Index n = mask.size();
  Index i = 0;
  while (i < n) {
    if (!mask.at(i)) {
      ++i;
      continue;
    }
    AnomalySegment segment{i, i};
    Index j = i + 1;
    while (j < n) {
      if (mask.at(j)) {
        segment.end = j;
        ++j;
        continue;
      }
      // Look ahead: a flagged point within max_gap keeps the segment open.
      Index k = j;
      while (k < n && !mask.at(k) && k - segment.end <= max_gap) {
        ++k;
      }
      if (k < n && mask.at(k) && k - segment.end <= max_gap + 1) {
        segment.end = k;
        j = k + 1;
        continue;
      }
      break;
    }
    segments.push_back(segment);
    i = segment.end + 1;
  }
  return segments;
}

FilterResult filter_anomalies(const Vector& values, const AnomalyMask& mask,
                              Index max_gap) {
  if (mask.size() != values.size()) {
    throw std::invalid_argument("filter_anomalies: mask length mismatch");
  }
  FilterResult result;
  result.segments = merge_segments(mask, max_gap);
  result.values = values;
  const Index n = values.size();
  for (const AnomalySegment& segment : result.segments) {
    const bool has_left = segment.start > 0;
    const bool has_right = segment.end < n - 1;
    if (!has_left && !has_right) {
      throw std::invalid_argument(
          "filter_anomalies: entire series flagged, no anchor points");
    }
    if (has_left && has_right) {
      const double left = values[segment.start - 1];
      const double right = values[segment.end + 1];
      const double span = static_cast<double>(segment.end - segment.start + 2);
      for (Index i = segment.start; i <= segment.end; ++i) {
        const double t = static_cast<double>(i - segment.start + 1) / span;
        result.values[i] = left + t * (right - left);
      }
    } else if (!has_left) {
      const double right = values[segment.end + 1];
      for (Index i = segment.start; i <= segment.end; ++i) {
        result.values[i] = right;
      }
    } else {
      const double left = values[segment.start - 1];
      for (Index i = segment.start; i <= segment.end; ++i) {
        result.values[i] = left;
      }
    }
  }
  return result;
}

FilterResult filter_anomalies(const TimeSeries& series, const AnomalyMask& mask,
                              Index max_gap) {
  return filter_anomalies(series.values, mask, max_gap);
}

void save_filtered_csv(const TimeSeries& filtered,
                       const std::vector<AnomalySegment>& segments,
                       const std::string& path) {
  std::vector<std::uint8_t> interpolated(filtered.size(), 0);
  for (const AnomalySegment& segment : segments) {
    for (Index i = segment.start; i <= segment.end; ++i) {
      interpolated[static_cast<std::size_t>(i)] = 1;
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write '" + path + "'");
  }
  out << "timestamp,volume,was_interpolated\n";
  for (Index i = 0; i < filtered.size(); ++i) {
    out << format_iso8601(filtered.timestamp_at(i)) << ','
        << io::format_double(filtered.values[i]) << ','
        << int(interpolated[static_cast<std::size_t>(i)]) << '\n';
  }
}

}  // namespace evfl
