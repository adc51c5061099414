#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "evfl/types.hpp"

namespace evfl {

/// Errors raised while reading external inputs (CSV files, configs).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// ISO-8601 "YYYY-MM-DDTHH:MM:SS" (UTC, no offset suffix).
std::int64_t parse_iso8601(const std::string& text);
std::string format_iso8601(std::int64_t epoch_seconds);

/// One client's equally spaced demand series. Values sit on an implicit
/// uniform grid: timestamp(i) = start + i * resolution.
struct TimeSeries {
  std::string client_id;
  std::int64_t start_epoch_seconds = 0;
  std::int64_t resolution_seconds = 3600;
  Vector values;

  Index size() const { return values.size(); }
  std::int64_t timestamp_at(Index i) const {
    return start_epoch_seconds + i * resolution_seconds;
  }
};

/// Validates the TimeSeries invariants: nonempty, finite, non-negative,
/// positive resolution. Throws DataError naming the offending index.
void validate_series(const TimeSeries& series);

struct CsvSchema {
  std::string timestamp_column = "timestamp";
  std::string value_column = "volume";
};

/// Reads a header CSV with timestamp and value columns. Rows are sorted by
/// timestamp if needed; duplicate timestamps, grid gaps, missing columns and
/// non-numeric values are rejected with the offending row number.
TimeSeries load_csv(const std::string& path, const CsvSchema& schema = {},
                    const std::string& client_id = "");

/// Writes `timestamp,volume` rows; volumes use shortest round-trip formatting.
void save_csv(const TimeSeries& series, const std::string& path);

/// Synthetic charging-demand profile: daily and weekly sinusoids on a base
/// level plus Gaussian noise, clamped at zero.
struct SyntheticProfile {
  std::string client_id = "synthetic";
  double base_level = 20.0;
  double daily_amplitude = 8.0;
  double weekly_amplitude = 4.0;
  double noise_std = 1.5;
  Index length = 4344;
  std::uint64_t seed = 0;
  std::int64_t start_epoch_seconds = 1662336000;  // 2022-09-05T00:00:00
  std::int64_t resolution_seconds = 3600;
};

/// value(t) = base + daily*sin(2 pi t/24) + weekly*sin(2 pi t/168) + N(0, std),
/// clamped at 0. Deterministic per profile seed.
TimeSeries generate_synthetic(const SyntheticProfile& profile);

}  // namespace evfl
