#include "evfl/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <utility>

#include "evfl/io/csv.hpp"
#include "evfl/rng.hpp"

namespace evfl {

namespace {

// Days since 1970-01-01 from a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

}  // namespace

std::int64_t parse_iso8601(const std::string& text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char sep = 0;
  if (std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &h,
                  &mi, &s) != 7 ||
      (sep != 'T' && sep != ' ')) {
    throw DataError("invalid ISO-8601 timestamp '" + text + "'");
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 ||
      mi > 59 || s < 0 || s > 60) {
    throw DataError("out-of-range ISO-8601 timestamp '" + text + "'");
  }
  return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

std::string format_iso8601(std::int64_t epoch_seconds) {
  std::int64_t days = epoch_seconds / 86400;
  std::int64_t rem = epoch_seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  int y = 0, m = 0, d = 0;
  civil_from_days(days, y, m, d);
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%04d-%02d-%02dT%02lld:%02lld:%02lld",
                y, m, d, static_cast<long long>(rem / 3600),
                static_cast<long long>((rem / 60) % 60),
                static_cast<long long>(rem % 60));
  return buffer;
}

void validate_series(const TimeSeries& series) {
  if (series.values.size() == 0) {
    throw DataError("series '" + series.client_id + "' is empty");
  }
  if (series.resolution_seconds <= 0) {
    throw DataError("series '" + series.client_id + "' has non-positive resolution");
  }
  for (Index i = 0; i < series.values.size(); ++i) {
    const double v = series.values[i];
    if (!std::isfinite(v) || v < 0.0) {
      throw DataError("series '" + series.client_id + "' has invalid value at index " +
                      std::to_string(i));
    }
  }
}

TimeSeries load_csv(const std::string& path, const CsvSchema& schema,
                    const std::string& client_id) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open '" + path + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("'" + path + "': empty file");
  }
  const std::vector<std::string> header = io::split_csv_line(line);
  auto column_of = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<std::ptrdiff_t>(i);
    }
    return static_cast<std::ptrdiff_t>(-1);
  };
  const std::ptrdiff_t ts_col = column_of(schema.timestamp_column);
  const std::ptrdiff_t val_col = column_of(schema.value_column);
  if (ts_col < 0) {
    throw DataError("'" + path + "': missing column '" + schema.timestamp_column + "'");
  }
  if (val_col < 0) {
    throw DataError("'" + path + "': missing column '" + schema.value_column + "'");
  }

  std::vector<std::pair<std::int64_t, double>> rows;
  long line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = io::split_csv_line(line);
    if (static_cast<std::ptrdiff_t>(fields.size()) <= std::max(ts_col, val_col)) {
      throw DataError("'" + path + "' row " + std::to_string(line_number) +
                      ": too few columns");
    }
    std::int64_t ts = 0;
    try {
      ts = parse_iso8601(fields[ts_col]);
    } catch (const DataError&) {
      throw DataError("'" + path + "' row " + std::to_string(line_number) +
                      ": bad timestamp '" + fields[ts_col] + "'");
    }
    double value = 0.0;
    if (!io::parse_double(fields[val_col], value)) {
      throw DataError("'" + path + "' row " + std::to_string(line_number) +
                      ": non-numeric value '" + fields[val_col] + "'");
    }
    rows.emplace_back(ts, value);
  }
  if (rows.empty()) {
    throw DataError("'" + path + "': no data rows");
  }

  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].first == rows[i - 1].first) {
      throw DataError("'" + path + "': duplicate timestamp " +
                      format_iso8601(rows[i].first));
    }
  }

  TimeSeries series;
  series.client_id = client_id.empty() ? path : client_id;
  series.start_epoch_seconds = rows.front().first;
  if (rows.size() > 1) {
    std::int64_t resolution = rows[1].first - rows[0].first;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      resolution = std::min(resolution, rows[i].first - rows[i - 1].first);
    }
    series.resolution_seconds = resolution;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].first - rows[i - 1].first != resolution) {
        throw DataError("'" + path + "': gap in time grid between " +
                        format_iso8601(rows[i - 1].first) + " and " +
                        format_iso8601(rows[i].first));
      }
    }
  }
  series.values.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    series.values[static_cast<Index>(i)] = rows[i].second;
  }
  validate_series(series);
  return series;
}

void save_csv(const TimeSeries& series, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write '" + path + "'");
  }
  out << "timestamp,volume\n";
  for (Index i = 0; i < series.size(); ++i) {
    out << format_iso8601(series.timestamp_at(i)) << ','
        << io::format_double(series.values[i]) << '\n';
  }
  if (!out) {
    throw DataError("write to '" + path + "' failed");
  }
}

TimeSeries generate_synthetic(const SyntheticProfile& profile) {
  if (profile.length < 1) {
    throw std::invalid_argument("generate_synthetic: length must be >= 1");
  }
  if (profile.daily_amplitude < 0.0 || profile.weekly_amplitude < 0.0 ||
      profile.noise_std < 0.0) {
    throw std::invalid_argument("generate_synthetic: amplitudes and noise must be >= 0");
  }
  if (profile.base_level <= profile.daily_amplitude + profile.weekly_amplitude) {
    throw std::invalid_argument(
        "generate_synthetic: base_level must exceed the summed amplitudes");
  }
  Rng rng(profile.seed);
  TimeSeries series;
  series.client_id = profile.client_id;
  series.start_epoch_seconds = profile.start_epoch_seconds;
  series.resolution_seconds = profile.resolution_seconds;
  series.values.resize(profile.length);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (Index t = 0; t < profile.length; ++t) {
    double v = profile.base_level +
               profile.daily_amplitude * std::sin(two_pi * t / 24.0) +
               profile.weekly_amplitude * std::sin(two_pi * t / 168.0);
    if (profile.noise_std > 0.0) {
      v += rng.normal(0.0, profile.noise_std);
    }
    series.values[t] = std::max(v, 0.0);
  }
  return series;
}

}  // namespace evfl
