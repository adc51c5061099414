#include "evfl/attack.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "evfl/io/csv.hpp"
#include "evfl/rng.hpp"

namespace evfl {

Index AnomalyMask::count() const {
  Index n = 0;
  for (std::uint8_t f : flags) {
    n += f != 0;
  }
  return n;
}

namespace {

void check_config(const AttackConfig& c, Index length) {
  if (c.intensity_multiplier <= 1.0) {
    throw std::invalid_argument("inject_attacks: multiplier must exceed 1");
  }
  if (c.multiplier_jitter < 0.0 ||
      c.intensity_multiplier - c.multiplier_jitter <= 1.0) {
    throw std::invalid_argument(
        "inject_attacks: jitter must keep the multiplier above 1");
  }
  if (c.burst_min < 1 || c.burst_max < c.burst_min) {
    throw std::invalid_argument("inject_attacks: invalid burst length range");
  }
  if (!(c.anomaly_fraction > 0.0 && c.anomaly_fraction < 1.0)) {
    throw std::invalid_argument("inject_attacks: fraction must be in (0, 1)");
  }
  if (c.anomaly_fraction * static_cast<double>(length) < 1.0) {
    throw std::invalid_argument("inject_attacks: fraction selects no timestamps");
  }
  if (c.burst_max > length) {
    throw std::invalid_argument("inject_attacks: bursts longer than the series");
  }
}

}  // namespace

InjectionResult inject_attacks(const TimeSeries& clean, const AttackConfig& config) {
  validate_series(clean);
  const Index n = clean.size();
  check_config(config, n);

  Rng rng(config.seed);
  AnomalyMask mask = AnomalyMask::all_false(n);
  const Index target =
      static_cast<Index>(std::llround(config.anomaly_fraction * static_cast<double>(n)));

  Index flagged = 0;
  int consecutive_rejects = 0;
  constexpr int max_rejects = 10000;
  while (flagged < target) {
    const Index span = static_cast<Index>(config.burst_max - config.burst_min + 1);
    const Index length =
        config.burst_min + static_cast<Index>(rng.uniform_index(span));
    const Index start = static_cast<Index>(rng.uniform_index(n - length + 1));
    bool overlaps = false;
    for (Index i = start; i < start + length; ++i) {
      if (mask.at(i)) {
        overlaps = true;
        break;
      }
    }
    if (overlaps) {
      if (++consecutive_rejects >= max_rejects) {
        throw std::runtime_error(
            "inject_attacks: could not reach the target fraction without overlap");
      }
      continue;
    }
    consecutive_rejects = 0;
    for (Index i = start; i < start + length; ++i) {
      mask.set(i, true);
    }
    flagged += length;
  }

  InjectionResult result;
  result.attacked = clean;
  result.truth = mask;
  const double mean_level = clean.values.mean();
  for (Index i = 0; i < n; ++i) {
    if (!mask.at(i)) {
      continue;
    }
    const double m =
        config.multiplier_jitter > 0.0
            ? rng.uniform(config.intensity_multiplier - config.multiplier_jitter,
                          config.intensity_multiplier + config.multiplier_jitter)
            : config.intensity_multiplier;
    if (config.additive) {
      result.attacked.values[i] = clean.values[i] + m * mean_level;
    } else {
      result.attacked.values[i] = clean.values[i] * m;
    }
  }
  return result;
}

double attacked_fraction(const AnomalyMask& mask) {
  if (mask.size() == 0) {
    throw std::invalid_argument("attacked_fraction: empty mask");
  }
  return static_cast<double>(mask.count()) / static_cast<double>(mask.size());
}

void save_attacked_csv(const TimeSeries& series, const AnomalyMask& mask,
                       const std::string& path) {
  if (mask.size() != series.size()) {
    throw std::invalid_argument("save_attacked_csv: mask length mismatch");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write '" + path + "'");
  }
  out << "timestamp,volume,is_attack\n";
  for (Index i = 0; i < series.size(); ++i) {
    out << format_iso8601(series.timestamp_at(i)) << ','
        << io::format_double(series.values[i]) << ',' << (mask.at(i) ? 1 : 0)
        << '\n';
  }
}

void save_mask_csv(const TimeSeries& series, const AnomalyMask& mask,
                   const std::string& path) {
  if (mask.size() != series.size()) {
    throw std::invalid_argument("save_mask_csv: mask length mismatch");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write '" + path + "'");
  }
  out << "timestamp,is_attack\n";
  for (Index i = 0; i < series.size(); ++i) {
    out << format_iso8601(series.timestamp_at(i)) << ',' << (mask.at(i) ? 1 : 0)
        << '\n';
  }
}

AnomalyMask load_mask_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open '" + path + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("'" + path + "': empty file");
  }
  const std::vector<std::string> header = io::split_csv_line(line);
  std::ptrdiff_t flag_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "is_attack" || header[i] == "is_anomaly") {
      flag_col = static_cast<std::ptrdiff_t>(i);
    }
  }
  if (flag_col < 0) {
    throw DataError("'" + path + "': missing flag column");
  }
  AnomalyMask mask;
  long line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = io::split_csv_line(line);
    if (static_cast<std::ptrdiff_t>(fields.size()) <= flag_col) {
      throw DataError("'" + path + "' row " + std::to_string(line_number) +
                      ": too few columns");
    }
    const std::string& f = fields[flag_col];
    if (f != "0" && f != "1") {
      throw DataError("'" + path + "' row " + std::to_string(line_number) +
                      ": flag must be 0 or 1");
    }
    mask.flags.push_back(f == "1" ? 1 : 0);
  }
  return mask;
}

}  // namespace evfl
