#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evfl/series.hpp"
#include "evfl/types.hpp"

namespace evfl {

/// Per-timestamp boolean attack labels aligned to one TimeSeries.
struct AnomalyMask {
  std::vector<std::uint8_t> flags;

  Index size() const { return static_cast<Index>(flags.size()); }
  bool at(Index i) const { return flags[static_cast<std::size_t>(i)] != 0; }
  void set(Index i, bool value) {
    flags[static_cast<std::size_t>(i)] = value ? 1 : 0;
  }
  Index count() const;

  static AnomalyMask all_false(Index n) { return AnomalyMask{std::vector<std::uint8_t>(n, 0)}; }
};

/// DDoS-like volume spikes: bursts of flagged steps whose values are
/// multiplied by intensity_multiplier +/- jitter.
struct AttackConfig {
  double intensity_multiplier = 10.6;
  double anomaly_fraction = 0.05;
  Index burst_min = 1;
  Index burst_max = 6;
  double multiplier_jitter = 1.0;
  bool additive = false;  // adds m_t * mean(clean) instead of multiplying
  std::uint64_t seed = 0;
};

struct InjectionResult {
  TimeSeries attacked;
  AnomalyMask truth;
};

/// Places non-overlapping bursts uniformly at random until the target
/// fraction of timestamps is flagged (last burst may overshoot), then
/// inflates the flagged values. Unflagged steps are bit-identical to the
/// clean input. Deterministic per config seed.
InjectionResult inject_attacks(const TimeSeries& clean, const AttackConfig& config);

/// Flagged count / mask length.
double attacked_fraction(const AnomalyMask& mask);

/// `timestamp,volume,is_attack` rows.
void save_attacked_csv(const TimeSeries& series, const AnomalyMask& mask,
                       const std::string& path);

/// `timestamp,is_attack` rows; reader for both mask formats.
void save_mask_csv(const TimeSeries& series, const AnomalyMask& mask,
                   const std::string& path);
AnomalyMask load_mask_csv(const std::string& path);

}  // namespace evfl
