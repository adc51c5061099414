#pragma once

#include <optional>
#include <string>

#include "evfl/attack.hpp"
#include "evfl/scaler.hpp"
#include "evfl/types.hpp"

namespace evfl {

enum class ScaleDomain { scaled, original_units };

/// Regression metric bundle. r2 is absent for zero-variance targets rather
/// than being forced to a number.
struct ForecastReport {
  double mae = 0.0;
  double rmse = 0.0;
  std::optional<double> r2;
  Index n = 0;
  ScaleDomain domain = ScaleDomain::original_units;
};

/// MAE = mean |e|, RMSE = sqrt(mean e^2), R^2 = 1 - SSE/SST with SST about
/// the target mean. Rejects empty or misaligned inputs.
ForecastReport forecast_metrics(const Vector& predictions, const Vector& targets,
                                ScaleDomain domain = ScaleDomain::original_units);

/// Half-open index range [begin, end) of evaluated timestamps.
struct EvaluationSpan {
  Index begin = 0;
  Index end = 0;
};

/// Confusion counts and derived rates. Ratios with a zero denominator are
/// absent (excluded from aggregates) rather than reported as fake zeros.
struct DetectionReport {
  Index tp = 0, fp = 0, tn = 0, fn = 0;
  std::optional<double> precision;
  std::optional<double> recall;  // also the "true attacks detected" ratio
  std::optional<double> f1;
  std::optional<double> fpr;
};

DetectionReport detection_metrics(const AnomalyMask& predicted,
                                  const AnomalyMask& truth, EvaluationSpan span);

/// Merges confusion counts (for whole-federation summaries) and rederives
/// the rates.
DetectionReport combine_detection(const std::vector<DetectionReport>& parts);

struct ClientScaler {
  std::string client_id;
  ScalerParams params;
};

/// Scaled-domain prediction/target pair tied to one client.
struct PredictionSet {
  std::string client_id;
  Vector predictions;
  Vector targets;
};

/// Applies the inverse transform to both vectors; rejects a scaler whose
/// client_id does not match the prediction set.
PredictionSet inverse_scale_predictions(const PredictionSet& scaled,
                                        const ClientScaler& scaler);

}  // namespace evfl
