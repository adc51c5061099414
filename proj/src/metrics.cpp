#include "evfl/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace evfl {

ForecastReport forecast_metrics(const Vector& predictions, const Vector& targets,
                                ScaleDomain domain) {
  if (predictions.size() == 0) {
    throw std::invalid_argument("forecast_metrics: empty input");
  }
  if (predictions.size() != targets.size()) {
    throw std::invalid_argument("forecast_metrics: prediction/target length mismatch");
  }
  const Index n = predictions.size();
  const Vector errors = predictions - targets;
  ForecastReport report;
  report.n = n;
  report.domain = domain;
  report.mae = errors.cwiseAbs().mean();
  const double sse = errors.squaredNorm();
  report.rmse = std::sqrt(sse / static_cast<double>(n));
  const double mean = targets.mean();
  const double sst = (targets.array() - mean).matrix().squaredNorm();
  if (sst > 0.0) {
    report.r2 = 1.0 - sse / sst;
  }
  // Power-mean inequality, allowing for rounding at equality.
  if (report.mae > report.rmse * (1.0 + 1e-12) + 1e-300) {
    throw std::logic_error("forecast_metrics: MAE exceeded RMSE");
  }
  return report;
}

DetectionReport detection_metrics(const AnomalyMask& predicted,
                                  const AnomalyMask& truth, EvaluationSpan span) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("detection_metrics: mask length mismatch");
  }
  if (span.begin < 0 || span.end > predicted.size() || span.begin >= span.end) {
    throw std::invalid_argument("detection_metrics: empty or invalid span");
  }
  DetectionReport report;
  for (Index i = span.begin; i < span.end; ++i) {
    const bool p = predicted.at(i);
    const bool t = truth.at(i);
    if (p && t) ++report.tp;
    if (p && !t) ++report.fp;
    if (!p && !t) ++report.tn;
    if (!p && t) ++report.fn;
  }
  if (report.tp + report.fp > 0) {
    report.precision = static_cast<double>(report.tp) /
                       static_cast<double>(report.tp + report.fp);
  }
  if (report.tp + report.fn > 0) {
    report.recall = static_cast<double>(report.tp) /
                    static_cast<double>(report.tp + report.fn);
  }
  if (report.precision && report.recall) {
    const double p = *report.precision;
    const double r = *report.recall;
    report.f1 = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  }
  if (report.fp + report.tn > 0) {
    report.fpr = static_cast<double>(report.fp) /
                 static_cast<double>(report.fp + report.tn);
  }
  return report;
}

DetectionReport combine_detection(const std::vector<DetectionReport>& parts) {
  if (parts.empty()) {
    throw std::invalid_argument("combine_detection: no reports");
  }
  DetectionReport total;
  for (const DetectionReport& part : parts) {
    total.tp += part.tp;
    total.fp += part.fp;
    total.tn += part.tn;
    total.fn += part.fn;
  }
  if (total.tp + total.fp > 0) {
    total.precision =
        static_cast<double>(total.tp) / static_cast<double>(total.tp + total.fp);
  }
  if (total.tp + total.fn > 0) {
    total.recall =
        static_cast<double>(total.tp) / static_cast<double>(total.tp + total.fn);
  }
  if (total.precision && total.recall) {
    const double p = *total.precision;
    const double r = *total.recall;
    total.f1 = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  }
  if (total.fp + total.tn > 0) {
    total.fpr =
        static_cast<double>(total.fp) / static_cast<double>(total.fp + total.tn);
  }
  return total;
}

PredictionSet inverse_scale_predictions(const PredictionSet& scaled,
                                        const ClientScaler& scaler) {
  if (scaled.client_id != scaler.client_id) {
    throw std::invalid_argument("inverse_scale_predictions: scaler for client '" +
                                scaler.client_id + "' applied to client '" +
                                scaled.client_id + "'");
  }
  PredictionSet original;
  original.client_id = scaled.client_id;
  original.predictions = inverse_scale(scaler.params, scaled.predictions);
  original.targets = inverse_scale(scaler.params, scaled.targets);
  return original;
}

}  // namespace evfl
