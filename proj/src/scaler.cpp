#include "evfl/scaler.hpp"

#include <stdexcept>

namespace evfl {

ScalerParams fit_scaler(const Vector& values) {
  if (values.size() == 0) {
    throw std::invalid_argument("fit_scaler: empty input");
  }
  ScalerParams params;
  params.min = values.minCoeff();
  params.max = values.maxCoeff();
  return params;
}

double scale_value(const ScalerParams& params, double value) {
  if (params.degenerate()) {
    return 0.0;
  }
  return (value - params.min) / (params.max - params.min);
}

double inverse_scale_value(const ScalerParams& params, double scaled) {
  if (params.degenerate()) {
    return params.min;
  }
  return params.min + scaled * (params.max - params.min);
}

Vector scale(const ScalerParams& params, const Vector& values) {
  if (params.degenerate()) {
    return Vector::Zero(values.size());
  }
  return (values.array() - params.min) / (params.max - params.min);
}

Vector inverse_scale(const ScalerParams& params, const Vector& scaled) {
  if (params.degenerate()) {
    return Vector::Constant(scaled.size(), params.min);
  }
  return params.min + scaled.array() * (params.max - params.min);
}

}  // namespace evfl
