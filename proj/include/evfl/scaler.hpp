#pragma once

#include "evfl/types.hpp"

namespace evfl {

/// Per-client min-max scaling to [0, 1]. When max == min the scaler is
/// degenerate: everything maps to 0 and the inverse returns min.
struct ScalerParams {
  double min = 0.0;
  double max = 1.0;

  bool degenerate() const { return max == min; }
};

ScalerParams fit_scaler(const Vector& values);

double scale_value(const ScalerParams& params, double value);
double inverse_scale_value(const ScalerParams& params, double scaled);

Vector scale(const ScalerParams& params, const Vector& values);
Vector inverse_scale(const ScalerParams& params, const Vector& scaled);

}  // namespace evfl
