#pragma once

#include "evfl/types.hpp"

namespace evfl::nn {

struct MseResult {
  double loss = 0.0;
  Matrix grad;  // dLoss/dPredictions, same shape as predictions
};

/// Mean squared error over all elements: loss = mean((pred - target)^2),
/// grad = 2 (pred - target) / N. Rejects empty or mismatched inputs.
MseResult mse_loss(const Matrix& predictions, const Matrix& targets);

}  // namespace evfl::nn
