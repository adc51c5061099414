#include "evfl/nn/loss.hpp"

#include <stdexcept>

namespace evfl::nn {

MseResult mse_loss(const Matrix& predictions, const Matrix& targets) {
  if (predictions.size() == 0) {
    throw std::invalid_argument("mse_loss: empty input");
  }
  if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols()) {
    throw std::invalid_argument("mse_loss: prediction/target shape mismatch");
  }
  const double n = static_cast<double>(predictions.size());
  MseResult result;
  result.grad = predictions - targets;
  result.loss = result.grad.squaredNorm() / n;
  result.grad *= 2.0 / n;
  return result;
}

}  // namespace evfl::nn
