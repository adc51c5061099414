#include "evfl/nn/dropout.hpp"

#include <stdexcept>

namespace evfl::nn {

DropoutResult apply_dropout(const Matrix& input, double rate, Rng& rng,
                            bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw std::invalid_argument("apply_dropout: rate must be in [0, 1)");
  }
  DropoutResult result;
  if (!training || rate == 0.0) {
    result.output = input;
    result.mask = Matrix::Ones(input.rows(), input.cols());
    return result;
  }
  const double keep_scale = 1.0 / (1.0 - rate);
  result.mask.resize(input.rows(), input.cols());
  // Column-major fill so mask layout matches Eigen storage order.
  for (Index j = 0; j < input.cols(); ++j) {
    for (Index i = 0; i < input.rows(); ++i) {
      result.mask(i, j) = rng.uniform() < rate ? 0.0 : keep_scale;
    }
  }
  result.output = input.cwiseProduct(result.mask);
  return result;
}

}  // namespace evfl::nn
