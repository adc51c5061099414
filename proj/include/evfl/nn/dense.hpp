#pragma once

#include <string>

#include "evfl/types.hpp"

namespace evfl::nn {

enum class Activation { identity, relu };

/// Fully connected layer y = act(x W^T + b). Inputs are batch-major:
/// each row of the input matrix is one sample.
struct DenseLayerParams {
  std::string name = "dense";
  Matrix weight;  // out x in
  Vector bias;    // out
  Activation activation = Activation::identity;

  Index input_size() const { return weight.cols(); }
  Index output_size() const { return weight.rows(); }
};

struct DenseCache {
  Matrix input;  // B x in
  Matrix pre;    // B x out, pre-activation
};

struct DenseGrads {
  Matrix weight;
  Vector bias;
};

/// Forward pass; fills `cache` when non-null so the backward pass is exact.
Matrix dense_forward(const DenseLayerParams& params, const Matrix& input,
                     DenseCache* cache = nullptr);

/// Backward pass. `upstream` is dLoss/dOutput (B x out). Returns
/// dLoss/dInput and fills `grads` with parameter gradients.
Matrix dense_backward(const DenseLayerParams& params, const DenseCache& cache,
                      const Matrix& upstream, DenseGrads& grads);

}  // namespace evfl::nn
