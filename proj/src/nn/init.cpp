#include "evfl/nn/init.hpp"

#include <cmath>

namespace evfl::nn {

Matrix glorot_uniform(Index rows, Index cols, Index fan_in, Index fan_out,
                      Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      m(i, j) = rng.uniform(-limit, limit);
    }
  }
  return m;
}

DenseLayerParams make_dense(Index input_size, Index output_size,
                            Activation activation, Rng& rng, std::string name) {
  DenseLayerParams p;
  p.name = std::move(name);
  p.weight = glorot_uniform(output_size, input_size, input_size, output_size, rng);
  p.bias = Vector::Zero(output_size);
  p.activation = activation;
  return p;
}

LstmLayerParams make_lstm(Index input_size, Index hidden_size, Rng& rng,
                          std::string name) {
  LstmLayerParams p;
  p.name = std::move(name);
  p.input_size = input_size;
  p.hidden_size = hidden_size;
  p.w_input = glorot_uniform(4 * hidden_size, input_size, input_size,
                             hidden_size, rng);
  p.w_recurrent = glorot_uniform(4 * hidden_size, hidden_size, hidden_size,
                                 hidden_size, rng);
  p.bias = Vector::Zero(4 * hidden_size);
  p.bias.segment(hidden_size, hidden_size).setOnes();  // forget gate
  return p;
}

}  // namespace evfl::nn
