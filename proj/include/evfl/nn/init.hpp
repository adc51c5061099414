#pragma once

#include <string>

#include "evfl/nn/dense.hpp"
#include "evfl/nn/lstm.hpp"
#include "evfl/rng.hpp"

namespace evfl::nn {

/// Uniform in +/- sqrt(6 / (fan_in + fan_out)).
Matrix glorot_uniform(Index rows, Index cols, Index fan_in, Index fan_out,
                      Rng& rng);

/// Dense layer with Glorot weights and zero bias.
DenseLayerParams make_dense(Index input_size, Index output_size,
                            Activation activation, Rng& rng, std::string name);

/// LSTM layer with Glorot weights, zero biases except the forget-gate
/// block which starts at 1.0.
LstmLayerParams make_lstm(Index input_size, Index hidden_size, Rng& rng,
                          std::string name);

}  // namespace evfl::nn
