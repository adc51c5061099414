#pragma once

#include <cstdint>
#include <vector>

#include "evfl/nn/dense.hpp"
#include "evfl/nn/lstm.hpp"
#include "evfl/nn/params.hpp"
#include "evfl/rng.hpp"
#include "evfl/types.hpp"
#include "evfl/windows.hpp"

namespace evfl {

/// Next-step demand forecaster: LSTM -> Dense(relu) -> Dense(1). The LSTM
/// feeds only its final hidden state to the dense head.
struct Forecaster {
  nn::LstmLayerParams lstm;    // 1 -> lstm_units
  nn::DenseLayerParams hidden;  // lstm_units -> dense_units, relu
  nn::DenseLayerParams output;  // dense_units -> 1, identity
};

Forecaster make_forecaster(Index lstm_units, Index dense_units, Rng& rng);

nn::ModelParameters collect_parameters(const Forecaster& model);
void assign_parameters(Forecaster& model, const nn::ModelParameters& params);

/// Rebuilds a forecaster from a parameter collection produced by
/// collect_parameters; shapes are recovered from the blocks.
Forecaster forecaster_from_parameters(const nn::ModelParameters& params);

struct FitConfig {
  Index epochs = 10;
  Index batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
};

/// Mini-batch Adam on shuffled windows; the final partial batch is kept.
/// Returns one sample-weighted mean loss per epoch. Deterministic per seed.
std::vector<double> fit_forecaster(Forecaster& model, const WindowedDataset& data,
                                   const FitConfig& config);

/// Batched inference: one prediction per window row. No dropout anywhere in
/// this architecture, so training/inference forward passes coincide.
Vector forecaster_predict(const Forecaster& model, const Matrix& windows);

}  // namespace evfl
