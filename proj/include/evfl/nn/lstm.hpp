#pragma once

#include <string>
#include <vector>

#include "evfl/types.hpp"

namespace evfl::nn {

/// Time-major batched sequence: steps[t] is a (batch x features) matrix.
using SeqBatch = std::vector<Matrix>;

/// LSTM layer with the standard recurrence: sigmoid input/forget/output
/// gates, tanh cell candidate, tanh on the cell output. Gate blocks are
/// stacked row-wise in the fixed order input / forget / cell / output.
struct LstmLayerParams {
  std::string name = "lstm";
  Index input_size = 0;
  Index hidden_size = 0;
  Matrix w_input;      // 4H x in
  Matrix w_recurrent;  // 4H x H
  Vector bias;         // 4H
};

/// Activations retained by the forward pass; sufficient for exact BPTT.
struct LstmCache {
  Index input_size = 0;
  Index hidden_size = 0;
  Index steps = 0;
  Index batch = 0;
  SeqBatch inputs;                 // x_t, B x in
  std::vector<Matrix> gates;      // [i f g o] post-activation, B x 4H
  std::vector<Matrix> cell;       // c_t, B x H
  std::vector<Matrix> cell_tanh;  // tanh(c_t), B x H
  std::vector<Matrix> hidden;     // h_t, B x H
};

struct LstmGrads {
  Matrix w_input;
  Matrix w_recurrent;
  Vector bias;
};

/// Batched forward pass over a time-major sequence. Returns h_t for every
/// step; the caller keeps the last entry when only the final state is
/// needed. Fills `cache` when non-null.
SeqBatch lstm_forward(const LstmLayerParams& params, const SeqBatch& inputs,
                      LstmCache* cache = nullptr);

/// Exact backpropagation through time. `upstream` holds dLoss/dh_t per step
/// (zero matrices where a step receives no gradient). Returns dLoss/dx_t per
/// step and fills `grads`. Rejects caches that do not match `params` or
/// upstream gradients that do not match the cache.
SeqBatch lstm_backward(const LstmLayerParams& params, const LstmCache& cache,
                       const SeqBatch& upstream, LstmGrads& grads);

/// Single-sequence convenience wrapper: `sequence` rows are timesteps.
/// Returns the T x H matrix of hidden states when `return_sequence` is set,
/// otherwise a 1 x H matrix holding the final hidden state.
Matrix lstm_forward_sequence(const LstmLayerParams& params,
                             const Matrix& sequence, bool return_sequence,
                             LstmCache* cache = nullptr);

}  // namespace evfl::nn
