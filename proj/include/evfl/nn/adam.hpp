#pragma once

#include <vector>

#include "evfl/nn/params.hpp"
#include "evfl/types.hpp"

namespace evfl::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Per-parameter moment accumulators mirroring a ModelParameters layout.
struct AdamState {
  AdamConfig config;
  long step = 0;
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;

  static AdamState init(const ModelParameters& params, const AdamConfig& config);
};

/// One bias-corrected Adam update, in place. Rejects shape mismatches and
/// non-finite gradient entries.
void adam_step(AdamState& state, ModelParameters& params,
               const ModelParameters& grads);

}  // namespace evfl::nn
