#pragma once

#include "evfl/rng.hpp"
#include "evfl/types.hpp"

namespace evfl::nn {

struct DropoutResult {
  Matrix output;
  Matrix mask;  // 0 for dropped entries, 1/(1-rate) for kept ones
};

/// Inverted dropout. In training mode each element is zeroed with
/// probability `rate` and survivors are scaled by 1/(1-rate); in inference
/// mode the input passes through unchanged and the mask is all ones.
/// `rate` must lie in [0, 1).
DropoutResult apply_dropout(const Matrix& input, double rate, Rng& rng,
                            bool training);

}  // namespace evfl::nn
