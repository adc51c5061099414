#pragma once

#include <utility>

#include "evfl/series.hpp"
#include "evfl/types.hpp"

namespace evfl {

/// Supervised (window, next value) pairs cut from one scaled series.
/// Row i of `inputs` covers source steps [i, i+L) and targets[i] is step i+L.
struct WindowedDataset {
  Matrix inputs;   // N x L
  Vector targets;  // N
  Index window_length = 0;

  Index size() const { return inputs.rows(); }
};

/// floor(fraction * n); rejects fractions outside (0, 1) and splits that
/// would leave either side empty.
Index split_index(Index n, double train_fraction);

/// Contiguous prefix/suffix split, no shuffling.
std::pair<Vector, Vector> temporal_split(const Vector& values,
                                         double train_fraction);
std::pair<TimeSeries, TimeSeries> temporal_split(const TimeSeries& series,
                                                 double train_fraction);

/// All length-L windows with their next-step targets; exactly N - L pairs.
WindowedDataset make_windows(const Vector& values, Index window_length);

/// Concatenates datasets with identical window lengths (row-wise).
WindowedDataset concat_windows(const std::vector<WindowedDataset>& parts);

}  // namespace evfl
