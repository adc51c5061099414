#include "evfl/windows.hpp"

#include <stdexcept>
#include <vector>

namespace evfl {

Index split_index(Index n, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("temporal_split: fraction must be in (0, 1)");
  }
  const Index split = static_cast<Index>(train_fraction * static_cast<double>(n));
  if (split < 1 || split >= n) {
    throw std::invalid_argument("temporal_split: series of length " +
                                std::to_string(n) +
                                " too short for fraction " +
                                std::to_string(train_fraction));
  }
  return split;
}

std::pair<Vector, Vector> temporal_split(const Vector& values,
                                         double train_fraction) {
  const Index split = split_index(values.size(), train_fraction);
  return {values.head(split), values.tail(values.size() - split)};
}

std::pair<TimeSeries, TimeSeries> temporal_split(const TimeSeries& series,
                                                 double train_fraction) {
  const Index split = split_index(series.size(), train_fraction);
  TimeSeries train = series;
  train.values = series.values.head(split);
  TimeSeries test = series;
  test.start_epoch_seconds = series.timestamp_at(split);
  test.values = series.values.tail(series.size() - split);
  return {std::move(train), std::move(test)};
}

WindowedDataset make_windows(const Vector& values, Index window_length) {
  if (window_length < 1) {
    throw std::invalid_argument("make_windows: window length must be >= 1");
  }
  if (values.size() < window_length + 1) {
    throw std::invalid_argument("make_windows: need at least " +
                                std::to_string(window_length + 1) +
                                " values, got " + std::to_string(values.size()));
  }
  const Index count = values.size() - window_length;
  WindowedDataset dataset;
  dataset.window_length = window_length;
  dataset.inputs.resize(count, window_length);
  dataset.targets.resize(count);
  for (Index i = 0; i < count; ++i) {
    dataset.inputs.row(i) = values.segment(i, window_length).transpose();
    dataset.targets[i] = values[i + window_length];
  }
  return dataset;
}

WindowedDataset concat_windows(const std::vector<WindowedDataset>& parts) {
  if (parts.empty()) {
    throw std::invalid_argument("concat_windows: no datasets");
  }
  Index total = 0;
  for (const WindowedDataset& part : parts) {
    if (part.window_length != parts.front().window_length) {
      throw std::invalid_argument("concat_windows: window lengths differ");
    }
    total += part.size();
  }
  WindowedDataset out;
  out.window_length = parts.front().window_length;
  out.inputs.resize(total, out.window_length);
  out.targets.resize(total);
  Index row = 0;
  for (const WindowedDataset& part : parts) {
    out.inputs.middleRows(row, part.size()) = part.inputs;
    out.targets.segment(row, part.size()) = part.targets;
    row += part.size();
  }
  return out;
}

}  // namespace evfl
