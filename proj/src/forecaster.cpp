#include "evfl/forecaster.hpp"

#include <numeric>
#include <stdexcept>

#include "evfl/nn/adam.hpp"
#include "evfl/nn/init.hpp"
#include "evfl/nn/loss.hpp"

namespace evfl {

Forecaster make_forecaster(Index lstm_units, Index dense_units, Rng& rng) {
  Forecaster model;
  model.lstm = nn::make_lstm(1, lstm_units, rng, "lstm");
  model.hidden = nn::make_dense(lstm_units, dense_units, nn::Activation::relu,
                                rng, "hidden");
  model.output = nn::make_dense(dense_units, 1, nn::Activation::identity, rng,
                                "output");
  return model;
}

nn::ModelParameters collect_parameters(const Forecaster& model) {
  nn::ModelParameters params;
  params.blocks = {
      {"lstm/w_input", model.lstm.w_input},
      {"lstm/w_recurrent", model.lstm.w_recurrent},
      {"lstm/bias", model.lstm.bias},
      {"hidden/weight", model.hidden.weight},
      {"hidden/bias", model.hidden.bias},
      {"output/weight", model.output.weight},
      {"output/bias", model.output.bias},
  };
  return params;
}

void assign_parameters(Forecaster& model, const nn::ModelParameters& params) {
  if (params.blocks.size() != 7) {
    throw std::invalid_argument("assign_parameters: expected 7 forecaster blocks");
  }
  if (!params.same_shape(collect_parameters(model))) {
    throw std::invalid_argument("assign_parameters: parameter shapes do not match model");
  }
  model.lstm.w_input = params.blocks[0].value;
  model.lstm.w_recurrent = params.blocks[1].value;
  model.lstm.bias = params.blocks[2].value;
  model.hidden.weight = params.blocks[3].value;
  model.hidden.bias = params.blocks[4].value;
  model.output.weight = params.blocks[5].value;
  model.output.bias = params.blocks[6].value;
}

Forecaster forecaster_from_parameters(const nn::ModelParameters& params) {
  if (params.blocks.size() != 7) {
    throw std::invalid_argument(
        "forecaster_from_parameters: expected 7 blocks, got " +
        std::to_string(params.blocks.size()));
  }
  const Matrix& w_input = params.blocks[0].value;
  const Matrix& w_recurrent = params.blocks[1].value;
  const Index hidden_size = w_recurrent.cols();
  if (w_input.rows() != 4 * hidden_size || w_recurrent.rows() != 4 * hidden_size) {
    throw std::invalid_argument("forecaster_from_parameters: inconsistent LSTM shapes");
  }
  Forecaster model;
  model.lstm.name = "lstm";
  model.lstm.input_size = w_input.cols();
  model.lstm.hidden_size = hidden_size;
  model.lstm.w_input = w_input;
  model.lstm.w_recurrent = w_recurrent;
  model.lstm.bias = params.blocks[2].value;
  model.hidden.name = "hidden";
  model.hidden.weight = params.blocks[3].value;
  model.hidden.bias = params.blocks[4].value;
  model.hidden.activation = nn::Activation::relu;
  model.output.name = "output";
  model.output.weight = params.blocks[5].value;
  model.output.bias = params.blocks[6].value;
  model.output.activation = nn::Activation::identity;
  return model;
}

namespace {

// Splits a (B x L) window block into L time-major steps of shape (B x 1).
nn::SeqBatch to_steps(const Matrix& windows) {
  nn::SeqBatch steps(windows.cols());
  for (Index t = 0; t < windows.cols(); ++t) {
    steps[t] = windows.col(t);
  }
  return steps;
}

Matrix forward(const Forecaster& model, const Matrix& windows,
               nn::LstmCache* lstm_cache, nn::DenseCache* hidden_cache,
               nn::DenseCache* output_cache) {
  const nn::SeqBatch steps = to_steps(windows);
  const nn::SeqBatch hidden_states =
      nn::lstm_forward(model.lstm, steps, lstm_cache);
  const Matrix hidden_out =
      nn::dense_forward(model.hidden, hidden_states.back(), hidden_cache);
  return nn::dense_forward(model.output, hidden_out, output_cache);
}

}  // namespace

std::vector<double> fit_forecaster(Forecaster& model, const WindowedDataset& data,
                                   const FitConfig& config) {
  if (data.size() == 0) {
    throw std::invalid_argument("fit_forecaster: empty dataset");
  }
  if (config.batch_size < 1 || config.epochs < 0) {
    throw std::invalid_argument("fit_forecaster: invalid training config");
  }

  Rng rng(config.seed);
  nn::ModelParameters params = collect_parameters(model);
  nn::AdamConfig adam_config;
  adam_config.learning_rate = config.learning_rate;
  nn::AdamState adam = nn::AdamState::init(params, adam_config);

  const Index n = data.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});

  std::vector<double> epoch_losses;
  epoch_losses.reserve(static_cast<std::size_t>(config.epochs));
  Matrix batch_inputs;
  Matrix batch_targets;
  for (Index epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (Index begin = 0; begin < n; begin += config.batch_size) {
      const Index b = std::min(config.batch_size, n - begin);
      batch_inputs.resize(b, data.window_length);
      batch_targets.resize(b, 1);
      for (Index i = 0; i < b; ++i) {
        batch_inputs.row(i) = data.inputs.row(order[static_cast<std::size_t>(begin + i)]);
        batch_targets(i, 0) = data.targets[order[static_cast<std::size_t>(begin + i)]];
      }

      nn::LstmCache lstm_cache;
      nn::DenseCache hidden_cache, output_cache;
      const Matrix predictions =
          forward(model, batch_inputs, &lstm_cache, &hidden_cache, &output_cache);
      const nn::MseResult loss = nn::mse_loss(predictions, batch_targets);
      loss_sum += loss.loss * static_cast<double>(b);

      nn::DenseGrads output_grads, hidden_grads;
      const Matrix d_hidden_out =
          nn::dense_backward(model.output, output_cache, loss.grad, output_grads);
      const Matrix d_last =
          nn::dense_backward(model.hidden, hidden_cache, d_hidden_out, hidden_grads);
      nn::SeqBatch upstream(static_cast<std::size_t>(data.window_length),
                            Matrix::Zero(b, model.lstm.hidden_size));
      upstream.back() = d_last;
      nn::LstmGrads lstm_grads;
      nn::lstm_backward(model.lstm, lstm_cache, upstream, lstm_grads);

      nn::ModelParameters grads;
      grads.blocks = {
          {"lstm/w_input", std::move(lstm_grads.w_input)},
          {"lstm/w_recurrent", std::move(lstm_grads.w_recurrent)},
          {"lstm/bias", std::move(lstm_grads.bias)},
          {"hidden/weight", std::move(hidden_grads.weight)},
          {"hidden/bias", std::move(hidden_grads.bias)},
          {"output/weight", std::move(output_grads.weight)},
          {"output/bias", std::move(output_grads.bias)},
      };
      nn::adam_step(adam, params, grads);
      assign_parameters(model, params);
    }
    epoch_losses.push_back(loss_sum / static_cast<double>(n));
  }
  return epoch_losses;
}

Vector forecaster_predict(const Forecaster& model, const Matrix& windows) {
  if (windows.rows() == 0) {
    throw std::invalid_argument("forecaster_predict: no windows");
  }
  return forward(model, windows, nullptr, nullptr, nullptr).col(0);
}

}  // namespace evfl
