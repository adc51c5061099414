#include "evfl/detector.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "evfl/nn/adam.hpp"
#include "evfl/nn/dropout.hpp"
#include "evfl/nn/init.hpp"
#include "evfl/nn/loss.hpp"

namespace evfl {

Autoencoder make_autoencoder(Index enc_units, Index latent_units,
                             double dropout_rate, Rng& rng) {
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw std::invalid_argument("make_autoencoder: dropout rate must be in [0, 1)");
  }
  Autoencoder model;
  model.enc1 = nn::make_lstm(1, enc_units, rng, "enc1");
  model.enc2 = nn::make_lstm(enc_units, latent_units, rng, "enc2");
  model.dec1 = nn::make_lstm(latent_units, latent_units, rng, "dec1");
  model.dec2 = nn::make_lstm(latent_units, enc_units, rng, "dec2");
  model.head = nn::make_dense(enc_units, 1, nn::Activation::identity, rng, "head");
  model.dropout_rate = dropout_rate;
  return model;
}

nn::ModelParameters collect_parameters(const Autoencoder& model) {
  nn::ModelParameters params;
  auto push_lstm = [&](const nn::LstmLayerParams& layer) {
    params.blocks.push_back({layer.name + "/w_input", layer.w_input});
    params.blocks.push_back({layer.name + "/w_recurrent", layer.w_recurrent});
    params.blocks.push_back({layer.name + "/bias", layer.bias});
  };
  push_lstm(model.enc1);
  push_lstm(model.enc2);
  push_lstm(model.dec1);
  push_lstm(model.dec2);
  params.blocks.push_back({"head/weight", model.head.weight});
  params.blocks.push_back({"head/bias", model.head.bias});
  return params;
}

void assign_parameters(Autoencoder& model, const nn::ModelParameters& params) {
  if (params.blocks.size() != 14 ||
      !params.same_shape(collect_parameters(model))) {
    throw std::invalid_argument(
        "assign_parameters: parameter blocks do not match autoencoder");
  }
  std::size_t k = 0;
  auto pull_lstm = [&](nn::LstmLayerParams& layer) {
    layer.w_input = params.blocks[k++].value;
    layer.w_recurrent = params.blocks[k++].value;
    layer.bias = params.blocks[k++].value;
  };
  pull_lstm(model.enc1);
  pull_lstm(model.enc2);
  pull_lstm(model.dec1);
  pull_lstm(model.dec2);
  model.head.weight = params.blocks[k++].value;
  model.head.bias = params.blocks[k++].value;
}

namespace {

struct AeCaches {
  nn::LstmCache enc1, enc2, dec1, dec2;
  std::vector<nn::DenseCache> head;
  Matrix latent_mask;
  std::vector<Matrix> output_masks;
};

// Forward pass over a (B x L) window block; returns the (B x L)
// reconstruction. Training mode applies dropout and requires `rng`.
Matrix ae_forward(const Autoencoder& model, const Matrix& windows, bool training,
                  Rng* rng, AeCaches* caches) {
  const Index steps = windows.cols();
  const Index batch = windows.rows();
  nn::SeqBatch inputs(steps);
  for (Index t = 0; t < steps; ++t) {
    inputs[t] = windows.col(t);
  }

  nn::SeqBatch enc1_out = nn::lstm_forward(model.enc1, inputs,
                                           caches ? &caches->enc1 : nullptr);
  nn::SeqBatch enc2_out = nn::lstm_forward(model.enc2, enc1_out,
                                           caches ? &caches->enc2 : nullptr);
  Matrix latent = enc2_out.back();
  if (training) {
    nn::DropoutResult drop =
        nn::apply_dropout(latent, model.dropout_rate, *rng, true);
    latent = std::move(drop.output);
    if (caches) caches->latent_mask = std::move(drop.mask);
  }

  nn::SeqBatch repeated(steps, latent);
  nn::SeqBatch dec1_out = nn::lstm_forward(model.dec1, repeated,
                                           caches ? &caches->dec1 : nullptr);
  nn::SeqBatch dec2_out = nn::lstm_forward(model.dec2, dec1_out,
                                           caches ? &caches->dec2 : nullptr);

  if (caches) {
    caches->head.resize(static_cast<std::size_t>(steps));
    caches->output_masks.resize(static_cast<std::size_t>(steps));
  }
  Matrix reconstruction(batch, steps);
  for (Index t = 0; t < steps; ++t) {
    Matrix step_out = dec2_out[t];
    if (training) {
      nn::DropoutResult drop =
          nn::apply_dropout(step_out, model.dropout_rate, *rng, true);
      step_out = std::move(drop.output);
      if (caches) caches->output_masks[static_cast<std::size_t>(t)] = std::move(drop.mask);
    }
    reconstruction.col(t) = nn::dense_forward(
        model.head, step_out, caches ? &caches->head[static_cast<std::size_t>(t)] : nullptr);
  }
  return reconstruction;
}

// Exact gradients for the blocks in collect_parameters order.
nn::ModelParameters ae_backward(const Autoencoder& model, const AeCaches& caches,
                                const Matrix& d_reconstruction, bool training) {
  const Index steps = d_reconstruction.cols();
  const Index batch = d_reconstruction.rows();

  nn::DenseGrads head_grads;
  head_grads.weight = Matrix::Zero(model.head.weight.rows(), model.head.weight.cols());
  head_grads.bias = Vector::Zero(model.head.bias.size());
  nn::SeqBatch d_dec2(steps);
  for (Index t = 0; t < steps; ++t) {
    nn::DenseGrads step_grads;
    Matrix d_step = nn::dense_backward(model.head,
                                       caches.head[static_cast<std::size_t>(t)],
                                       d_reconstruction.col(t), step_grads);
    head_grads.weight += step_grads.weight;
    head_grads.bias += step_grads.bias;
    if (training) {
      d_step = d_step.cwiseProduct(caches.output_masks[static_cast<std::size_t>(t)]);
    }
    d_dec2[t] = std::move(d_step);
  }

  nn::LstmGrads dec2_grads;
  nn::SeqBatch d_dec1 = nn::lstm_backward(model.dec2, caches.dec2, d_dec2, dec2_grads);
  nn::LstmGrads dec1_grads;
  nn::SeqBatch d_repeated = nn::lstm_backward(model.dec1, caches.dec1, d_dec1, dec1_grads);

  Matrix d_latent = Matrix::Zero(batch, model.enc2.hidden_size);
  for (const Matrix& d : d_repeated) {
    d_latent += d;
  }
  if (training) {
    d_latent = d_latent.cwiseProduct(caches.latent_mask);
  }

  nn::SeqBatch d_enc2(steps, Matrix::Zero(batch, model.enc2.hidden_size));
  d_enc2.back() = std::move(d_latent);
  nn::LstmGrads enc2_grads;
  nn::SeqBatch d_enc1 = nn::lstm_backward(model.enc2, caches.enc2, d_enc2, enc2_grads);
  nn::LstmGrads enc1_grads;
  nn::lstm_backward(model.enc1, caches.enc1, d_enc1, enc1_grads);

  nn::ModelParameters grads;
  auto push_lstm = [&](const std::string& name, nn::LstmGrads& g) {
    grads.blocks.push_back({name + "/w_input", std::move(g.w_input)});
    grads.blocks.push_back({name + "/w_recurrent", std::move(g.w_recurrent)});
    grads.blocks.push_back({name + "/bias", std::move(g.bias)});
  };
  push_lstm("enc1", enc1_grads);
  push_lstm("enc2", enc2_grads);
  push_lstm("dec1", dec1_grads);
  push_lstm("dec2", dec2_grads);
  grads.blocks.push_back({"head/weight", std::move(head_grads.weight)});
  grads.blocks.push_back({"head/bias", std::move(head_grads.bias)});
  return grads;
}

}  // namespace

Matrix autoencoder_reconstruct(const Autoencoder& model, const Matrix& windows) {
  if (windows.rows() == 0 || windows.cols() == 0) {
    throw std::invalid_argument("autoencoder_reconstruct: empty window block");
  }
  return ae_forward(model, windows, false, nullptr, nullptr);
}

AutoencoderTrainResult train_autoencoder(const Matrix& windows,
                                         const DetectorTrainConfig& config) {
  if (windows.rows() == 0) {
    throw std::invalid_argument("train_autoencoder: no normal windows available");
  }
  if (!(config.validation_fraction >= 0.0 && config.validation_fraction < 1.0)) {
    throw std::invalid_argument("train_autoencoder: validation fraction out of range");
  }
  const Index n = windows.rows();
  Index val_count = static_cast<Index>(config.validation_fraction * static_cast<double>(n));
  if (config.validation_fraction > 0.0 && val_count == 0) {
    val_count = 1;
  }
  const Index train_count = n - val_count;
  if (train_count < 1) {
    throw std::invalid_argument("train_autoencoder: no training windows after validation split");
  }
  if (train_count <= config.batch_size) {
    throw std::invalid_argument("train_autoencoder: need at least 2 batches of windows, got " +
                                std::to_string(train_count));
  }

  // Temporal split: validation = final windows.
  const Matrix train_windows = windows.topRows(train_count);
  const Matrix val_windows = val_count > 0 ? windows.bottomRows(val_count) : Matrix();

  Rng rng(config.seed);
  AutoencoderTrainResult result;
  result.model = make_autoencoder(config.enc_units, config.latent_units,
                                  config.dropout_rate, rng);
  Autoencoder& model = result.model;

  nn::ModelParameters params = collect_parameters(model);
  nn::AdamConfig adam_config;
  adam_config.learning_rate = config.learning_rate;
  nn::AdamState adam = nn::AdamState::init(params, adam_config);

  std::vector<Index> order(static_cast<std::size_t>(train_count));
  std::iota(order.begin(), order.end(), Index{0});

  EarlyStopper stopper(config.patience);
  nn::ModelParameters best_params = params;
  Matrix batch(std::min(config.batch_size, train_count), windows.cols());
  for (Index epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (Index begin = 0; begin < train_count; begin += config.batch_size) {
      const Index b = std::min(config.batch_size, train_count - begin);
      batch.resize(b, windows.cols());
      for (Index i = 0; i < b; ++i) {
        batch.row(i) = train_windows.row(order[static_cast<std::size_t>(begin + i)]);
      }
      AeCaches caches;
      const Matrix reconstruction = ae_forward(model, batch, true, &rng, &caches);
      const nn::MseResult loss = nn::mse_loss(reconstruction, batch);
      loss_sum += loss.loss * static_cast<double>(b);
      nn::ModelParameters grads = ae_backward(model, caches, loss.grad, true);
      nn::adam_step(adam, params, grads);
      assign_parameters(model, params);
    }
    result.train_loss.push_back(loss_sum / static_cast<double>(train_count));

    double monitored = result.train_loss.back();
    if (val_count > 0) {
      const Matrix val_recon = ae_forward(model, val_windows, false, nullptr, nullptr);
      monitored = nn::mse_loss(val_recon, val_windows).loss;
      result.validation_loss.push_back(monitored);
    }
    const bool stop = stopper.observe(monitored);
    if (stopper.last_was_best()) {
      best_params = params;
    }
    if (stop) {
      break;
    }
  }
  result.best_epoch = stopper.best_epoch();
  assign_parameters(model, best_params);
  model.window_length = windows.cols();
  return result;
}

Vector reconstruction_errors(const Autoencoder& model, const Matrix& windows) {
  if (windows.rows() == 0 || windows.cols() == 0) {
    throw std::invalid_argument("reconstruction_errors: empty window block");
  }
  if (model.window_length > 0 && windows.cols() != model.window_length) {
    throw std::invalid_argument("reconstruction_errors: window length " +
                                std::to_string(windows.cols()) +
                                " does not match training length " +
                                std::to_string(model.window_length));
  }
  const Index n = windows.rows();
  Vector scores(n);
  constexpr Index chunk = 512;
  for (Index begin = 0; begin < n; begin += chunk) {
    const Index b = std::min(chunk, n - begin);
    const Matrix block = windows.middleRows(begin, b);
    const Matrix reconstruction = ae_forward(model, block, false, nullptr, nullptr);
    scores.segment(begin, b) =
        (reconstruction - block).array().square().rowwise().mean();
  }
  return scores;
}

double percentile_linear(std::vector<double> scores, double percentile) {
  if (scores.empty()) {
    throw std::invalid_argument("percentile_linear: empty scores");
  }
  if (!(percentile >= 0.0 && percentile <= 100.0)) {
    throw std::invalid_argument("percentile_linear: percentile out of [0, 100]");
  }
  std::sort(scores.begin(), scores.end());
  const double position =
      percentile / 100.0 * static_cast<double>(scores.size() - 1);
  const auto lower = static_cast<std::size_t>(position);
  if (lower + 1 >= scores.size()) {
    return scores.back();
  }
  const double fraction = position - static_cast<double>(lower);
  return scores[lower] + fraction * (scores[lower + 1] - scores[lower]);
}

DetectorCalibration calibrate_threshold(const std::vector<double>& scores,
                                        double percentile) {
  if (scores.empty()) {
    throw std::invalid_argument("calibrate_threshold: empty scores");
  }
  if (!(percentile > 0.0 && percentile <= 100.0)) {
    throw std::invalid_argument("calibrate_threshold: percentile out of (0, 100]");
  }
  if (scores.size() < 50) {
    std::cerr << "calibrate_threshold: only " << scores.size()
              << " scores; percentile estimate may be unstable\n";
  }
  DetectorCalibration calibration;
  calibration.percentile = percentile;
  calibration.score_count = static_cast<Index>(scores.size());
  calibration.threshold = percentile_linear(scores, percentile);
  calibration.summary_probes = {0, 25, 50, 75, 90, 95, 98, 99, 100};
  for (double p : calibration.summary_probes) {
    calibration.summary_values.push_back(percentile_linear(scores, p));
  }
  return calibration;
}

std::string calibration_to_json(const DetectorCalibration& calibration) {
  nlohmann::json root;
  root["threshold"] = calibration.threshold;
  root["percentile"] = calibration.percentile;
  root["score_count"] = calibration.score_count;
  root["summary"]["probes"] = calibration.summary_probes;
  root["summary"]["values"] = calibration.summary_values;
  return root.dump(2);
}

DetectorCalibration calibration_from_json(const std::string& text) {
  const nlohmann::json root = nlohmann::json::parse(text);
  DetectorCalibration calibration;
  calibration.threshold = root.at("threshold").get<double>();
  calibration.percentile = root.at("percentile").get<double>();
  calibration.score_count = root.at("score_count").get<Index>();
  if (root.contains("summary")) {
    calibration.summary_probes =
        root["summary"].at("probes").get<std::vector<double>>();
    calibration.summary_values =
        root["summary"].at("values").get<std::vector<double>>();
  }
  return calibration;
}

AnomalyMask map_window_exceedances(const std::vector<std::uint8_t>& exceeds,
                                   Index series_length, Index window_length,
                                   FlagMode mode) {
  const Index window_count = series_length - window_length + 1;
  if (static_cast<Index>(exceeds.size()) != window_count) {
    throw std::invalid_argument("map_window_exceedances: score count mismatch");
  }
  AnomalyMask mask = AnomalyMask::all_false(series_length);
  if (mode == FlagMode::window_end) {
    for (Index j = 0; j < window_count; ++j) {
      if (exceeds[static_cast<std::size_t>(j)]) {
        mask.set(j + window_length - 1, true);
      }
    }
    return mask;
  }
  // Prefix sums over window exceedances for the covering-window modes.
  std::vector<Index> prefix(static_cast<std::size_t>(window_count) + 1, 0);
  for (Index j = 0; j < window_count; ++j) {
    prefix[static_cast<std::size_t>(j) + 1] =
        prefix[static_cast<std::size_t>(j)] +
        (exceeds[static_cast<std::size_t>(j)] ? 1 : 0);
  }
  for (Index t = window_length - 1; t < series_length; ++t) {
    const Index first = std::max(Index{0}, t - window_length + 1);
    const Index last = std::min(t, window_count - 1);
    const Index covering = last - first + 1;
    const Index exceeding = prefix[static_cast<std::size_t>(last) + 1] -
                            prefix[static_cast<std::size_t>(first)];
    const bool flag = mode == FlagMode::any_covering ? exceeding > 0
                                                     : exceeding == covering;
    mask.set(t, flag);
  }
  return mask;
}

AnomalyMask flag_anomalies(const Autoencoder& model,
                           const DetectorCalibration& calibration,
                           const Vector& scaled_series, Index window_length,
                           FlagMode mode) {
  if (window_length < 1) {
    throw std::invalid_argument("flag_anomalies: window length must be >= 1");
  }
  if (scaled_series.size() < window_length) {
    throw std::invalid_argument("flag_anomalies: series shorter than one window");
  }
  const Index n = scaled_series.size();
  const Index window_count = n - window_length + 1;
  Matrix windows(window_count, window_length);
  for (Index j = 0; j < window_count; ++j) {
    windows.row(j) = scaled_series.segment(j, window_length).transpose();
  }
  const Vector scores = reconstruction_errors(model, windows);
  std::vector<std::uint8_t> exceeds(static_cast<std::size_t>(window_count));
  for (Index j = 0; j < window_count; ++j) {
    exceeds[static_cast<std::size_t>(j)] = scores[j] > calibration.threshold ? 1 : 0;
  }
  return map_window_exceedances(exceeds, n, window_length, mode);
}

}  // namespace evfl
