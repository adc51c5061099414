#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evfl/attack.hpp"
#include "evfl/nn/dense.hpp"
#include "evfl/nn/lstm.hpp"
#include "evfl/nn/params.hpp"
#include "evfl/rng.hpp"
#include "evfl/types.hpp"

namespace evfl {

/// Sequence-to-sequence LSTM autoencoder. The encoder's final hidden state
/// is repeated across the window length and decoded back to one value per
/// timestep. Dropout acts on the encoder output and on every decoder output
/// step during training only.
struct Autoencoder {
  nn::LstmLayerParams enc1;  // 1 -> enc_units
  nn::LstmLayerParams enc2;  // enc_units -> latent_units
  nn::LstmLayerParams dec1;  // latent_units -> latent_units
  nn::LstmLayerParams dec2;  // latent_units -> enc_units
  nn::DenseLayerParams head; // enc_units -> 1, identity, per timestep
  double dropout_rate = 0.2;
  Index window_length = 0;   // set by training; 0 means unconstrained
};

Autoencoder make_autoencoder(Index enc_units, Index latent_units,
                             double dropout_rate, Rng& rng);

nn::ModelParameters collect_parameters(const Autoencoder& model);
void assign_parameters(Autoencoder& model, const nn::ModelParameters& params);

/// Reconstructs each window; no dropout (inference mode).
Matrix autoencoder_reconstruct(const Autoencoder& model, const Matrix& windows);

struct DetectorTrainConfig {
  Index epochs = 30;
  Index batch_size = 32;
  double learning_rate = 1e-3;
  Index patience = 10;
  double validation_fraction = 0.1;
  Index enc_units = 50;
  Index latent_units = 25;
  double dropout_rate = 0.2;
  std::uint64_t seed = 0;
};

struct AutoencoderTrainResult {
  Autoencoder model;  // snapshot with the best validation loss
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
  Index best_epoch = 0;  // 0-based index into the loss traces
};

/// Trains on normal windows only. The validation set is the final
/// `validation_fraction` of the windows (temporal split); early stopping
/// restores the snapshot with the best validation reconstruction loss.
/// Deterministic per config seed.
AutoencoderTrainResult train_autoencoder(const Matrix& windows,
                                         const DetectorTrainConfig& config);

/// Patience bookkeeping for early stopping, separated out so the stopping
/// contract is testable without a training run.
class EarlyStopper {
 public:
  explicit EarlyStopper(Index patience) : patience_(patience) {}

  /// Feeds one validation loss; returns true when training should stop.
  bool observe(double loss) {
    if (seen_ == 0 || loss < best_loss_) {
      best_loss_ = loss;
      best_epoch_ = seen_;
    }
    ++seen_;
    return seen_ - 1 - best_epoch_ >= patience_;
  }

  Index best_epoch() const { return best_epoch_; }
  bool last_was_best() const { return best_epoch_ == seen_ - 1; }

 private:
  Index patience_;
  Index seen_ = 0;
  Index best_epoch_ = 0;
  double best_loss_ = 0.0;
};

/// One non-negative reconstruction MSE per window row, dropout disabled.
Vector reconstruction_errors(const Autoencoder& model, const Matrix& windows);

/// Linear interpolation between closest ranks (inclusive):
/// position = p/100 * (n-1) into the sorted scores. p in (0, 100].
double percentile_linear(std::vector<double> scores, double percentile);

struct DetectorCalibration {
  double threshold = 0.0;
  double percentile = 98.0;
  Index score_count = 0;
  // Retained summary of the training error distribution.
  std::vector<double> summary_probes;       // percentile levels
  std::vector<double> summary_values;       // matching score percentiles
};

/// threshold = percentile of the training scores. Fewer than 50 scores
/// triggers a stability warning on stderr, not an error.
DetectorCalibration calibrate_threshold(const std::vector<double>& scores,
                                        double percentile);

std::string calibration_to_json(const DetectorCalibration& calibration);
DetectorCalibration calibration_from_json(const std::string& text);

/// How per-window scores map onto per-timestamp flags. Window j covers
/// series steps [j, j+L-1].
enum class FlagMode {
  window_end,    // flag t iff the window ending at t exceeds the threshold
  any_covering,  // flag t iff any window covering t exceeds
  all_covering,  // flag t iff every window covering t exceeds
};

/// Scores every sliding window of the scaled series and maps the
/// exceedances onto timestamps. The first window_length-1 timestamps are
/// never flagged (no window ends there).
AnomalyMask flag_anomalies(const Autoencoder& model,
                           const DetectorCalibration& calibration,
                           const Vector& scaled_series, Index window_length,
                           FlagMode mode);

/// Same mapping applied to precomputed per-window scores (exposed for the
/// mapping oracle tests).
AnomalyMask map_window_exceedances(const std::vector<std::uint8_t>& exceeds,
                                   Index series_length, Index window_length,
                                   FlagMode mode);

}  // namespace evfl
