#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evfl/forecaster.hpp"
#include "evfl/nn/params.hpp"
#include "evfl/types.hpp"
#include "evfl/windows.hpp"

namespace evfl {

/// One federation participant. The orchestrator only ever reads the
/// windowed dataset held here; raw windows never cross client boundaries.
struct ClientState {
  std::string client_id;
  WindowedDataset train;
  nn::ModelParameters params;  // local parameters after the last round
  Index sample_count = 0;
};

enum class AveragingMode { uniform, sample_weighted };

struct FederationConfig {
  Index rounds = 5;
  Index epochs_per_round = 10;
  Index batch_size = 32;
  double learning_rate = 1e-3;
  AveragingMode averaging = AveragingMode::uniform;
  std::uint64_t seed = 0;
  bool parallel_clients = true;
};

/// The per-(round, client) stream used for local training; exposed so the
/// single-client equivalence oracle can reproduce federation runs exactly.
std::uint64_t federation_stream_seed(std::uint64_t seed, Index round,
                                     const std::string& client_id);

struct LocalTrainResult {
  nn::ModelParameters params;
  std::vector<double> epoch_loss;
};

/// Local update: initialize from the global parameters, run `epochs` of
/// mini-batch Adam with a fresh optimizer (only weights are exchanged, so
/// optimizer state never survives a round). Deterministic per stream seed.
LocalTrainResult local_train(const ClientState& client,
                             const nn::ModelParameters& global, Index epochs,
                             Index batch_size, double learning_rate,
                             std::uint64_t stream_seed);

/// Element-wise mean of the parameter collections; sample-weighted mode
/// weights by sample_counts. Shapes must match on every client.
nn::ModelParameters federated_average(
    const std::vector<nn::ModelParameters>& params, AveragingMode mode,
    const std::vector<Index>& sample_counts = {},
    const std::vector<std::string>& client_ids = {});

struct RoundClientTrace {
  Index round = 0;
  std::string client_id;
  std::vector<double> epoch_loss;
};

struct FederationResult {
  nn::ModelParameters global;
  std::vector<RoundClientTrace> history;
};

/// rounds x (local training on every client, average, broadcast). Clients
/// are processed in client_id order so averaging is order-normalized; they
/// may train on parallel threads without changing the result. Clients with
/// empty datasets are skipped with a warning; an all-empty federation is
/// rejected.
FederationResult run_federation(std::vector<ClientState>& clients,
                                const FederationConfig& config,
                                const nn::ModelParameters& initial_global);

struct CentralizedConfig {
  Index epochs = 50;  // matched to rounds * epochs_per_round for fairness
  Index batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
};

struct CentralizedResult {
  nn::ModelParameters params;
  std::vector<double> epoch_loss;
};

/// Single model trained on the pooled windows of all clients.
CentralizedResult centralized_train(const WindowedDataset& pooled,
                                    const CentralizedConfig& config,
                                    const nn::ModelParameters& initial);

}  // namespace evfl
