#include "evfl/fed.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

namespace evfl {

std::uint64_t federation_stream_seed(std::uint64_t seed, Index round,
                                     const std::string& client_id) {
  return derive_seed(seed, "fed/round=" + std::to_string(round) +
                               "/client=" + client_id);
}

LocalTrainResult local_train(const ClientState& client,
                             const nn::ModelParameters& global, Index epochs,
                             Index batch_size, double learning_rate,
                             std::uint64_t stream_seed) {
  if (client.train.size() == 0) {
    throw std::invalid_argument("local_train: client '" + client.client_id +
                                "' has no training windows");
  }
  LocalTrainResult result;
  if (epochs == 0) {
    result.params = global;
    return result;
  }
  Forecaster model = forecaster_from_parameters(global);
  FitConfig config;
  config.epochs = epochs;
  config.batch_size = batch_size;
  config.learning_rate = learning_rate;
  config.seed = stream_seed;
  result.epoch_loss = fit_forecaster(model, client.train, config);
  result.params = collect_parameters(model);
  return result;
}

nn::ModelParameters federated_average(
    const std::vector<nn::ModelParameters>& params, AveragingMode mode,
    const std::vector<Index>& sample_counts,
    const std::vector<std::string>& client_ids) {
  if (params.empty()) {
    throw std::invalid_argument("federated_average: no clients");
  }
  auto client_name = [&](std::size_t i) {
    return i < client_ids.size() ? client_ids[i] : std::to_string(i);
  };
  for (std::size_t i = 1; i < params.size(); ++i) {
    if (!params[i].same_shape(params[0])) {
      throw std::invalid_argument(
          "federated_average: parameter shapes of client '" + client_name(i) +
          "' do not match client '" + client_name(0) + "'");
    }
  }

  // Identical inputs average to themselves exactly (also the 1-client case).
  bool all_equal = true;
  for (std::size_t i = 1; i < params.size() && all_equal; ++i) {
    for (std::size_t b = 0; b < params[0].blocks.size() && all_equal; ++b) {
      all_equal = params[i].blocks[b].value == params[0].blocks[b].value;
    }
  }
  if (all_equal) {
    return params[0];
  }

  std::vector<double> weights(params.size());
  if (mode == AveragingMode::uniform) {
    std::fill(weights.begin(), weights.end(),
              1.0 / static_cast<double>(params.size()));
  } else {
    if (sample_counts.size() != params.size()) {
      throw std::invalid_argument(
          "federated_average: sample counts required for weighted averaging");
    }
    double total = 0.0;
    for (Index c : sample_counts) {
      if (c < 0) {
        throw std::invalid_argument("federated_average: negative sample count");
      }
      total += static_cast<double>(c);
    }
    if (total <= 0.0) {
      throw std::invalid_argument("federated_average: zero total sample count");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      weights[i] = static_cast<double>(sample_counts[i]) / total;
    }
  }

  nn::ModelParameters average = params[0];
  average.scale(weights[0]);
  for (std::size_t i = 1; i < params.size(); ++i) {
    average.add_scaled(params[i], weights[i]);
  }
  return average;
}

FederationResult run_federation(std::vector<ClientState>& clients,
                                const FederationConfig& config,
                                const nn::ModelParameters& initial_global) {
  if (clients.empty()) {
    throw std::invalid_argument("run_federation: no clients");
  }
  std::set<std::string> ids;
  for (const ClientState& client : clients) {
    if (!ids.insert(client.client_id).second) {
      throw std::invalid_argument("run_federation: duplicate client id '" +
                                  client.client_id + "'");
    }
  }

  // Order-normalized processing: averaging runs over clients sorted by id.
  std::vector<std::size_t> order(clients.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return clients[a].client_id < clients[b].client_id;
  });

  std::vector<std::size_t> active;
  for (std::size_t i : order) {
    if (clients[i].train.size() == 0) {
      std::cerr << "run_federation: skipping client '" << clients[i].client_id
                << "' (no training windows)\n";
      continue;
    }
    active.push_back(i);
  }
  if (active.empty()) {
    throw std::invalid_argument("run_federation: every client is empty");
  }

  FederationResult result;
  result.global = initial_global;
  for (std::size_t i : active) {
    clients[i].params = initial_global;
    clients[i].sample_count = clients[i].train.size();
  }

  for (Index round = 0; round < config.rounds; ++round) {
    std::vector<LocalTrainResult> updates(active.size());
    auto train_one = [&](std::size_t slot) {
      const ClientState& client = clients[active[slot]];
      updates[slot] = local_train(
          client, result.global, config.epochs_per_round, config.batch_size,
          config.learning_rate,
          federation_stream_seed(config.seed, round, client.client_id));
    };
    if (config.parallel_clients && active.size() > 1) {
      std::vector<std::thread> workers;
      workers.reserve(active.size());
      for (std::size_t slot = 0; slot < active.size(); ++slot) {
        workers.emplace_back(train_one, slot);
      }
      for (std::thread& worker : workers) {
        worker.join();
      }
    } else {
      for (std::size_t slot = 0; slot < active.size(); ++slot) {
        train_one(slot);
      }
    }

    std::vector<nn::ModelParameters> round_params;
    std::vector<Index> counts;
    std::vector<std::string> round_ids;
    round_params.reserve(active.size());
    for (std::size_t slot = 0; slot < active.size(); ++slot) {
      ClientState& client = clients[active[slot]];
      client.params = updates[slot].params;
      round_params.push_back(updates[slot].params);
      counts.push_back(client.sample_count);
      round_ids.push_back(client.client_id);
      result.history.push_back(
          {round, client.client_id, std::move(updates[slot].epoch_loss)});
    }
    result.global =
        federated_average(round_params, config.averaging, counts, round_ids);
  }
  return result;
}

CentralizedResult centralized_train(const WindowedDataset& pooled,
                                    const CentralizedConfig& config,
                                    const nn::ModelParameters& initial) {
  if (pooled.size() == 0) {
    throw std::invalid_argument("centralized_train: empty pool");
  }
  Forecaster model = forecaster_from_parameters(initial);
  FitConfig fit;
  fit.epochs = config.epochs;
  fit.batch_size = config.batch_size;
  fit.learning_rate = config.learning_rate;
  fit.seed = config.seed;
  CentralizedResult result;
  result.epoch_loss = fit_forecaster(model, pooled, fit);
  result.params = collect_parameters(model);
  return result;
}

}  // namespace evfl
