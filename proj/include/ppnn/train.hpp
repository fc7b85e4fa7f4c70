#pragma once

#include <cstdint>
#include <vector>

#include "ppnn/datagen.hpp"
#include "ppnn/model.hpp"

namespace ppnn {

struct TrainConfig {
  int epochs = 200;
  int batch_size = 16;
  double lr = 3e-4;
  std::uint64_t seed = 0;
  bool shuffle = true;
  int eval_every = 1;  // 0 disables per-epoch evaluation
  int threads = 1;
};

struct SnapshotPair {
  const Field* u0 = nullptr;
  const Field* u1 = nullptr;
  const ParamVector* params = nullptr;
};

// All consecutive snapshot pairs, tagged with their trajectory's parameters.
std::vector<SnapshotPair> make_pairs(const Dataset& ds);

struct EpochStats {
  int epoch = 0;
  double train_mse = 0.0;
  double eval_mse = 0.0;  // NaN when not evaluated this epoch
};

struct TrainResult {
  std::vector<EpochStats> history;
};

// Next-step supervision: MSE between the model's predicted increment and
// u_{t+1} - u_t, minimized with Adam over shuffled mini-batches. Deterministic
// for a fixed seed; the thread count does not change results because sample
// gradients are reduced in sample order.
TrainResult train(Model& model, const Dataset& ds, const TrainConfig& cfg);

// Mean one-step increment MSE over all pairs, no weight updates.
double evaluate_onestep(Model& model, const Dataset& ds);

}  // namespace ppnn
