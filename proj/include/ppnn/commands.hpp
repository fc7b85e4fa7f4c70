#pragma once

#include <string>
#include <vector>

#include "ppnn/runconfig.hpp"
#include "ppnn/train.hpp"

namespace ppnn {

// Pipeline commands behind the CLI. Each is a pure function of its config and
// input files, writes the resolved config next to its outputs, and returns 0
// on success (failures are reported by exception).

// Generates a train or test dataset (per cfg.dataset_kind) at `out_path`
// (empty: <cfg.out>/dataset.ppds).
int cmd_gen_data(const RunConfig& cfg, const std::string& out_path);

// Trains one model ("ppnn" | "blackbox") on the dataset; writes the
// checkpoint (empty out_path: <cfg.out>/<kind>.ppck) and a loss CSV next to
// it. A nonempty `resume` path seeds the weights from that checkpoint and
// appends to an existing loss history.
int cmd_train(const RunConfig& cfg, const std::string& dataset_path,
              const std::string& model_kind, const std::string& out_path,
              const std::string& resume);

// Rolls every checkpoint out on the test dataset; writes report.csv and
// report.svg under the output directory (empty: cfg.out).
int cmd_compare(const RunConfig& cfg, const std::vector<std::string>& checkpoints,
                const std::string& dataset_path, const std::string& out_dir);

// Coarse-solver-only rollout report (the fixed branch applied alone).
int cmd_coarse(const RunConfig& cfg, const std::string& dataset_path,
               const std::string& out_dir);

// Helpers shared with the tests.
std::vector<double> training_param_values(const RunConfig& cfg);
std::string loss_history_csv(const std::vector<EpochStats>& history, int epoch_offset);

}  // namespace ppnn
