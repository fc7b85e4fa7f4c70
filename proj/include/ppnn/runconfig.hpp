#pragma once

#include <cstdint>
#include <string>

#include "ppnn/model.hpp"
#include "ppnn/physics.hpp"

namespace ppnn {

// Flat key=value run configuration. Unknown keys are rejected; every command
// writes the resolved configuration next to its outputs. Defaults for the
// domain, numerical step and parameter range switch with `system`, so a
// config may set only `system = burgers` and inherit that case's numbers.
struct RunConfig {
  std::string system = "rd";  // rd | rd-diffusion | burgers

  // grids / domain
  int fine_nx = 64, fine_ny = 64;
  int coarse_nx = 16, coarse_ny = 16;
  double lx = 6.4, ly = 6.4;

  // physics
  double alpha = 0.01, beta = 0.25;
  int laplacian_order = 6;

  // reference solver / dataset
  double dt_num = 1e-5;
  int steps_per_snapshot = 200;
  int n_snapshots = 50;
  int burn_in = 2000;
  int n_train_params = 4;
  int ics_per_param = 4;
  double param_min = 0.6, param_max = 1.3;
  std::string dataset_kind = "train";  // train | test
  int n_test = 8;
  int test_snapshots = 101;
  bool test_extrapolate = false;
  std::uint64_t seed = 1234;

  // model
  int hidden_channels = 48;
  int n_resblocks = 3;
  int res_kernel = 5;
  int encoder_kernel = 6;
  int encoder_stride = 2;
  int encoder_pad = 2;
  int shuffle_factor = 4;
  std::string pde_fusion = "add+input";
  int substeps = 1;

  // training
  int epochs = 200;
  int batch_size = 16;
  double lr = 3e-4;
  bool shuffle = true;
  int eval_every = 1;
  int threads = 1;

  // rollout / outputs
  int rollout_steps = 100;
  std::string out = "out";

  Grid2D fine_grid() const { return make_grid(fine_nx, fine_ny, lx, ly); }
  Grid2D coarse_grid() const { return make_grid(coarse_nx, coarse_ny, lx, ly); }
  PdeSpec pde_spec() const;  // parameter slot filled with param_min
  ModelConfig model_config(const std::string& kind, double dt_learn) const;
  void validate() const;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);
std::string render_run_config(const RunConfig& cfg);

}  // namespace ppnn
