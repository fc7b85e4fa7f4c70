#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ppnn/field.hpp"
#include "ppnn/physics.hpp"

namespace ppnn {

// Ordered named scalars; component order is part of model identity.
struct ParamVector {
  std::vector<std::string> names;
  std::vector<double> values;

  bool operator==(const ParamVector&) const = default;
};

// Snapshots at learning-step spacing dt_learn, plus the generating parameters.
struct Trajectory {
  ParamVector params;
  std::vector<Field> snapshots;
  double dt_learn = 0.0;
};

struct Dataset {
  std::vector<Trajectory> trajectories;
  // metadata (kept in the plain-text sidecar on disk)
  std::string system;
  std::string scheme;
  std::uint64_t seed = 0;
  std::string kind = "train";  // train | test | test-extrapolate

  Grid2D grid() const;
  int channels() const;
  double dt_learn() const;
  int n_snapshots() const;
};

// 2-channel i.i.d. standard-normal field, then linearly rescaled to [0.1, 1.1].
Field rd_random_ic(const Grid2D& grid, std::uint64_t seed);

// Random low-mode Fourier field for both velocity components: sums over mode
// indices i,j in [-max_mode, max_mode] of normal-weighted sin/cos of
// (2 pi i / lx) x + (2 pi j / ly) y, rescaled to [0.1, 1.1] like the
// reaction-diffusion case.
Field burgers_fourier_ic(const Grid2D& grid, std::uint64_t seed, int max_mode = 4);

// Advances `burn_in` numerical steps, records the state, then records a
// snapshot after every further `steps_per_snapshot` Euler steps until
// n_snapshots are collected. dt_learn = steps_per_snapshot * dt_num.
// Throws DivergedError (with the failing numerical step index) on blow-up.
Trajectory generate_trajectory(const PdeSpec& spec, const Field& ic, double dt_num,
                               int steps_per_snapshot, int n_snapshots, int burn_in);

struct DatasetRecipe {
  PdeSpec spec;                      // per-trajectory parameter overrides below
  Grid2D grid;
  double dt_num = 1e-5;
  int steps_per_snapshot = 200;
  int n_snapshots = 50;
  int burn_in = 0;
  std::uint64_t seed = 0;
  std::vector<double> param_values;  // one group of trajectories per value
  int ics_per_param = 1;
  std::string kind = "train";
  int threads = 1;                   // trajectories are independent
};

// Deterministic given the recipe; trajectory t uses IC seed
// mix64(recipe.seed, t), so generation order is irrelevant.
Dataset generate_dataset(const DatasetRecipe& recipe);

// Uniform draws in [lo, hi] rejecting values within 1% of the range of any
// excluded (training) value; with extrapolate, draws in (hi, hi + 0.25 range].
std::vector<double> sample_test_params(double lo, double hi,
                                       const std::vector<double>& excluded, int n,
                                       std::uint64_t seed, bool extrapolate = false);

// Binary container (magic "PPDS") plus a plain-text ".meta" sidecar.
void write_dataset(const Dataset& ds, const std::string& path);
Dataset read_dataset(const std::string& path);

}  // namespace ppnn
