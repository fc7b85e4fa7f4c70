#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ppnn/datagen.hpp"
#include "ppnn/field.hpp"

namespace ppnn {

using Stepper = std::function<Field(const Field&, const ParamVector&)>;

// states[0] is the initial condition; diverged_at is the 1-based step index
// at which the stepper produced non-finite output (-1 if it never did). The
// diverged state itself is not stored.
struct RolloutTrajectory {
  std::vector<Field> states;
  int diverged_at = -1;
};

RolloutTrajectory rollout(const Stepper& step, const Field& u0,
                          const ParamVector& params, int n_steps);

struct StepStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  int n_alive = 0;
};

// Mean/min/max over trajectories of |pred_t - ref_t| / |ref_t| for steps
// t = 1..n. Trajectories are dropped from the statistics from their
// divergence step onward. Throws on a zero-norm reference.
std::vector<StepStats> epsilon_t(const std::vector<RolloutTrajectory>& preds,
                                 const std::vector<Trajectory>& refs, int n_steps);

struct ModelEntry {
  std::string label;
  Stepper step;
};

struct RolloutReport {
  std::string label;
  std::vector<StepStats> stats;    // stats[i] is step i+1
  std::vector<int> diverged_at;    // per test trajectory, -1 if none
  int horizon = 0;                 // training-horizon marker (steps)
  double dt = 0.0;
};

// Rolls each model from every test trajectory's initial state and scores it
// against the stored reference snapshots.
std::vector<RolloutReport> compare(const std::vector<ModelEntry>& models,
                                   const Dataset& test_set, int n_steps, int horizon);

// step,time,model,eps_mean,eps_min,eps_max,n_alive
std::string report_csv(const std::vector<RolloutReport>& reports);

}  // namespace ppnn
