#include "ppnn/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace ppnn {

RolloutTrajectory rollout(const Stepper& step, const Field& u0,
                          const ParamVector& params, int n_steps) {
  if (n_steps < 1) throw ConfigError("rollout needs n_steps >= 1");
  RolloutTrajectory out;
  out.states.reserve(static_cast<std::size_t>(n_steps) + 1);
  out.states.push_back(u0);
  for (int t = 1; t <= n_steps; ++t) {
    Field next = step(out.states.back(), params);
    if (next.diverged || !all_finite(next)) {
      out.diverged_at = t;
      break;
    }
    out.states.push_back(std::move(next));
  }
  return out;
}

std::vector<StepStats> epsilon_t(const std::vector<RolloutTrajectory>& preds,
                                 const std::vector<Trajectory>& refs, int n_steps) {
  if (preds.size() != refs.size()) {
    throw ConfigError("epsilon_t: prediction/reference counts differ");
  }
  if (preds.empty()) throw ConfigError("epsilon_t: no trajectories");
  for (const Trajectory& r : refs) {
    if (static_cast<int>(r.snapshots.size()) < n_steps + 1) {
      throw ConfigError("epsilon_t: reference shorter than the requested horizon");
    }
  }
  std::vector<StepStats> out(n_steps);
  for (int t = 1; t <= n_steps; ++t) {
    StepStats st;
    st.min = std::numeric_limits<double>::infinity();
    st.max = -std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const RolloutTrajectory& p = preds[i];
      if (p.diverged_at >= 0 && t >= p.diverged_at) continue;  // dropped from here on
      const Field& ref = refs[i].snapshots[t];
      const double rn = l2_norm(ref);
      if (rn == 0.0) throw ConfigError("epsilon_t: zero-norm reference at step " +
                                       std::to_string(t));
      const double err = l2_norm(subtract(p.states[t], ref)) / rn;
      acc += err;
      st.min = std::min(st.min, err);
      st.max = std::max(st.max, err);
      ++st.n_alive;
    }
    if (st.n_alive > 0) {
      st.mean = acc / st.n_alive;
    } else {
      st.mean = st.min = st.max = std::numeric_limits<double>::quiet_NaN();
    }
    out[t - 1] = st;
  }
  return out;
}

std::vector<RolloutReport> compare(const std::vector<ModelEntry>& models,
                                   const Dataset& test_set, int n_steps, int horizon) {
  if (test_set.trajectories.empty()) throw ConfigError("compare: empty test set");
  if (test_set.n_snapshots() < n_steps + 1) {
    throw ConfigError("compare: test set has " + std::to_string(test_set.n_snapshots()) +
                      " snapshots; need " + std::to_string(n_steps + 1));
  }
  std::vector<RolloutReport> reports;
  for (const ModelEntry& m : models) {
    std::vector<RolloutTrajectory> preds;
    preds.reserve(test_set.trajectories.size());
    for (const Trajectory& traj : test_set.trajectories) {
      preds.push_back(rollout(m.step, traj.snapshots.front(), traj.params, n_steps));
    }
    RolloutReport rep;
    rep.label = m.label;
    rep.stats = epsilon_t(preds, test_set.trajectories, n_steps);
    for (const RolloutTrajectory& p : preds) rep.diverged_at.push_back(p.diverged_at);
    rep.horizon = horizon;
    rep.dt = test_set.dt_learn();
    reports.push_back(std::move(rep));
  }
  return reports;
}

std::string report_csv(const std::vector<RolloutReport>& reports) {
  std::ostringstream os;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  os << "step,time,model,eps_mean,eps_min,eps_max,n_alive\n";
  for (const RolloutReport& r : reports) {
    for (std::size_t i = 0; i < r.stats.size(); ++i) {
      const StepStats& st = r.stats[i];
      os << (i + 1) << ',';
      num((static_cast<double>(i) + 1.0) * r.dt);
      os << ',' << r.label << ',';
      num(st.mean);
      os << ',';
      num(st.min);
      os << ',';
      num(st.max);
      os << ',' << st.n_alive << '\n';
    }
  }
  return os.str();
}

}  // namespace ppnn
