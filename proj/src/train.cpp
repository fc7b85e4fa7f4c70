#include "ppnn/train.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ppnn/adam.hpp"
#include "ppnn/parallel.hpp"
#include "ppnn/rng.hpp"

namespace ppnn {

std::vector<SnapshotPair> make_pairs(const Dataset& ds) {
  std::vector<SnapshotPair> pairs;
  for (const Trajectory& t : ds.trajectories) {
    if (t.snapshots.size() < 2) throw ConfigError("trajectory has fewer than 2 snapshots");
    for (std::size_t s = 0; s + 1 < t.snapshots.size(); ++s) {
      pairs.push_back({&t.snapshots[s], &t.snapshots[s + 1], &t.params});
    }
  }
  return pairs;
}

namespace {

// Per-pair tensors precomputed once: the fixed branch does not depend on the
// trainable weights, so its output is cached across epochs.
struct PairData {
  std::vector<float> state;
  std::vector<float> target_inc;
  std::vector<float> pde_inc;  // empty for the black-box model
  std::vector<double> scalars;
};

std::vector<float> to_float(const Field& f) {
  std::vector<float> v(f.data.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<float>(f.data[i]);
  return v;
}

std::vector<PairData> precompute(Model& model, const std::vector<SnapshotPair>& pairs) {
  const ModelConfig& cfg = model.config();
  std::vector<PairData> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const SnapshotPair& p = pairs[i];
    PairData& d = out[i];
    d.state = to_float(*p.u0);
    d.target_inc.resize(d.state.size());
    for (std::size_t k = 0; k < d.target_inc.size(); ++k) {
      d.target_inc[k] =
          static_cast<float>(p.u1->data[k]) - static_cast<float>(p.u0->data[k]);
    }
    d.scalars = p.params->values;
    if (cfg.has_pde()) {
      const PdeSpec spec = cfg.pde->with_parameter(d.scalars.at(0));
      PdeBranchResult br = pde_branch(*p.u0, spec, cfg.coarse, cfg.substeps, cfg.dt_learn);
      if (br.diverged) {
        throw DivergedError("fixed branch diverged while preparing training pair " +
                            std::to_string(i));
      }
      d.pde_inc = to_float(br.increment);
    }
  }
  return out;
}

// Builds the per-sample loss graph. Returns the loss node id.
ad::Graph<float>::Id sample_loss(ad::Graph<float>& g, const ModelConfig& cfg,
                                 NetWeights<float>& w, const PairData& d,
                                 const Grid2D& grid) {
  const ad::Shape fshape{cfg.channels, grid.ny, grid.nx};
  auto state = g.input(fshape, d.state);
  std::optional<ad::Graph<float>::Id> feature;
  if (cfg.feature_input()) feature = g.input(fshape, d.pde_inc);
  auto inc = trainable_forward_graph(g, cfg, w, state, d.scalars, feature);
  if (cfg.adds_increment()) {
    inc = g.add(inc, g.input(fshape, d.pde_inc));
  }
  auto target = g.input(fshape, d.target_inc);
  return g.mse_loss(inc, target);
}

double mean_eval_mse(Model& model, const std::vector<PairData>& data, int threads) {
  const ModelConfig& cfg = model.config();
  const Grid2D grid = cfg.fine;
  std::vector<double> losses(data.size(), 0.0);
  parallel_for(static_cast<int>(data.size()), threads, [&](int i) {
    ad::Graph<float> g(/*record=*/false);
    auto loss = sample_loss(g, cfg, model.weights(), data[i], grid);
    losses[i] = g.value(loss)[0];
  });
  double acc = 0.0;
  for (double l : losses) acc += l;
  return data.empty() ? 0.0 : acc / static_cast<double>(losses.size());
}

}  // namespace

double evaluate_onestep(Model& model, const Dataset& ds) {
  auto pairs = make_pairs(ds);
  auto data = precompute(model, pairs);
  return mean_eval_mse(model, data, 1);
}

TrainResult train(Model& model, const Dataset& ds, const TrainConfig& cfg) {
  if (cfg.epochs < 1 || cfg.batch_size < 1) {
    throw ConfigError("train: epochs and batch_size must be >= 1");
  }
  const ModelConfig& mc = model.config();
  if (ds.channels() != mc.channels || !(ds.grid() == mc.fine)) {
    throw ConfigError("train: dataset grid/channels do not match the model");
  }
  const std::uint64_t branch_before = pde_branch_hash(mc);

  auto pairs = make_pairs(ds);
  auto data = precompute(model, pairs);
  const int n = static_cast<int>(data.size());

  ad::AdamState<float> opt(model.weights().pointers(), ad::AdamHyper{cfg.lr});

  using GradList = std::vector<std::pair<ad::Parameter<float>*, std::vector<float>>>;

  TrainResult result;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) {
      std::iota(perm.begin(), perm.end(), 0);
      deterministic_shuffle(perm, mix64(cfg.seed, static_cast<std::uint64_t>(epoch)));
    }
    double epoch_loss = 0.0;
    for (int start = 0; start < n; start += cfg.batch_size) {
      const int bsz = std::min(cfg.batch_size, n - start);
      std::vector<GradList> grads(bsz);
      std::vector<double> losses(bsz);
      parallel_for(bsz, cfg.threads, [&](int k) {
        ad::Graph<float> g;
        auto loss = sample_loss(g, mc, model.weights(), data[perm[start + k]], mc.fine);
        losses[k] = g.value(loss)[0];
        g.backward(loss);
        grads[k] = g.take_param_grads();
      });
      // fixed-order reduction: sample k, then leaf creation order
      opt.zero_grad();
      const float scale = 1.0f / static_cast<float>(bsz);
      for (int k = 0; k < bsz; ++k) {
        for (auto& [param, gbuf] : grads[k]) {
          for (std::size_t i = 0; i < gbuf.size(); ++i) {
            param->grad[i] += scale * gbuf[i];
          }
        }
        epoch_loss += losses[k];
      }
      double batch_loss = 0.0;
      for (double l : losses) batch_loss += l;
      if (!std::isfinite(batch_loss)) {
        throw DivergedError("training loss became non-finite at epoch " +
                            std::to_string(epoch) + ", batch offset " +
                            std::to_string(start));
      }
      opt.step();
    }

    EpochStats st;
    st.epoch = epoch;
    st.train_mse = epoch_loss / static_cast<double>(n);
    st.eval_mse = std::numeric_limits<double>::quiet_NaN();
    if (cfg.eval_every > 0 && ((epoch + 1) % cfg.eval_every == 0 || epoch + 1 == cfg.epochs)) {
      st.eval_mse = mean_eval_mse(model, data, cfg.threads);
    }
    result.history.push_back(st);
  }

  if (pde_branch_hash(mc) != branch_before) {
    throw Error("internal invariant violated: fixed branch changed during training");
  }
  return result;
}

}  // namespace ppnn
