#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ppnn/autodiff.hpp"
#include "ppnn/datagen.hpp"
#include "ppnn/field.hpp"
#include "ppnn/physics.hpp"

namespace ppnn {

// How the physics increment couples into the step:
//   add_and_input: added to the residual AND fed as extra input channels
//   input_only:    extra input channels only
//   add_only:      added to the residual only
enum class PdeFusion { add_and_input, input_only, add_only };

PdeFusion parse_fusion(const std::string& s);
std::string fusion_name(PdeFusion f);

struct ModelConfig {
  Grid2D fine;
  Grid2D coarse;
  int channels = 2;
  int hidden_channels = 48;
  int n_resblocks = 3;
  int res_kernel = 5;
  int encoder_kernel = 6;
  int encoder_stride = 2;
  int encoder_layers = 2;
  int encoder_pad = 2;
  int shuffle_factor = 4;
  std::optional<PdeSpec> pde;  // nullopt: black-box baseline
  PdeFusion fusion = PdeFusion::add_and_input;
  int substeps = 1;
  double dt_learn = 0.0;
  int n_scalar_params = 1;

  bool has_pde() const { return pde.has_value(); }
  bool feature_input() const {
    return has_pde() && fusion != PdeFusion::add_only;
  }
  bool adds_increment() const {
    return has_pde() && fusion != PdeFusion::input_only;
  }
  int encoder_input_channels() const {
    return channels + n_scalar_params + (feature_input() ? channels : 0);
  }
  int shuffled_channels() const {
    return hidden_channels / (shuffle_factor * shuffle_factor);
  }
  void validate() const;
  std::uint64_t fingerprint() const;
};

// The trainable tensors, in a fixed creation order (also the checkpoint and
// gradient-reduction order).
template <typename T>
struct NetWeights {
  std::vector<std::unique_ptr<ad::Parameter<T>>> params;

  ad::Parameter<T>& get(const std::string& name) {
    for (auto& p : params) {
      if (p->name == name) return *p;
    }
    throw ConfigError("no such weight tensor: " + name);
  }
  std::vector<ad::Parameter<T>*> pointers() {
    std::vector<ad::Parameter<T>*> out;
    out.reserve(params.size());
    for (auto& p : params) out.push_back(p.get());
    return out;
  }
  std::size_t total_size() const {
    std::size_t n = 0;
    for (const auto& p : params) n += p->size();
    return n;
  }
};

template <typename T>
NetWeights<T> build_weights(const ModelConfig& cfg);

// Fan-in-scaled uniform for conv kernels, zero biases, unit/zero layer-norm
// affine, N(0, 1e-2) rank-1 parameter vectors; deterministic per seed.
template <typename T>
void init_weights(NetWeights<T>& w, const ModelConfig& cfg, std::uint64_t seed);

// Encoder -> residual blocks -> pixel shuffle -> output conv. Returns the
// node holding the predicted state increment at fine resolution.
template <typename T>
typename ad::Graph<T>::Id trainable_forward_graph(
    ad::Graph<T>& g, const ModelConfig& cfg, NetWeights<T>& w,
    typename ad::Graph<T>::Id state, const std::vector<double>& scalar_params,
    std::optional<typename ad::Graph<T>::Id> pde_feature);

struct PdeBranchResult {
  Field increment;  // upsampled coarse-step increment at fine resolution
  Field feature;    // the extra input exposed to the trainable net
  bool diverged = false;
};

// Fixed-weight branch: downsample, advance the coarse state by dt_learn in
// `substeps` Euler steps, upsample the increment back to the fine grid.
PdeBranchResult pde_branch(const Field& u, const PdeSpec& spec, const Grid2D& coarse,
                           int substeps, double dt_learn);

class Model {
 public:
  explicit Model(ModelConfig cfg);

  void init(std::uint64_t seed);
  void zero_weights();

  // One next-step application: u + [pde increment] + trainable increment.
  Field step(const Field& u, const ParamVector& params);

  // The trainable increment alone (inference path, no gradients).
  Field trainable_increment(const Field& u, const ParamVector& params,
                            const Field* pde_feature);

  const ModelConfig& config() const { return cfg_; }
  NetWeights<float>& weights() { return weights_; }
  const NetWeights<float>& weights() const { return weights_; }
  std::uint64_t weights_hash() const;

 private:
  ModelConfig cfg_;
  NetWeights<float> weights_;
};

// Hash over everything the fixed branch computes from: stencil tables, coarse
// grid, substeps, dt and the preserved equation's constants. Training asserts
// this value never changes.
std::uint64_t pde_branch_hash(const ModelConfig& cfg);

// Coarse-solver-only stepper (the fixed branch applied alone).
Field coarse_solver_step(const ModelConfig& cfg, const Field& u,
                         const ParamVector& params);

}  // namespace ppnn
