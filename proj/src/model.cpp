#include "ppnn/model.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>

#include "ppnn/io_util.hpp"
#include "ppnn/rng.hpp"
#include "ppnn/stencil.hpp"

namespace ppnn {

PdeFusion parse_fusion(const std::string& s) {
  if (s == "add+input") return PdeFusion::add_and_input;
  if (s == "input-only") return PdeFusion::input_only;
  if (s == "add-only") return PdeFusion::add_only;
  throw ConfigError("unknown pde_fusion '" + s + "' (add+input | input-only | add-only)");
}

std::string fusion_name(PdeFusion f) {
  switch (f) {
    case PdeFusion::add_and_input: return "add+input";
    case PdeFusion::input_only: return "input-only";
    case PdeFusion::add_only: return "add-only";
  }
  return "?";
}

void ModelConfig::validate() const {
  if (channels < 1) throw ConfigError("model needs at least one state channel");
  if (hidden_channels < 1 || n_resblocks < 1) {
    throw ConfigError("hidden_channels and n_resblocks must be >= 1");
  }
  if (res_kernel % 2 != 1) throw ConfigError("res_kernel must be odd");
  if (encoder_layers != 2) throw ConfigError("the encoder has exactly two conv layers");
  int sf = 1;
  for (int i = 0; i < encoder_layers; ++i) sf *= encoder_stride;
  if (sf != shuffle_factor) {
    throw ConfigError("shuffle_factor must equal the product of encoder strides");
  }
  if (encoder_kernel != 2 * encoder_pad + encoder_stride) {
    throw ConfigError("encoder needs kernel == 2*pad + stride so each layer divides "
                      "the resolution exactly");
  }
  if (hidden_channels % (shuffle_factor * shuffle_factor) != 0) {
    throw ConfigError("hidden_channels must be divisible by shuffle_factor^2");
  }
  if (fine.nx % shuffle_factor != 0 || fine.ny % shuffle_factor != 0) {
    throw ConfigError("fine grid must be divisible by shuffle_factor");
  }
  if (n_scalar_params < 0) throw ConfigError("n_scalar_params must be >= 0");
  if (has_pde()) {
    if (!fine.same_domain(coarse)) {
      throw ConfigError("coarse grid must cover the same physical domain");
    }
    if (coarse.nx > fine.nx || coarse.ny > fine.ny) {
      throw ConfigError("coarse grid must not exceed the fine grid");
    }
    if (substeps < 1) throw ConfigError("substeps must be >= 1");
    if (!(dt_learn > 0.0)) throw ConfigError("dt_learn must be positive");
  }
}

std::uint64_t ModelConfig::fingerprint() const {
  char buf[64];
  std::ostringstream ss;
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    ss << buf << '|';
  };
  ss << "v1|ch=" << channels << "|hid=" << hidden_channels << "|res=" << n_resblocks
     << "|rk=" << res_kernel << "|ek=" << encoder_kernel << "|es=" << encoder_stride
     << "|el=" << encoder_layers << "|ep=" << encoder_pad << "|sf=" << shuffle_factor
     << "|np=" << n_scalar_params << "|fine=" << fine.nx << "x" << fine.ny << "|";
  put(fine.lx);
  put(fine.ly);
  if (has_pde()) {
    ss << "coarse=" << coarse.nx << "x" << coarse.ny << "|sys=" << pde->system_name()
       << "|lap=" << pde->laplacian_order << "|";
    if (const auto* rd = std::get_if<RdFull>(&pde->variant)) {
      put(rd->alpha);
      put(rd->beta);
    }
    ss << "fusion=" << fusion_name(fusion) << "|K=" << substeps << "|dt=";
    put(dt_learn);
  } else {
    ss << "pde=none|dt=";
    put(dt_learn);
  }
  return fnv1a64(ss.str());
}

template <typename T>
NetWeights<T> build_weights(const ModelConfig& cfg) {
  cfg.validate();
  NetWeights<T> w;
  auto add = [&](const std::string& name, ad::Shape shape) {
    w.params.push_back(std::make_unique<ad::Parameter<T>>(name, std::move(shape)));
  };
  for (int i = 0; i < cfg.n_scalar_params; ++i) {
    add("param" + std::to_string(i) + ".col", {cfg.fine.ny, 1});
    add("param" + std::to_string(i) + ".row", {1, cfg.fine.nx});
  }
  const int k = cfg.encoder_kernel;
  add("enc0.w", {cfg.hidden_channels, cfg.encoder_input_channels(), k, k});
  add("enc0.b", {cfg.hidden_channels});
  add("enc1.w", {cfg.hidden_channels, cfg.hidden_channels, k, k});
  add("enc1.b", {cfg.hidden_channels});
  const int hr = cfg.fine.ny / cfg.shuffle_factor;
  const int wr = cfg.fine.nx / cfg.shuffle_factor;
  for (int r = 0; r < cfg.n_resblocks; ++r) {
    const std::string p = "res" + std::to_string(r);
    add(p + ".conv.w", {cfg.hidden_channels, cfg.hidden_channels, cfg.res_kernel,
                        cfg.res_kernel});
    add(p + ".conv.b", {cfg.hidden_channels});
    add(p + ".ln.gain", {cfg.hidden_channels, hr, wr});
    add(p + ".ln.bias", {cfg.hidden_channels, hr, wr});
  }
  add("dec.w", {cfg.channels, cfg.shuffled_channels(), cfg.res_kernel, cfg.res_kernel});
  add("dec.b", {cfg.channels});
  return w;
}

template <typename T>
void init_weights(NetWeights<T>& w, const ModelConfig& cfg, std::uint64_t seed) {
  (void)cfg;
  std::uint64_t index = 0;
  for (auto& p : w.params) {
    GaussianGen gen(mix64(seed, index++));
    const std::string& n = p->name;
    const bool is_conv_w = n.size() > 2 && n.substr(n.size() - 2) == ".w";
    const bool is_gain = n.find(".ln.gain") != std::string::npos;
    const bool is_bias = n.find(".b") != std::string::npos || n.find(".ln.bias") != std::string::npos;
    if (is_conv_w) {
      // fan-in scaled uniform on [-1/sqrt(fan_in), 1/sqrt(fan_in)]
      const std::size_t fan_in =
          static_cast<std::size_t>(p->shape[1]) * p->shape[2] * p->shape[3];
      const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
      for (T& v : p->value) {
        v = static_cast<T>((2.0 * gen.uniform01() - 1.0) * bound);
      }
    } else if (is_gain) {
      std::fill(p->value.begin(), p->value.end(), T(1));
    } else if (is_bias) {
      std::fill(p->value.begin(), p->value.end(), T(0));
    } else {
      // rank-1 parameter vectors
      for (T& v : p->value) v = static_cast<T>(1e-2 * gen.next());
    }
  }
}

template <typename T>
typename ad::Graph<T>::Id trainable_forward_graph(
    ad::Graph<T>& g, const ModelConfig& cfg, NetWeights<T>& w,
    typename ad::Graph<T>::Id state, const std::vector<double>& scalar_params,
    std::optional<typename ad::Graph<T>::Id> pde_feature) {
  using Id = typename ad::Graph<T>::Id;
  if (static_cast<int>(scalar_params.size()) != cfg.n_scalar_params) {
    throw ConfigError("trainable_forward_graph: scalar parameter count mismatch");
  }
  if (cfg.feature_input() != pde_feature.has_value()) {
    throw ConfigError("trainable_forward_graph: feature channels do not match config");
  }

  std::vector<Id> inputs{state};
  for (int i = 0; i < cfg.n_scalar_params; ++i) {
    const std::string p = "param" + std::to_string(i);
    Id col = g.param(w.get(p + ".col"));
    Id row = g.param(w.get(p + ".row"));
    inputs.push_back(g.rank1_param_map(static_cast<T>(scalar_params[i]), col, row));
  }
  if (pde_feature) inputs.push_back(*pde_feature);

  Id z = g.concat_channels(inputs);
  z = g.conv2d(z, g.param(w.get("enc0.w")), g.param(w.get("enc0.b")),
               cfg.encoder_stride, ad::Padding::zero(cfg.encoder_pad));
  z = g.conv2d(z, g.param(w.get("enc1.w")), g.param(w.get("enc1.b")),
               cfg.encoder_stride, ad::Padding::zero(cfg.encoder_pad));
  const int res_pad = (cfg.res_kernel - 1) / 2;
  for (int r = 0; r < cfg.n_resblocks; ++r) {
    const std::string p = "res" + std::to_string(r);
    Id h = g.conv2d(z, g.param(w.get(p + ".conv.w")), g.param(w.get(p + ".conv.b")), 1,
                    ad::Padding::zero(res_pad));
    h = g.relu(h);
    h = g.layer_norm(h, g.param(w.get(p + ".ln.gain")), g.param(w.get(p + ".ln.bias")),
                     static_cast<T>(1e-5));
    z = g.add(z, h);
  }
  z = g.pixel_shuffle(z, cfg.shuffle_factor);
  z = g.conv2d(z, g.param(w.get("dec.w")), g.param(w.get("dec.b")), 1,
               ad::Padding::zero(res_pad));
  return z;
}

template NetWeights<float> build_weights<float>(const ModelConfig&);
template NetWeights<double> build_weights<double>(const ModelConfig&);
template void init_weights<float>(NetWeights<float>&, const ModelConfig&, std::uint64_t);
template void init_weights<double>(NetWeights<double>&, const ModelConfig&, std::uint64_t);
template ad::Graph<float>::Id trainable_forward_graph<float>(
    ad::Graph<float>&, const ModelConfig&, NetWeights<float>&, ad::Graph<float>::Id,
    const std::vector<double>&, std::optional<ad::Graph<float>::Id>);
template ad::Graph<double>::Id trainable_forward_graph<double>(
    ad::Graph<double>&, const ModelConfig&, NetWeights<double>&, ad::Graph<double>::Id,
    const std::vector<double>&, std::optional<ad::Graph<double>::Id>);

PdeBranchResult pde_branch(const Field& u, const PdeSpec& spec, const Grid2D& coarse,
                           int substeps, double dt_learn) {
  PdeBranchResult out;
  Field uc = downsample_bilinear(u, coarse);
  Field advanced = integrate(spec, uc, dt_learn, substeps);
  if (advanced.diverged) {
    out.diverged = true;
    out.increment = Field(u.grid, u.channels);
    out.increment.diverged = true;
    out.feature = out.increment;
    return out;
  }
  Field inc_coarse = subtract(advanced, uc);
  out.increment = upsample_bicubic(inc_coarse, u.grid);
  out.feature = out.increment;
  return out;
}

namespace {

std::vector<float> field_to_float(const Field& f) {
  std::vector<float> v(f.data.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<float>(f.data[i]);
  return v;
}

}  // namespace

Model::Model(ModelConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  weights_ = build_weights<float>(cfg_);
}

void Model::init(std::uint64_t seed) { init_weights(weights_, cfg_, seed); }

void Model::zero_weights() {
  for (auto& p : weights_.params) {
    std::fill(p->value.begin(), p->value.end(), 0.0f);
  }
}

Field Model::trainable_increment(const Field& u, const ParamVector& params,
                                 const Field* pde_feature) {
  if (static_cast<int>(params.values.size()) != cfg_.n_scalar_params) {
    throw ConfigError("model expects " + std::to_string(cfg_.n_scalar_params) +
                      " scalar parameters");
  }
  ad::Graph<float> g(/*record=*/false);
  auto state = g.input({cfg_.channels, u.grid.ny, u.grid.nx}, field_to_float(u));
  std::optional<ad::Graph<float>::Id> feat;
  if (pde_feature) {
    feat = g.input({cfg_.channels, u.grid.ny, u.grid.nx}, field_to_float(*pde_feature));
  }
  auto out = trainable_forward_graph(g, cfg_, weights_, state, params.values, feat);
  Field inc(u.grid, cfg_.channels);
  const std::vector<float>& v = g.value(out);
  for (std::size_t i = 0; i < v.size(); ++i) inc.data[i] = v[i];
  return inc;
}

Field Model::step(const Field& u, const ParamVector& params) {
  if (u.diverged) return u;
  if (u.channels != cfg_.channels || !(u.grid == cfg_.fine)) {
    throw ConfigError("model/state grid or channel mismatch");
  }
  Field out = u;
  const Field* feature = nullptr;
  PdeBranchResult br;
  if (cfg_.has_pde()) {
    const PdeSpec spec = cfg_.pde->with_parameter(params.values.at(0));
    br = pde_branch(u, spec, cfg_.coarse, cfg_.substeps, cfg_.dt_learn);
    if (br.diverged) {
      out.diverged = true;
      return out;
    }
    if (cfg_.adds_increment()) out = add_scaled(out, 1.0, br.increment);
    if (cfg_.feature_input()) feature = &br.feature;
  }
  Field inc_nn = trainable_increment(u, params, feature);
  out = add_scaled(out, 1.0, inc_nn);
  if (!all_finite(out)) out.diverged = true;
  return out;
}

std::uint64_t Model::weights_hash() const {
  std::uint64_t h = fnv1a64("weights");
  for (const auto& p : weights_.params) {
    h = fnv1a64(p->name, h);
    h = fnv1a64(p->value.data(), p->value.size() * sizeof(float), h);
  }
  return h;
}

std::uint64_t pde_branch_hash(const ModelConfig& cfg) {
  if (!cfg.has_pde()) return 0;
  std::ostringstream ss;
  const Stencil d2 = second_derivative_stencil(cfg.pde->laplacian_order, Axis::x);
  for (double t : d2.taps) ss << t << ',';
  for (int sgn : {+1, -1}) {
    const Stencil up = first_derivative_upwind3(Axis::x, sgn);
    for (double t : up.taps) ss << t << ',';
  }
  ss << cfg.coarse.nx << 'x' << cfg.coarse.ny << '|' << cfg.substeps << '|'
     << cfg.dt_learn << '|' << cfg.pde->system_name() << '|'
     << cfg.pde->laplacian_order;
  if (const auto* rd = std::get_if<RdFull>(&cfg.pde->variant)) {
    ss << '|' << rd->alpha << '|' << rd->beta;
  }
  return fnv1a64(ss.str());
}

Field coarse_solver_step(const ModelConfig& cfg, const Field& u,
                         const ParamVector& params) {
  if (!cfg.has_pde()) throw ConfigError("coarse solver needs a preserved equation");
  if (u.diverged) return u;
  const PdeSpec spec = cfg.pde->with_parameter(params.values.at(0));
  PdeBranchResult br = pde_branch(u, spec, cfg.coarse, cfg.substeps, cfg.dt_learn);
  Field out = u;
  if (br.diverged) {
    out.diverged = true;
    return out;
  }
  out = add_scaled(out, 1.0, br.increment);
  if (!all_finite(out)) out.diverged = true;
  return out;
}

}  // namespace ppnn
