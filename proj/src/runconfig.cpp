#include "ppnn/runconfig.hpp"

#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "ppnn/io_util.hpp"

namespace ppnn {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

void apply_system_defaults(RunConfig& cfg) {
  if (cfg.system == "burgers") {
    cfg.lx = cfg.ly = 3.2;
    cfg.dt_num = 1e-4;
    cfg.burn_in = 0;
    cfg.param_min = 0.02;
    cfg.param_max = 0.07;
  } else if (cfg.system == "rd" || cfg.system == "rd-diffusion") {
    cfg.lx = cfg.ly = 6.4;
    cfg.dt_num = 1e-5;
    cfg.burn_in = 2000;
    cfg.param_min = 0.6;
    cfg.param_max = 1.3;
  } else {
    throw ConfigError("unknown system '" + cfg.system +
                      "' (rd | rd-diffusion | burgers)");
  }
}

long long to_int(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    long long r = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an integer: '" + v + "'");
  }
}

double to_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    double r = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: '" + v + "'");
  }
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "': not a boolean: '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"system", [](RunConfig& c, const std::string& k, const std::string& v) {
         (void)k; c.system = v; }},
      {"fine_nx", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.fine_nx = static_cast<int>(to_int(v, k)); }},
      {"fine_ny", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.fine_ny = static_cast<int>(to_int(v, k)); }},
      {"coarse_nx", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.coarse_nx = static_cast<int>(to_int(v, k)); }},
      {"coarse_ny", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.coarse_ny = static_cast<int>(to_int(v, k)); }},
      {"lx", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.lx = to_double(v, k); }},
      {"ly", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.ly = to_double(v, k); }},
      {"alpha", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.alpha = to_double(v, k); }},
      {"beta", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.beta = to_double(v, k); }},
      {"laplacian_order", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.laplacian_order = static_cast<int>(to_int(v, k)); }},
      {"dt_num", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.dt_num = to_double(v, k); }},
      {"steps_per_snapshot", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.steps_per_snapshot = static_cast<int>(to_int(v, k)); }},
      {"n_snapshots", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.n_snapshots = static_cast<int>(to_int(v, k)); }},
      {"burn_in", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.burn_in = static_cast<int>(to_int(v, k)); }},
      {"n_train_params", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.n_train_params = static_cast<int>(to_int(v, k)); }},
      {"ics_per_param", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.ics_per_param = static_cast<int>(to_int(v, k)); }},
      {"param_min", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.param_min = to_double(v, k); }},
      {"param_max", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.param_max = to_double(v, k); }},
      {"dataset_kind", [](RunConfig& c, const std::string& k, const std::string& v) {
         (void)k; c.dataset_kind = v; }},
      {"n_test", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.n_test = static_cast<int>(to_int(v, k)); }},
      {"test_snapshots", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.test_snapshots = static_cast<int>(to_int(v, k)); }},
      {"test_extrapolate", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.test_extrapolate = to_bool(v, k); }},
      {"seed", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.seed = static_cast<std::uint64_t>(to_int(v, k)); }},
      {"hidden_channels", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.hidden_channels = static_cast<int>(to_int(v, k)); }},
      {"n_resblocks", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.n_resblocks = static_cast<int>(to_int(v, k)); }},
      {"res_kernel", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.res_kernel = static_cast<int>(to_int(v, k)); }},
      {"encoder_kernel", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.encoder_kernel = static_cast<int>(to_int(v, k)); }},
      {"encoder_stride", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.encoder_stride = static_cast<int>(to_int(v, k)); }},
      {"encoder_pad", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.encoder_pad = static_cast<int>(to_int(v, k)); }},
      {"shuffle_factor", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.shuffle_factor = static_cast<int>(to_int(v, k)); }},
      {"pde_fusion", [](RunConfig& c, const std::string& k, const std::string& v) {
         (void)k; c.pde_fusion = v; }},
      {"substeps", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.substeps = static_cast<int>(to_int(v, k)); }},
      {"epochs", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.epochs = static_cast<int>(to_int(v, k)); }},
      {"batch_size", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.batch_size = static_cast<int>(to_int(v, k)); }},
      {"lr", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.lr = to_double(v, k); }},
      {"shuffle", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.shuffle = to_bool(v, k); }},
      {"eval_every", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.eval_every = static_cast<int>(to_int(v, k)); }},
      {"threads", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.threads = static_cast<int>(to_int(v, k)); }},
      {"rollout_steps", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.rollout_steps = static_cast<int>(to_int(v, k)); }},
      {"out", [](RunConfig& c, const std::string& k, const std::string& v) {
         (void)k; c.out = v; }},
  };
  return table;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  // two passes: `system` first (it selects defaults), then everything else
  std::vector<std::pair<std::string, std::string>> kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }

  RunConfig cfg;
  for (const auto& [k, v] : kv) {
    if (k == "system") cfg.system = v;
  }
  apply_system_defaults(cfg);
  for (const auto& [k, v] : kv) {
    auto it = setters().find(k);
    if (it == setters().end()) throw ConfigError("unknown config key '" + k + "'");
    it->second(cfg, k, v);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  return parse_run_config(read_text_file(path));
}

std::string render_run_config(const RunConfig& c) {
  std::ostringstream os;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  os << "system = " << c.system << "\n";
  os << "fine_nx = " << c.fine_nx << "\nfine_ny = " << c.fine_ny << "\n";
  os << "coarse_nx = " << c.coarse_nx << "\ncoarse_ny = " << c.coarse_ny << "\n";
  os << "lx = " << num(c.lx) << "\nly = " << num(c.ly) << "\n";
  os << "alpha = " << num(c.alpha) << "\nbeta = " << num(c.beta) << "\n";
  os << "laplacian_order = " << c.laplacian_order << "\n";
  os << "dt_num = " << num(c.dt_num) << "\n";
  os << "steps_per_snapshot = " << c.steps_per_snapshot << "\n";
  os << "n_snapshots = " << c.n_snapshots << "\n";
  os << "burn_in = " << c.burn_in << "\n";
  os << "n_train_params = " << c.n_train_params << "\n";
  os << "ics_per_param = " << c.ics_per_param << "\n";
  os << "param_min = " << num(c.param_min) << "\nparam_max = " << num(c.param_max) << "\n";
  os << "dataset_kind = " << c.dataset_kind << "\n";
  os << "n_test = " << c.n_test << "\n";
  os << "test_snapshots = " << c.test_snapshots << "\n";
  os << "test_extrapolate = " << (c.test_extrapolate ? "true" : "false") << "\n";
  os << "seed = " << c.seed << "\n";
  os << "hidden_channels = " << c.hidden_channels << "\n";
  os << "n_resblocks = " << c.n_resblocks << "\n";
  os << "res_kernel = " << c.res_kernel << "\n";
  os << "encoder_kernel = " << c.encoder_kernel << "\n";
  os << "encoder_stride = " << c.encoder_stride << "\n";
  os << "encoder_pad = " << c.encoder_pad << "\n";
  os << "shuffle_factor = " << c.shuffle_factor << "\n";
  os << "pde_fusion = " << c.pde_fusion << "\n";
  os << "substeps = " << c.substeps << "\n";
  os << "epochs = " << c.epochs << "\n";
  os << "batch_size = " << c.batch_size << "\n";
  os << "lr = " << num(c.lr) << "\n";
  os << "shuffle = " << (c.shuffle ? "true" : "false") << "\n";
  os << "eval_every = " << c.eval_every << "\n";
  os << "threads = " << c.threads << "\n";
  os << "rollout_steps = " << c.rollout_steps << "\n";
  os << "out = " << c.out << "\n";
  return os.str();
}

PdeSpec RunConfig::pde_spec() const {
  if (system == "rd") return make_rd_full(param_min, alpha, beta, laplacian_order);
  if (system == "rd-diffusion") return make_rd_diffusion_only(param_min, laplacian_order);
  if (system == "burgers") return make_burgers(param_min, laplacian_order);
  throw ConfigError("unknown system '" + system + "'");
}

ModelConfig RunConfig::model_config(const std::string& kind, double dt_learn) const {
  ModelConfig mc;
  mc.fine = fine_grid();
  mc.coarse = coarse_grid();
  mc.channels = 2;
  mc.hidden_channels = hidden_channels;
  mc.n_resblocks = n_resblocks;
  mc.res_kernel = res_kernel;
  mc.encoder_kernel = encoder_kernel;
  mc.encoder_stride = encoder_stride;
  mc.encoder_pad = encoder_pad;
  mc.shuffle_factor = shuffle_factor;
  mc.fusion = parse_fusion(pde_fusion);
  mc.substeps = substeps;
  mc.dt_learn = dt_learn;
  mc.n_scalar_params = 1;
  if (kind == "ppnn") {
    mc.pde = pde_spec();
  } else if (kind != "blackbox") {
    throw ConfigError("unknown model kind '" + kind + "' (ppnn | blackbox)");
  }
  mc.validate();
  return mc;
}

void RunConfig::validate() const {
  if (system != "rd" && system != "rd-diffusion" && system != "burgers") {
    throw ConfigError("unknown system '" + system + "'");
  }
  (void)fine_grid();
  (void)coarse_grid();
  if (!(param_min > 0.0) || !(param_max >= param_min)) {
    throw ConfigError("need 0 < param_min <= param_max (diffusion/viscosity "
                      "coefficients are positive)");
  }
  if (!(dt_num > 0.0)) throw ConfigError("dt_num must be positive");
  if (steps_per_snapshot < 1) throw ConfigError("steps_per_snapshot must be >= 1");
  if (n_snapshots < 2) throw ConfigError("n_snapshots must be >= 2");
  if (burn_in < 0) throw ConfigError("burn_in must be >= 0");
  if (n_train_params < 1 || ics_per_param < 1) {
    throw ConfigError("n_train_params and ics_per_param must be >= 1");
  }
  if (dataset_kind != "train" && dataset_kind != "test") {
    throw ConfigError("dataset_kind must be train or test");
  }
  if (n_test < 1) throw ConfigError("n_test must be >= 1");
  if (test_snapshots < 2) throw ConfigError("test_snapshots must be >= 2");
  if (epochs < 1 || batch_size < 1) throw ConfigError("epochs and batch_size must be >= 1");
  if (!(lr >= 0.0)) throw ConfigError("lr must be >= 0");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (rollout_steps < 1) throw ConfigError("rollout_steps must be >= 1");
  if (laplacian_order != 2 && laplacian_order != 6) {
    throw ConfigError("laplacian_order must be 2 or 6");
  }
}

}  // namespace ppnn
