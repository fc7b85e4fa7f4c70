#include "ppnn/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ppnn/checkpoint.hpp"
#include "ppnn/io_util.hpp"
#include "ppnn/rollout.hpp"
#include "ppnn/svg.hpp"

namespace ppnn {

namespace fs = std::filesystem;

namespace {

std::string num17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_resolved_config(const RunConfig& cfg, const std::string& next_to) {
  atomic_write_file(next_to + ".config", render_run_config(cfg));
}

std::string default_path(const RunConfig& cfg, const std::string& leaf) {
  return (fs::path(cfg.out) / leaf).string();
}

}  // namespace

std::vector<double> training_param_values(const RunConfig& cfg) {
  std::vector<double> vals;
  if (cfg.n_train_params == 1) {
    vals.push_back(cfg.param_min);
  } else {
    for (int i = 0; i < cfg.n_train_params; ++i) {
      vals.push_back(cfg.param_min + (cfg.param_max - cfg.param_min) * i /
                                         (cfg.n_train_params - 1));
    }
  }
  return vals;
}

int cmd_gen_data(const RunConfig& cfg, const std::string& out_path) {
  const std::string path =
      out_path.empty() ? default_path(cfg, "dataset.ppds") : out_path;

  DatasetRecipe recipe;
  recipe.spec = cfg.pde_spec();
  recipe.grid = cfg.fine_grid();
  recipe.dt_num = cfg.dt_num;
  recipe.steps_per_snapshot = cfg.steps_per_snapshot;
  recipe.seed = cfg.seed;
  recipe.burn_in = cfg.burn_in;
  recipe.threads = cfg.threads;
  recipe.kind = cfg.dataset_kind;
  if (cfg.dataset_kind == "train") {
    recipe.param_values = training_param_values(cfg);
    recipe.ics_per_param = cfg.ics_per_param;
    recipe.n_snapshots = cfg.n_snapshots;
  } else {
    recipe.param_values =
        sample_test_params(cfg.param_min, cfg.param_max, training_param_values(cfg),
                           cfg.n_test, cfg.seed, cfg.test_extrapolate);
    recipe.ics_per_param = 1;
    recipe.n_snapshots = cfg.test_snapshots;
    if (cfg.test_extrapolate) recipe.kind = "test-extrapolate";
  }

  const double dt_limit = diffusion_dt_limit(recipe.spec, recipe.grid);
  if (cfg.dt_num > dt_limit) {
    std::cerr << "warning: dt_num " << cfg.dt_num
              << " exceeds the conservative diffusion stability heuristic "
              << dt_limit << "\n";
  }

  Dataset ds = generate_dataset(recipe);
  write_dataset(ds, path);
  write_resolved_config(cfg, path);

  std::cout << "dataset: " << path << "\n"
            << "  kind        " << recipe.kind << "\n"
            << "  system      " << ds.system << "\n"
            << "  trajectories " << ds.trajectories.size() << "\n"
            << "  snapshots   " << ds.n_snapshots() << "\n"
            << "  dt_learn    " << num17(ds.dt_learn()) << "\n";
  return 0;
}

namespace {

// Highest finished epoch in an existing loss CSV, or -1.
int last_epoch_in_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) return -1;
  std::string line, last;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (!line.empty()) last = line;
  }
  if (last.empty()) return -1;
  return std::atoi(last.c_str());
}

}  // namespace

std::string loss_history_csv(const std::vector<EpochStats>& history, int epoch_offset) {
  std::ostringstream os;
  for (const EpochStats& st : history) {
    os << (st.epoch + epoch_offset) << ',' << num17(st.train_mse) << ','
       << num17(st.eval_mse) << '\n';
  }
  return os.str();
}

int cmd_train(const RunConfig& cfg, const std::string& dataset_path,
              const std::string& model_kind, const std::string& out_path,
              const std::string& resume) {
  const Dataset ds = read_dataset(dataset_path);
  if (ds.trajectories.empty()) throw ConfigError("cannot train on an empty dataset");
  const std::string ckpt_path =
      out_path.empty() ? default_path(cfg, model_kind + ".ppck") : out_path;
  const std::string csv_path = ckpt_path + ".loss.csv";

  Model model(cfg.model_config(model_kind, ds.dt_learn()));
  model.init(cfg.seed);
  int epoch_offset = 0;
  bool append = false;
  if (!resume.empty()) {
    load_checkpoint(model, resume);
    const int last = last_epoch_in_csv(csv_path);
    if (last >= 0) {
      epoch_offset = last + 1;
      append = true;
    }
  }

  TrainConfig tc;
  tc.epochs = cfg.epochs;
  tc.batch_size = cfg.batch_size;
  tc.lr = cfg.lr;
  tc.seed = cfg.seed;
  tc.shuffle = cfg.shuffle;
  tc.eval_every = cfg.eval_every;
  tc.threads = cfg.threads;

  const TrainResult result = train(model, ds, tc);

  save_checkpoint(model, ckpt_path);
  std::string csv;
  if (append) {
    csv = read_text_file(csv_path);
  } else {
    csv = "epoch,train_mse,eval_mse\n";
  }
  csv += loss_history_csv(result.history, epoch_offset);
  atomic_write_file(csv_path, csv);
  write_resolved_config(cfg, ckpt_path);

  const EpochStats& last = result.history.back();
  std::cout << "trained " << model_kind << " for " << cfg.epochs << " epochs\n"
            << "  final train_mse " << num17(last.train_mse) << "\n"
            << "  final eval_mse  " << num17(last.eval_mse) << "\n"
            << "  checkpoint      " << ckpt_path << "\n"
            << "  loss history    " << csv_path << "\n";
  return 0;
}

namespace {

struct LoadedModel {
  std::string label;
  std::unique_ptr<Model> model;
};

LoadedModel load_any_kind(const RunConfig& cfg, double dt_learn,
                          const std::string& ckpt_path, int index) {
  const std::uint64_t fp = peek_checkpoint_fingerprint(ckpt_path);
  for (const char* kind : {"ppnn", "blackbox"}) {
    ModelConfig mc = cfg.model_config(kind, dt_learn);
    if (mc.fingerprint() == fp) {
      auto model = std::make_unique<Model>(mc);
      load_checkpoint(*model, ckpt_path);
      std::string label = kind;
      if (index > 0) label += "-" + std::to_string(index + 1);
      return {label, std::move(model)};
    }
  }
  throw IoError("checkpoint " + ckpt_path +
                " matches neither the ppnn nor the blackbox configuration derived "
                "from this config file");
}

void emit_report(const RunConfig& cfg, const std::vector<RolloutReport>& reports,
                 const std::string& out_dir, const std::string& stem,
                 const std::string& title) {
  const std::string csv_path = (fs::path(out_dir) / (stem + ".csv")).string();
  const std::string svg_path = (fs::path(out_dir) / (stem + ".svg")).string();
  atomic_write_file(csv_path, report_csv(reports));
  atomic_write_file(svg_path, render_epsilon_chart(reports, title));
  write_resolved_config(cfg, csv_path);
  for (const RolloutReport& r : reports) {
    int diverged = 0;
    for (int d : r.diverged_at) {
      if (d >= 0) ++diverged;
    }
    const StepStats& last = r.stats.back();
    std::cout << "  " << r.label << ": eps at step " << r.stats.size() << " = "
              << (last.n_alive > 0 ? num17(last.mean) : std::string("n/a"))
              << " (alive " << last.n_alive << "/" << r.diverged_at.size() << ")";
    if (diverged > 0) {
      std::cout << "; diverged:";
      for (std::size_t i = 0; i < r.diverged_at.size(); ++i) {
        if (r.diverged_at[i] >= 0) {
          std::cout << " traj" << i << "@step" << r.diverged_at[i];
        }
      }
    }
    std::cout << "\n";
  }
  std::cout << "  report " << csv_path << " / " << svg_path << "\n";
}

}  // namespace

int cmd_compare(const RunConfig& cfg, const std::vector<std::string>& checkpoints,
                const std::string& dataset_path, const std::string& out_dir) {
  if (checkpoints.empty()) throw ConfigError("compare needs at least one checkpoint");
  const Dataset ds = read_dataset(dataset_path);
  if (ds.trajectories.empty()) throw ConfigError("compare: empty dataset");

  std::vector<LoadedModel> loaded;
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    loaded.push_back(load_any_kind(cfg, ds.dt_learn(), checkpoints[i],
                                   static_cast<int>(i)));
  }
  std::vector<ModelEntry> entries;
  for (LoadedModel& lm : loaded) {
    Model* m = lm.model.get();
    entries.push_back({lm.label, [m](const Field& u, const ParamVector& p) {
                         return m->step(u, p);
                       }});
  }
  const int horizon = cfg.n_snapshots - 1;
  std::cout << "compare on " << ds.trajectories.size() << " trajectories ("
            << ds.kind << "), " << cfg.rollout_steps << " steps\n";
  const auto reports = compare(entries, ds, cfg.rollout_steps, horizon);
  emit_report(cfg, reports, out_dir.empty() ? cfg.out : out_dir, "report",
              "Rollout relative error (" + ds.system + ")");
  return 0;
}

int cmd_coarse(const RunConfig& cfg, const std::string& dataset_path,
               const std::string& out_dir) {
  const Dataset ds = read_dataset(dataset_path);
  if (ds.trajectories.empty()) throw ConfigError("coarse: empty dataset");
  const ModelConfig mc = cfg.model_config("ppnn", ds.dt_learn());
  std::vector<ModelEntry> entries;
  entries.push_back({"coarse-solver", [mc](const Field& u, const ParamVector& p) {
                       return coarse_solver_step(mc, u, p);
                     }});
  const int horizon = cfg.n_snapshots - 1;
  std::cout << "coarse-solver rollout on " << ds.trajectories.size()
            << " trajectories, " << cfg.rollout_steps << " steps\n";
  const auto reports = compare(entries, ds, cfg.rollout_steps, horizon);
  emit_report(cfg, reports, out_dir.empty() ? cfg.out : out_dir, "coarse_report",
              "Coarse-solver rollout relative error (" + ds.system + ")");
  return 0;
}

}  // namespace ppnn
