#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ppnn/commands.hpp"
#include "ppnn/errors.hpp"

// Exit codes: 0 success, 2 config/usage error, 3 I/O or format error,
// 4 divergence-aborted run, 1 anything else.

int main(int argc, char** argv) {
  CLI::App app{"Multi-resolution neural PDE surrogate pipeline: generate reference "
               "trajectories, train next-step models, compare rollouts"};
  app.require_subcommand(1);

  std::string config_path, out_override, dataset_path, model_kind, resume;
  std::vector<std::string> checkpoints;
  std::uint64_t seed_override = 0;
  bool has_seed = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration file")->required();
    sub->add_option_function<std::uint64_t>(
           "--seed", [&](const std::uint64_t& s) {
             seed_override = s;
             has_seed = true;
           },
           "override the config seed");
    sub->add_option("--out", out_override, "override the output path");
  };

  CLI::App* gen = app.add_subcommand("gen-data", "generate a dataset");
  add_common(gen);

  CLI::App* train = app.add_subcommand("train", "train one model on a dataset");
  add_common(train);
  train->add_option("--dataset", dataset_path, "dataset file")->required();
  train->add_option("--model", model_kind, "ppnn | blackbox")->required();
  train->add_option("--resume", resume, "checkpoint to continue from");

  CLI::App* cmp = app.add_subcommand("compare", "roll out checkpoints on a test set");
  add_common(cmp);
  cmp->add_option("--dataset", dataset_path, "test dataset file")->required();
  cmp->add_option("--checkpoint", checkpoints, "checkpoint file (repeatable)")
      ->required();

  CLI::App* coarse = app.add_subcommand("coarse", "coarse-solver-only rollout");
  add_common(coarse);
  coarse->add_option("--dataset", dataset_path, "test dataset file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    ppnn::RunConfig cfg = ppnn::load_run_config(config_path);
    if (has_seed) cfg.seed = seed_override;

    if (gen->parsed()) {
      return ppnn::cmd_gen_data(cfg, out_override);
    }
    if (train->parsed()) {
      return ppnn::cmd_train(cfg, dataset_path, model_kind, out_override, resume);
    }
    if (cmp->parsed()) {
      return ppnn::cmd_compare(cfg, checkpoints, dataset_path, out_override);
    }
    if (coarse->parsed()) {
      return ppnn::cmd_coarse(cfg, dataset_path, out_override);
    }
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const ppnn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ppnn::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const ppnn::DivergedError& e) {
    std::cerr << "diverged: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
