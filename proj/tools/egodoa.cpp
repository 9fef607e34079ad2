// Command-line front end: simulate | featurize | train | evaluate | report.
//
// Exit codes: 0 success, 2 config error, 3 missing input artifact,
// 4 numerical failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

#include "egodoa/pipeline.hpp"

namespace {

struct CliArgs {
  std::string command;
  std::string config_path;
  std::string preset = "desk";
  bool preset_given = false;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int workers = 0;
  bool workers_given = false;
};

egodoa::RunConfig resolve_config(const CliArgs& args) {
  egodoa::RunConfig cfg = egodoa::preset_config(args.preset);
  if (!args.config_path.empty()) {
    cfg = egodoa::load_config_file(args.config_path, cfg);
    if (args.preset_given && cfg.preset != args.preset) {
      throw egodoa::ConfigError("--preset " + args.preset +
                                " conflicts with the config file's preset " +
                                cfg.preset);
    }
  }
  // Flags override file values.
  if (args.seed_given) cfg.seed = args.seed;
  if (args.workers_given) cfg.workers = args.workers;
  if (const char* out = std::getenv("EGODOA_OUT")) cfg.out_root = out;
  if (cfg.workers < 1) throw egodoa::ConfigError("workers must be >= 1");
  return cfg;
}

int run(const CliArgs& args) {
  const egodoa::RunConfig cfg = resolve_config(args);

  if (args.command == "simulate") {
    const auto s = egodoa::run_simulate(cfg);
    std::cout << "scenes: " << s.scenes << "\nchunks: " << s.chunks
              << "\nin_fov_fraction: " << s.in_fov_fraction << "\n";
  } else if (args.command == "featurize") {
    const auto s = egodoa::run_featurize(cfg);
    std::cout << "chunks: " << s.total << "\ncomputed: " << s.computed
              << "\nreused: " << s.reused << "\naudio feature shape: ("
              << cfg.model.audio_len << ", " << cfg.features.n_lags
              << ")\nvisual feature shape: (" << cfg.model.visual_len << ", "
              << cfg.model.visual_dim << ")\n";
  } else if (args.command == "train") {
    const auto s = egodoa::run_train(cfg);
    std::cout << "epochs_run: " << s.epochs_run
              << "\nfinal_train_loss: " << s.final_train_loss
              << "\nbest_val_mean_ae: " << s.best_val_ae
              << "\nbest_checkpoint: " << s.best_checkpoint.string() << "\n";
  } else if (args.command == "evaluate") {
    const auto s = egodoa::run_evaluate(cfg);
    std::cout << "test_chunks: " << s.test_chunks
              << "\nmodel_overall_mean_ae: " << s.model.overall.mean_ae_deg
              << "\nmodel_in_fov_mean_ae: " << s.model.in_fov.mean_ae_deg
              << "\nmodel_out_of_fov_mean_ae: "
              << s.model.out_of_fov.mean_ae_deg << "\n";
  } else if (args.command == "report") {
    egodoa::run_report(cfg);
    std::cout << "report written to " << cfg.report_dir().string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Egocentric audio-visual speaker DOA toolkit"};
  app.require_subcommand(1);

  CliArgs args;
  for (const char* name :
       {"simulate", "featurize", "train", "evaluate", "report"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", args.config_path, "TOML or JSON config file");
    sub->add_option("--seed", args.seed, "Global seed override")
        ->each([&](const std::string&) { args.seed_given = true; });
    sub->add_option("--workers", args.workers, "Worker pool size")
        ->each([&](const std::string&) { args.workers_given = true; });
    sub->add_option("--preset", args.preset, "Base preset")
        ->check(CLI::IsMember({"desk", "paper"}))
        ->each([&](const std::string&) { args.preset_given = true; });
    sub->callback([&, name]() { args.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return run(args);
  } catch (const egodoa::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const egodoa::MissingArtifactError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const egodoa::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
