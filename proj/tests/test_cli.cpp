#include <doctest.h>

#include <cstdlib>
#include <stdexcept>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "egodoa/config.hpp"
#include "egodoa/pipeline.hpp"

using namespace egodoa;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir(const std::string& leaf) {
  const fs::path p = fs::temp_directory_path() / ("egodoa_cli_" + leaf);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_file(const fs::path& dir, const std::string& name,
                    const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(EGODOA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

// A configuration small enough to run the full pipeline in seconds.
RunConfig tiny_config(const fs::path& out_root) {
  RunConfig cfg = preset_config("desk");
  cfg.out_root = out_root;
  cfg.scenes = 3;
  cfg.duration_s = 2.0;
  cfg.camera.image_width = 64;
  cfg.camera.image_height = 64;
  cfg.epochs = 2;
  cfg.batch = 16;
  cfg.seed = 11;
  return cfg;
}

std::string tiny_toml(const fs::path& out_root) {
  std::ostringstream os;
  os << "[global]\n"
     << "out_root = \"" << out_root.string() << "\"\n"
     << "seed = 11\n"
     << "[simulate]\n"
     << "scenes = 3\n"
     << "duration_s = 2.0\n"
     << "image_width = 64\n"
     << "image_height = 64\n"
     << "[train]\n"
     << "epochs = 2\n"
     << "batch = 16\n";
  return os.str();
}

}  // namespace

TEST_CASE("TOML subset: sections, types, comments, quoted strings") {
  const auto dir = tmp_dir("toml");
  const auto path = write_file(dir, "run.toml",
                               "# top comment\n"
                               "[global]\n"
                               "seed = 42          # trailing comment\n"
                               "out_root = \"/tmp/with # hash\"\n"
                               "[simulate]\n"
                               "scenes = 4\n"
                               "snr_db = inf\n"
                               "pink_noise = true\n"
                               "duration_s = 2.5\n"
                               "[train]\n"
                               "lr = 5e-3\n");
  const auto cfg = load_config_file(path, preset_config("desk"));
  CHECK(cfg.seed == 42);
  CHECK(cfg.out_root == fs::path("/tmp/with # hash"));
  CHECK(cfg.scenes == 4);
  CHECK(std::isinf(cfg.snr_db));
  CHECK(cfg.pink_noise);
  CHECK(cfg.duration_s == doctest::Approx(2.5));
  CHECK(cfg.lr == doctest::Approx(5e-3));
  // Untouched keys keep their preset values.
  CHECK(cfg.model.hidden == 64);
}

TEST_CASE("JSON configs are accepted") {
  const auto dir = tmp_dir("json");
  const auto path = write_file(
      dir, "run.json",
      R"({"global": {"seed": 9}, "simulate": {"scenes": 5}})");
  const auto cfg = load_config_file(path, preset_config("desk"));
  CHECK(cfg.seed == 9);
  CHECK(cfg.scenes == 5);
}

TEST_CASE("config: unknown keys, sections, and bad types are rejected") {
  const auto dir = tmp_dir("badcfg");
  const auto base = preset_config("desk");
  CHECK_THROWS_AS(
      load_config_file(write_file(dir, "a.toml", "[global]\nbogus = 1\n"),
                       base),
      ConfigError);
  CHECK_THROWS_AS(
      load_config_file(write_file(dir, "b.toml", "[mystery]\nx = 1\n"), base),
      ConfigError);
  CHECK_THROWS_AS(
      load_config_file(
          write_file(dir, "c.toml", "[simulate]\nscenes = \"four\"\n"), base),
      ConfigError);
  CHECK_THROWS_AS(
      load_config_file(write_file(dir, "d.toml", "scenes = 4\n"), base),
      ConfigError);
  CHECK_THROWS_AS(
      load_config_file(write_file(dir, "e.toml", "[simulate]\nscenes = 0\n"),
                       base),
      ConfigError);
  CHECK_THROWS_AS(load_config_file(dir / "missing.toml", base), ConfigError);
}

TEST_CASE("config: preset named in the file replaces the base first") {
  const auto dir = tmp_dir("preset");
  const auto path = write_file(dir, "p.toml",
                               "[global]\npreset = \"paper\"\n"
                               "[train]\nepochs = 3\n");
  const auto cfg = load_config_file(path, preset_config("desk"));
  CHECK(cfg.model.hidden == 128);  // paper preset
  CHECK(cfg.model.depth == 2);
  CHECK(cfg.epochs == 3);  // file override on top
  CHECK_THROWS_AS(preset_config("huge"), ConfigError);
}

TEST_CASE("config_to_json represents infinite SNR explicitly") {
  const auto text = config_to_json(preset_config("desk"));
  CHECK(text.find("\"snr_db\": \"inf\"") != std::string::npos);
}

TEST_CASE("plan_scenes: per-scene splits and derived seeds") {
  RunConfig cfg = preset_config("desk");
  cfg.scenes = 10;
  const auto scenes = plan_scenes(cfg);
  REQUIRE(scenes.size() == 10);
  int train = 0, val = 0, test = 0;
  for (const auto& s : scenes) {
    if (s.split == "train") ++train;
    else if (s.split == "val") ++val;
    else if (s.split == "test") ++test;
  }
  CHECK(train == 7);
  CHECK(val >= 1);
  CHECK(test >= 1);
  CHECK(train + val + test == 10);

  // Seeds are deterministic and pairwise distinct.
  const auto again = plan_scenes(cfg);
  for (size_t i = 0; i < scenes.size(); ++i) {
    CHECK(scenes[i].seed == again[i].seed);
    for (size_t j = i + 1; j < scenes.size(); ++j) {
      CHECK(scenes[i].seed != scenes[j].seed);
    }
  }
}

TEST_CASE("missing artifacts raise the dedicated error") {
  const auto empty = tmp_dir("empty");
  RunConfig cfg = tiny_config(empty);
  CHECK_THROWS_AS(run_featurize(cfg), MissingArtifactError);
  CHECK_THROWS_AS(run_train(cfg), MissingArtifactError);
  CHECK_THROWS_AS(run_evaluate(cfg), MissingArtifactError);
  CHECK_THROWS_AS(run_report(cfg), MissingArtifactError);
}

TEST_CASE("full pipeline on a tiny run: caching, reports, idempotence") {
  const auto out = tmp_dir("pipeline");
  const RunConfig cfg = tiny_config(out);

  const auto sim = run_simulate(cfg);
  CHECK(sim.scenes == 3);
  CHECK(sim.chunks == 3 * 50);
  CHECK(fs::exists(cfg.dataset_dir() / "manifest.jsonl"));

  const auto feat1 = run_featurize(cfg);
  CHECK(feat1.total == sim.chunks);
  CHECK(feat1.computed == sim.chunks);
  CHECK(feat1.reused == 0);

  // Second featurize reuses every cached chunk.
  const auto feat2 = run_featurize(cfg);
  CHECK(feat2.computed == 0);
  CHECK(feat2.reused == sim.chunks);

  const auto train = run_train(cfg);
  CHECK(train.epochs_run >= 1);
  CHECK(std::isfinite(train.final_train_loss));
  CHECK(fs::exists(train.best_checkpoint));
  CHECK(fs::exists(cfg.train_dir() / "log.csv"));

  const auto eval = run_evaluate(cfg);
  CHECK(eval.test_chunks == 50);
  CHECK(fs::exists(cfg.eval_dir() / "report.json"));
  CHECK(fs::exists(cfg.eval_dir() / "report.csv"));
  CHECK(fs::exists(cfg.eval_dir() / "predictions.csv"));

  run_report(cfg);
  for (const char* name : {"error_histogram.csv", "posterior_examples.csv",
                           "training_curve.csv"}) {
    CHECK(fs::exists(cfg.report_dir() / name));
  }

  // Reports are idempotent: a second pass is byte-identical.
  const std::string hist1 = slurp(cfg.report_dir() / "error_histogram.csv");
  run_report(cfg);
  CHECK(slurp(cfg.report_dir() / "error_histogram.csv") == hist1);

  // Posterior example rows carry normalized distributions.
  {
    std::ifstream is(cfg.report_dir() / "posterior_examples.csv");
    std::string line;
    REQUIRE(std::getline(is, line));  // header
    std::map<std::string, double> sums;
    while (std::getline(is, line)) {
      std::istringstream ls(line);
      std::string example, gt, bin, p;
      REQUIRE(std::getline(ls, example, ','));
      REQUIRE(std::getline(ls, gt, ','));
      REQUIRE(std::getline(ls, bin, ','));
      REQUIRE(std::getline(ls, p, ','));
      sums[example] += std::stod(p);
    }
    REQUIRE(!sums.empty());
    for (const auto& [example, sum] : sums) {
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
  }

  // Re-simulating under the same seed reproduces the manifest exactly.
  const auto out2 = tmp_dir("pipeline2");
  RunConfig cfg2 = cfg;
  cfg2.out_root = out2;
  run_simulate(cfg2);
  CHECK(slurp(cfg2.dataset_dir() / "manifest.jsonl") ==
        slurp(cfg.dataset_dir() / "manifest.jsonl"));

  fs::remove_all(out);
  fs::remove_all(out2);
}

TEST_CASE("binary exit codes: config errors, missing artifacts, success") {
  const auto dir = tmp_dir("exitcodes");
  const auto bad = write_file(dir, "bad.toml", "[global]\nbogus = 1\n");
  CHECK(run_cli("simulate --config " + bad.string()) == 2);
  CHECK(run_cli("simulate --config " + (dir / "nope.toml").string()) == 2);
  CHECK(run_cli("evaluate --preset desk") != 0);

  const auto out = dir / "out";
  const auto good = write_file(dir, "good.toml", tiny_toml(out));
  // Artifacts are missing until the earlier stages have run.
  CHECK(run_cli("train --config " + good.string()) == 3);
  CHECK(run_cli("simulate --config " + good.string()) == 0);
  CHECK(fs::exists(out / "dataset" / "manifest.jsonl"));

  // EGODOA_OUT overrides the configured output root.
  const auto redirected = dir / "redirected";
  const std::string env_cmd = "EGODOA_OUT=" + redirected.string() + " " +
                              std::string(EGODOA_CLI_PATH) +
                              " simulate --config " + good.string() +
                              " >/dev/null 2>&1";
  const int status = std::system(env_cmd.c_str());
  REQUIRE(status != -1);
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(fs::exists(redirected / "dataset" / "manifest.jsonl"));

  fs::remove_all(dir);
}
