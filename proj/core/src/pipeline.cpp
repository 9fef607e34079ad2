#include "egodoa/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "egodoa/audio_io.hpp"
#include "egodoa/checkpoint.hpp"
#include "egodoa/gcc_phat.hpp"
#include "egodoa/image_io.hpp"
#include "egodoa/model.hpp"
#include "egodoa/patches.hpp"
#include "egodoa/stft.hpp"

namespace egodoa {

namespace {

using nlohmann::json;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// One textual representation shared by the JSON and CSV emitters so the
// two always agree byte-for-byte on every number.
std::string num(double x) { return json(x).dump(); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << text;
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

void write_provenance(const std::filesystem::path& dir, const RunConfig& cfg) {
  write_text(dir / "config.json", config_to_json(cfg));
}

std::filesystem::path feature_path(const RunConfig& cfg,
                                   const ChunkRecord& row) {
  std::filesystem::path rel = row.wav_path;
  rel.replace_extension(".feat");
  return cfg.features_dir() / rel;
}

DatasetManifest load_manifest_or_throw(const RunConfig& cfg) {
  const auto path = cfg.dataset_dir() / "manifest.jsonl";
  if (!std::filesystem::exists(path)) {
    throw MissingArtifactError("missing dataset manifest: " + path.string());
  }
  return read_manifest(path);
}

ChunkFeatures load_features_or_throw(const RunConfig& cfg,
                                     const ChunkRecord& row,
                                     const std::string& hash) {
  const auto path = feature_path(cfg, row);
  if (!std::filesystem::exists(path)) {
    throw MissingArtifactError("missing feature cache: " + path.string());
  }
  return read_chunk_features(path, hash);
}

TrainChunk to_train_chunk(const ChunkFeatures& feat, const ChunkRecord& row,
                          double sigma) {
  TrainChunk chunk;
  chunk.gcc = feat.gcc;
  chunk.patches = feat.patches();
  chunk.target = gaussian_target(row.azimuth_bin, sigma).p;
  chunk.in_fov = row.in_fov;
  return chunk;
}

SubsetMetrics subset_metrics(const std::vector<double>& preds,
                             const std::vector<double>& gts) {
  SubsetMetrics m;
  m.count = static_cast<int>(preds.size());
  if (m.count == 0) return m;
  m.accuracy_pct = accuracy_at(preds, gts, 2.0);
  m.mean_ae_deg = mean_abs_error(preds, gts);
  return m;
}

EvalReport make_report(const std::vector<double>& preds,
                       const std::vector<double>& gts,
                       const std::vector<bool>& fov) {
  std::vector<double> pin, gin, pout, gout;
  for (size_t i = 0; i < preds.size(); ++i) {
    (fov[i] ? pin : pout).push_back(preds[i]);
    (fov[i] ? gin : gout).push_back(gts[i]);
  }
  EvalReport r;
  r.overall = subset_metrics(preds, gts);
  r.in_fov = subset_metrics(pin, gin);
  r.out_of_fov = subset_metrics(pout, gout);
  return r;
}

json report_json(const EvalReport& r) {
  auto sub = [](const SubsetMetrics& m) {
    return json{{"accuracy_at_2_pct", m.accuracy_pct},
                {"mean_ae_deg", m.mean_ae_deg},
                {"count", m.count}};
  };
  return json{{"overall", sub(r.overall)},
              {"in_fov", sub(r.in_fov)},
              {"out_of_fov", sub(r.out_of_fov)}};
}

void append_report_csv(std::ostringstream& csv, const std::string& method,
                       const EvalReport& r) {
  auto row = [&](const std::string& subset, const SubsetMetrics& m) {
    csv << method << ',' << subset << ',' << num(m.accuracy_pct) << ','
        << num(m.mean_ae_deg) << ',' << m.count << '\n';
  };
  row("overall", r.overall);
  row("in_fov", r.in_fov);
  row("out_of_fov", r.out_of_fov);
}

int argmax_bin(const Eigen::VectorXd& posterior) {
  int best = 0;
  posterior.maxCoeff(&best);
  return best;
}

}  // namespace

std::vector<SceneSpec> plan_scenes(const RunConfig& cfg) {
  const int n = cfg.scenes;
  int n_train = static_cast<int>(std::floor(cfg.train_frac * n));
  int n_val = static_cast<int>(std::floor(cfg.val_frac * n));
  // Small runs still need every split populated.
  if (n >= 3) {
    n_train = std::max(1, n_train);
    n_val = std::max(1, n_val);
    while (n_train + n_val >= n) (n_train > 1 ? n_train : n_val)--;
  }

  std::vector<SceneSpec> scenes;
  scenes.reserve(n);
  for (int i = 0; i < n; ++i) {
    SceneSpec s;
    s.scene_id = i;
    s.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(i));
    s.split = i < n_train ? "train" : (i < n_train + n_val ? "val" : "test");
    s.trajectory = cfg.trajectory;
    s.trajectory.duration_s = cfg.duration_s;
    s.acoustics = cfg.acoustics;
    s.camera = cfg.camera;
    s.snr_db = cfg.snr_db;
    s.pink_noise = cfg.pink_noise;
    scenes.push_back(std::move(s));
  }
  return scenes;
}

SimulateSummary run_simulate(const RunConfig& cfg) {
  const auto scenes = plan_scenes(cfg);
  std::filesystem::create_directories(cfg.dataset_dir());
  const auto manifest = write_dataset(scenes, cfg.dataset_dir());
  write_provenance(cfg.dataset_dir(), cfg);

  SimulateSummary s;
  s.scenes = static_cast<int>(scenes.size());
  s.chunks = static_cast<int>(manifest.rows.size());
  s.in_fov_fraction = manifest.in_fov_fraction();
  return s;
}

FeaturizeSummary run_featurize(const RunConfig& cfg) {
  const auto manifest = load_manifest_or_throw(cfg);
  const std::string hash = feature_config_hash(cfg.features);

  std::filesystem::create_directories(cfg.features_dir());
  for (const auto& row : manifest.rows) {
    std::filesystem::create_directories(feature_path(cfg, row).parent_path());
  }

  std::atomic<int> next{0};
  std::atomic<int> computed{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&]() {
    try {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= static_cast<int>(manifest.rows.size())) return;
        const auto& row = manifest.rows[i];
        const auto out = feature_path(cfg, row);
        if (chunk_features_valid(out, hash)) continue;

        const StereoBuffer clip = read_wav(cfg.dataset_dir() / row.wav_path);
        const auto s1 = stft(clip.left, cfg.features.window, cfg.features.hop,
                             clip.sample_rate);
        const auto s2 = stft(clip.right, cfg.features.window, cfg.features.hop,
                             clip.sample_rate);
        const auto gcc = gcc_phat(s1, s2, cfg.features.n_lags);

        const FrameImage img = read_png(cfg.dataset_dir() / row.png_path);
        const PatchSequence patches = patchify(img, cfg.features.patch);

        ChunkFeatures feat;
        feat.gcc = gcc.data;
        feat.patch_rows = patches.patches();
        feat.patch_cols = patches.dims();
        feat.patches_u8.resize(static_cast<size_t>(feat.patch_rows) *
                               feat.patch_cols);
        for (int r = 0; r < feat.patch_rows; ++r) {
          for (int c = 0; c < feat.patch_cols; ++c) {
            feat.patches_u8[static_cast<size_t>(r) * feat.patch_cols + c] =
                static_cast<std::uint8_t>(
                    std::lround(patches.data(r, c) * 255.0));
          }
        }
        write_chunk_features(out, feat, hash);
        computed.fetch_add(1);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
      next.store(static_cast<int>(manifest.rows.size()));
    }
  };

  const int n_workers = std::max(1, cfg.workers);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  write_provenance(cfg.features_dir(), cfg);

  FeaturizeSummary s;
  s.total = static_cast<int>(manifest.rows.size());
  s.computed = computed.load();
  s.reused = s.total - s.computed;
  return s;
}

TrainSummary run_train(const RunConfig& cfg) {
  const auto manifest = load_manifest_or_throw(cfg);
  const std::string hash = feature_config_hash(cfg.features);

  std::vector<const ChunkRecord*> train_rows, val_rows;
  for (const auto& row : manifest.rows) {
    if (row.split == "train") train_rows.push_back(&row);
    if (row.split == "val") val_rows.push_back(&row);
  }
  if (train_rows.empty()) {
    throw MissingArtifactError("train: no chunks in the train split");
  }

  auto load_all = [&](const std::vector<const ChunkRecord*>& rows) {
    std::vector<ChunkFeatures> out;
    out.reserve(rows.size());
    for (const auto* row : rows) {
      out.push_back(load_features_or_throw(cfg, *row, hash));
    }
    return out;
  };
  const auto train_feats = load_all(train_rows);
  const auto val_feats = load_all(val_rows);

  ModelConfig mcfg = cfg.model;
  mcfg.seed = cfg.seed;
  mcfg.audio_len = static_cast<int>(train_feats.front().gcc.rows());
  mcfg.audio_dim = static_cast<int>(train_feats.front().gcc.cols());
  mcfg.visual_len = train_feats.front().patch_rows;
  mcfg.visual_dim = train_feats.front().patch_cols;
  mcfg.bins = kDoaBins;

  ParameterStore params = init_params(mcfg);
  SgdOptimizer opt;
  opt.lr = cfg.lr;
  opt.momentum = cfg.momentum;

  std::filesystem::create_directories(cfg.train_dir());
  write_provenance(cfg.train_dir(), cfg);

  std::ostringstream log;
  log << "epoch,loss_av,loss_ao,n_av,n_ao,val_mean_ae\n";

  auto val_mean_ae = [&]() {
    if (val_rows.empty()) return 0.0;
    double sum = 0.0;
    for (size_t i = 0; i < val_rows.size(); ++i) {
      const auto chunk = to_train_chunk(val_feats[i], *val_rows[i], cfg.sigma);
      const auto posterior =
          predict_posterior(chunk, mcfg, params, chunk.in_fov);
      sum += cyclic_abs_error(argmax_bin(posterior),
                              val_rows[i]->azimuth_bin);
    }
    return sum / static_cast<double>(val_rows.size());
  };

  TrainSummary summary;
  summary.best_val_ae = std::numeric_limits<double>::infinity();

  std::vector<int> order(train_rows.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(),
                 std::mt19937_64(mix_seed(cfg.seed, 1000 + epoch)));

    double ep_av = 0.0, ep_ao = 0.0;
    int ep_nav = 0, ep_nao = 0;
    for (size_t at = 0; at < order.size(); at += cfg.batch) {
      std::vector<TrainChunk> batch;
      const size_t end = std::min(order.size(), at + cfg.batch);
      for (size_t k = at; k < end; ++k) {
        batch.push_back(to_train_chunk(train_feats[order[k]],
                                       *train_rows[order[k]], cfg.sigma));
      }
      const StepStats stats = train_step_separate(batch, params, mcfg, opt);
      if (!std::isfinite(stats.total())) {
        throw NumericalError("train: non-finite loss at epoch " +
                             std::to_string(epoch));
      }
      ep_av += stats.loss_av;
      ep_ao += stats.loss_ao;
      ep_nav += stats.n_av;
      ep_nao += stats.n_ao;
    }

    const double val_ae = val_mean_ae();
    log << epoch << ',' << num(ep_av) << ',' << num(ep_ao) << ',' << ep_nav
        << ',' << ep_nao << ',' << num(val_ae) << '\n';

    char name[32];
    std::snprintf(name, sizeof(name), "epoch_%03d.ckpt", epoch);
    save_checkpoint(cfg.train_dir() / name, mcfg, params);

    const double epoch_loss = ep_av + ep_ao;
    if (epoch == 0) summary.first_train_loss = epoch_loss;
    summary.final_train_loss = epoch_loss;
    summary.epochs_run = epoch + 1;

    if (val_ae < summary.best_val_ae || val_rows.empty()) {
      summary.best_val_ae = val_ae;
      summary.best_epoch = epoch;
      save_checkpoint(cfg.train_dir() / "best.ckpt", mcfg, params);
    } else if (epoch - summary.best_epoch >= cfg.patience) {
      break;
    }
  }

  write_text(cfg.train_dir() / "log.csv", log.str());
  summary.best_checkpoint = cfg.train_dir() / "best.ckpt";
  return summary;
}

EvaluateSummary run_evaluate(const RunConfig& cfg) {
  const auto manifest = load_manifest_or_throw(cfg);
  const std::string hash = feature_config_hash(cfg.features);

  const auto ckpt_path = cfg.train_dir() / "best.ckpt";
  if (!std::filesystem::exists(ckpt_path)) {
    throw MissingArtifactError("missing checkpoint: " + ckpt_path.string());
  }
  const Checkpoint ckpt = load_checkpoint(ckpt_path);

  std::vector<const ChunkRecord*> test_rows;
  for (const auto& row : manifest.rows) {
    if (row.split == "test") test_rows.push_back(&row);
  }
  if (test_rows.empty()) {
    throw MissingArtifactError("evaluate: no chunks in the test split");
  }

  std::vector<double> gts, pred_model, pred_ao, pred_srp;
  std::vector<bool> fov;
  std::ostringstream preds_csv;
  preds_csv << "scene,chunk,gt_bin,in_fov,model,audio_only,srp\n";

  Eigen::VectorXd example_in, example_out;
  int example_in_gt = -1, example_out_gt = -1;

  for (const auto* row : test_rows) {
    const auto feat = load_features_or_throw(cfg, *row, hash);
    const auto chunk = to_train_chunk(feat, *row, cfg.sigma);

    const auto posterior =
        predict_posterior(chunk, ckpt.config, ckpt.params, row->in_fov);
    const int model_bin = argmax_bin(posterior);

    const auto posterior_ao =
        predict_posterior(chunk, ckpt.config, ckpt.params, false);
    const int ao_bin = argmax_bin(posterior_ao);

    GccPhatFeature gf;
    gf.data = feat.gcc;
    gf.sample_rate = cfg.acoustics.sample_rate;
    const double srp_deg = srp_phat_doa(gf, cfg.acoustics).azimuth.deg;

    gts.push_back(row->azimuth_bin);
    fov.push_back(row->in_fov);
    pred_model.push_back(model_bin);
    pred_ao.push_back(ao_bin);
    pred_srp.push_back(srp_deg);

    preds_csv << row->scene_id << ',' << row->chunk_idx << ','
              << row->azimuth_bin << ',' << (row->in_fov ? 1 : 0) << ','
              << model_bin << ',' << ao_bin << ',' << num(srp_deg) << '\n';

    if (row->in_fov && example_in_gt < 0) {
      example_in = posterior;
      example_in_gt = row->azimuth_bin;
    }
    if (!row->in_fov && example_out_gt < 0) {
      example_out = posterior;
      example_out_gt = row->azimuth_bin;
    }
  }

  EvaluateSummary s;
  s.test_chunks = static_cast<int>(test_rows.size());
  s.model = make_report(pred_model, gts, fov);
  s.audio_only = make_report(pred_ao, gts, fov);
  s.srp = make_report(pred_srp, gts, fov);

  std::filesystem::create_directories(cfg.eval_dir());
  write_provenance(cfg.eval_dir(), cfg);

  json rep{{"model", report_json(s.model)}, {"test_chunks", s.test_chunks}};
  std::ostringstream csv;
  csv << "method,subset,accuracy_at_2_pct,mean_ae_deg,count\n";
  append_report_csv(csv, "model", s.model);
  if (cfg.baseline_audio_only) {
    rep["audio_only"] = report_json(s.audio_only);
    append_report_csv(csv, "audio_only", s.audio_only);
  }
  if (cfg.baseline_srp) {
    rep["srp_phat"] = report_json(s.srp);
    append_report_csv(csv, "srp_phat", s.srp);
  }
  write_text(cfg.eval_dir() / "report.json", rep.dump(2) + "\n");
  write_text(cfg.eval_dir() / "report.csv", csv.str());
  write_text(cfg.eval_dir() / "predictions.csv", preds_csv.str());

  std::ostringstream post;
  post << "example,gt_bin,bin,p\n";
  auto dump_example = [&](const std::string& name, int gt,
                          const Eigen::VectorXd& p) {
    if (gt < 0) return;
    for (int b = 0; b < p.size(); ++b) {
      post << name << ',' << gt << ',' << b << ',' << num(p(b)) << '\n';
    }
  };
  dump_example("in_fov", example_in_gt, example_in);
  dump_example("out_of_fov", example_out_gt, example_out);
  write_text(cfg.eval_dir() / "posteriors.csv", post.str());

  return s;
}

void run_report(const RunConfig& cfg) {
  const auto preds_path = cfg.eval_dir() / "predictions.csv";
  const auto post_path = cfg.eval_dir() / "posteriors.csv";
  const auto log_path = cfg.train_dir() / "log.csv";
  for (const auto& p : {preds_path, post_path, log_path}) {
    if (!std::filesystem::exists(p)) {
      throw MissingArtifactError("missing report input: " + p.string());
    }
  }

  std::vector<double> preds, gts;
  {
    std::ifstream is(preds_path);
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line)) {
      std::istringstream row(line);
      std::string cell;
      std::vector<std::string> cells;
      while (std::getline(row, cell, ',')) cells.push_back(cell);
      if (cells.size() < 7) continue;
      gts.push_back(std::stod(cells[2]));
      preds.push_back(std::stod(cells[4]));
    }
  }

  std::filesystem::create_directories(cfg.report_dir());
  write_provenance(cfg.report_dir(), cfg);

  const auto hist = error_histogram(preds, gts);
  std::ostringstream hist_csv;
  hist_csv << "gt_bin,mean_ae_deg,count\n";
  for (size_t b = 0; b < hist.size(); ++b) {
    if (hist[b].count == 0) continue;
    hist_csv << b << ',' << num(hist[b].mean_ae_deg) << ',' << hist[b].count
             << '\n';
  }
  write_text(cfg.report_dir() / "error_histogram.csv", hist_csv.str());

  // Pass-throughs renamed into plot-ready outputs.
  std::filesystem::copy_file(
      post_path, cfg.report_dir() / "posterior_examples.csv",
      std::filesystem::copy_options::overwrite_existing);
  std::filesystem::copy_file(
      log_path, cfg.report_dir() / "training_curve.csv",
      std::filesystem::copy_options::overwrite_existing);
}

}  // namespace egodoa
