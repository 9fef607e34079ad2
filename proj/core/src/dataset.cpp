#include "egodoa/dataset.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

#include "egodoa/audio_io.hpp"
#include "egodoa/frame_render.hpp"
#include "egodoa/image_io.hpp"

namespace egodoa {

namespace {

using nlohmann::json;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int azimuth_bin_of(double az_deg) {
  const int b = static_cast<int>(std::lround(az_deg)) % 360;
  return b < 0 ? b + 360 : b;
}

json pose_json(const Pose& p) {
  return json{{"x", p.x}, {"y", p.y}, {"z", p.z}, {"yaw", p.yaw_deg}};
}

Pose pose_from_json(const json& j) {
  return Pose{j.at("x").get<double>(), j.at("y").get<double>(),
              j.at("z").get<double>(), j.at("yaw").get<double>()};
}

// While attending, the wearer turns to face the speaker (speaker at the
// center of the FOV); otherwise yaw keeps following the walk heading.
// Attention segments alternate with look-away segments so the in-FOV
// fraction lands in the same ballpark as real conversational data.
Trajectory apply_gaze(const Trajectory& wearer, const Trajectory& speaker,
                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> attend_len(1.5, 4.0);
  std::uniform_real_distribution<double> away_len(1.0, 3.0);
  // Imperfect aim keeps the in-FOV label distribution spread over the
  // whole [60, 120] window instead of collapsing onto 90.
  std::uniform_real_distribution<double> aim_offset(-25.0, 25.0);
  std::bernoulli_distribution start_attending(0.5);

  Trajectory out = wearer;
  bool attending = start_attending(rng);
  double segment_end = attending ? attend_len(rng) : away_len(rng);
  double offset = aim_offset(rng);
  for (auto& tp : out.samples) {
    while (tp.t_s >= segment_end) {
      attending = !attending;
      segment_end += attending ? attend_len(rng) : away_len(rng);
      if (attending) offset = aim_offset(rng);
    }
    if (attending) {
      const Pose spk = speaker.at(tp.t_s);
      const double dx = spk.x - tp.pose.x;
      const double dz = spk.z - tp.pose.z;
      if (dx != 0.0 || dz != 0.0) {
        tp.pose.yaw_deg = wrap_deg(std::atan2(dx, dz) * 180.0 /
                                       3.14159265358979323846 +
                                   offset);
      }
    }
  }
  return out;
}

Trajectory scene_wearer(const SceneSpec& scene, const Trajectory& speaker) {
  const Trajectory raw =
      gen_trajectory(derive_seed(scene.seed, 0), scene.trajectory);
  return apply_gaze(raw, speaker, derive_seed(scene.seed, 9));
}

std::string scene_dir_name(int scene_id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "scene_%04d", scene_id);
  return buf;
}

std::string chunk_stem(int chunk_idx) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "chunk_%06d", chunk_idx);
  return buf;
}

}  // namespace

double DatasetManifest::in_fov_fraction() const {
  if (rows.empty()) return 0.0;
  std::size_t n = 0;
  for (const auto& r : rows) n += r.in_fov ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(rows.size());
}

std::vector<std::pair<double, double>> wearer_speech_schedule(
    std::uint64_t seed, double duration_s) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> off_len(1.0, 3.0);
  std::uniform_real_distribution<double> on_len(0.8, 2.0);
  std::vector<std::pair<double, double>> segments;
  double t = off_len(rng);
  while (t < duration_s) {
    const double end = std::min(t + on_len(rng), duration_s);
    segments.emplace_back(t, end);
    t = end + off_len(rng);
  }
  return segments;
}

std::vector<ChunkRecord> annotate_scene(const SceneSpec& scene) {
  if (scene.fps <= 0 || scene.chunk_every_frames <= 0 ||
      scene.clip_frames <= 0) {
    throw std::invalid_argument("dataset: non-positive chunking parameter");
  }
  const Trajectory speaker =
      gen_trajectory(derive_seed(scene.seed, 1), scene.trajectory);
  const Trajectory wearer = scene_wearer(scene, speaker);
  const auto speech =
      wearer_speech_schedule(derive_seed(scene.seed, 2),
                             scene.trajectory.duration_s);

  const double duration = scene.trajectory.duration_s;
  const double clip_len_s = scene.clip_frames / scene.fps;
  const int total_frames = static_cast<int>(std::llround(duration * scene.fps));

  std::vector<ChunkRecord> rows;
  int chunk_idx = 0;
  for (int f = 0; f < total_frames; f += scene.chunk_every_frames) {
    const double t = f / scene.fps;
    ChunkRecord row;
    row.scene_id = scene.scene_id;
    row.chunk_idx = chunk_idx++;
    row.split = scene.split;
    row.t_s = t;
    row.clip_start_s =
        std::clamp(t - clip_len_s / 2.0, 0.0, std::max(0.0, duration - clip_len_s));
    row.wearer = wearer.at(t);
    row.speaker = speaker.at(t);
    row.azimuth_deg = relative_doa(row.wearer, row.speaker).deg;
    row.azimuth_bin = azimuth_bin_of(row.azimuth_deg);
    row.in_fov = in_fov(AzimuthDeg{static_cast<double>(row.azimuth_bin)});
    row.wearer_speaking = std::any_of(
        speech.begin(), speech.end(),
        [t](const auto& seg) { return t >= seg.first && t < seg.second; });
    const std::string dir = scene_dir_name(scene.scene_id);
    row.wav_path = dir + "/" + chunk_stem(row.chunk_idx) + ".wav";
    row.png_path = dir + "/" + chunk_stem(row.chunk_idx) + ".png";
    rows.push_back(std::move(row));
  }
  return rows;
}

DatasetManifest write_dataset(const std::vector<SceneSpec>& scenes,
                              const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw std::runtime_error("dataset: cannot create " + out_dir.string() +
                             ": " + ec.message());
  }

  DatasetManifest manifest;
  for (const auto& scene : scenes) {
    const auto scene_dir = out_dir / scene_dir_name(scene.scene_id);
    std::filesystem::create_directories(scene_dir, ec);
    if (ec) {
      throw std::runtime_error("dataset: cannot create " + scene_dir.string() +
                               ": " + ec.message());
    }

    auto rows = annotate_scene(scene);

    const Trajectory speaker =
        gen_trajectory(derive_seed(scene.seed, 1), scene.trajectory);
    const Trajectory wearer = scene_wearer(scene, speaker);
    const auto speech = wearer_speech_schedule(derive_seed(scene.seed, 2),
                                               scene.trajectory.duration_s);

    const double sr = scene.acoustics.sample_rate;
    const int n_samples =
        static_cast<int>(std::llround(scene.trajectory.duration_s * sr));
    const auto source = make_speech_surrogate(derive_seed(scene.seed, 3),
                                              n_samples, sr);
    StereoBuffer mix =
        render_binaural(wearer, speaker, source, scene.acoustics,
                        derive_seed(scene.seed, 4));
    const auto wearer_src = make_speech_surrogate(derive_seed(scene.seed, 5),
                                                  n_samples, sr);
    add_wearer_speech(&mix, wearer_src, speech, scene.acoustics);

    bool snr_defined = true;
    if (std::isfinite(scene.snr_db)) {
      const auto noise_l = make_noise(derive_seed(scene.seed, 6), n_samples,
                                      scene.pink_noise);
      const auto noise_r = make_noise(derive_seed(scene.seed, 7), n_samples,
                                      scene.pink_noise);
      auto mixed_l = mix_at_snr(mix.left, noise_l, scene.snr_db);
      auto mixed_r = mix_at_snr(mix.right, noise_r, scene.snr_db);
      snr_defined = mixed_l.snr_defined && mixed_r.snr_defined;
      mix.left = std::move(mixed_l.wave);
      mix.right = std::move(mixed_r.wave);
      for (auto* ch : {&mix.left, &mix.right}) {
        for (auto& s : *ch) s = std::clamp(s, -1.0, 1.0);
      }
    }

    const int clip_samples =
        static_cast<int>(std::llround(scene.clip_frames / scene.fps * sr));
    for (auto& row : rows) {
      row.snr_defined = snr_defined;

      const int start = std::min(
          static_cast<int>(std::llround(row.clip_start_s * sr)),
          std::max(0, n_samples - clip_samples));
      StereoBuffer clip;
      clip.sample_rate = sr;
      clip.left.assign(mix.left.begin() + start,
                       mix.left.begin() + start + clip_samples);
      clip.right.assign(mix.right.begin() + start,
                        mix.right.begin() + start + clip_samples);
      write_wav(out_dir / row.wav_path, clip);

      const FrameImage frame =
          render_frame(row.wearer, row.speaker, scene.camera,
                       derive_seed(scene.seed, 8));
      write_png(out_dir / row.png_path, frame);
    }
    manifest.rows.insert(manifest.rows.end(), rows.begin(), rows.end());
  }

  const auto manifest_path = out_dir / "manifest.jsonl";
  std::ofstream os(manifest_path, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw std::runtime_error("dataset: cannot open " + manifest_path.string());
  }
  for (const auto& r : manifest.rows) {
    json j{{"scene", r.scene_id},
           {"chunk", r.chunk_idx},
           {"split", r.split},
           {"t", r.t_s},
           {"clip_start", r.clip_start_s},
           {"wearer", pose_json(r.wearer)},
           {"speaker", pose_json(r.speaker)},
           {"azimuth", r.azimuth_deg},
           {"azimuth_bin", r.azimuth_bin},
           {"in_fov", r.in_fov},
           {"wearer_speaking", r.wearer_speaking},
           {"snr_defined", r.snr_defined},
           {"wav", r.wav_path},
           {"png", r.png_path}};
    os << j.dump() << '\n';
  }
  if (!os) {
    throw std::runtime_error("dataset: write failed for " +
                             manifest_path.string());
  }
  return manifest;
}

DatasetManifest read_manifest(const std::filesystem::path& manifest_path) {
  std::ifstream is(manifest_path, std::ios::binary);
  if (!is) {
    throw std::runtime_error("dataset: cannot open " + manifest_path.string());
  }
  DatasetManifest manifest;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    ChunkRecord r;
    r.scene_id = j.at("scene").get<int>();
    r.chunk_idx = j.at("chunk").get<int>();
    r.split = j.at("split").get<std::string>();
    r.t_s = j.at("t").get<double>();
    r.clip_start_s = j.at("clip_start").get<double>();
    r.wearer = pose_from_json(j.at("wearer"));
    r.speaker = pose_from_json(j.at("speaker"));
    r.azimuth_deg = j.at("azimuth").get<double>();
    r.azimuth_bin = j.at("azimuth_bin").get<int>();
    r.in_fov = j.at("in_fov").get<bool>();
    r.wearer_speaking = j.at("wearer_speaking").get<bool>();
    r.snr_defined = j.at("snr_defined").get<bool>();
    r.wav_path = j.at("wav").get<std::string>();
    r.png_path = j.at("png").get<std::string>();
    manifest.rows.push_back(std::move(r));
  }
  return manifest;
}

}  // namespace egodoa
