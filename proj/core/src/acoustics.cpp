#include "egodoa/acoustics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "egodoa/fft.hpp"

namespace egodoa {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNearFieldClampM = 0.3;
constexpr int kOversample = 4;

// Catmull-Rom 4x oversampling; subsequent reads use linear interpolation
// on the oversampled pointer.
std::vector<double> oversample4x(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> out(static_cast<size_t>(n) * kOversample);
  auto sample = [&](int i) {
    return x[std::clamp(i, 0, n - 1)];
  };
  for (int i = 0; i < n; ++i) {
    const double p0 = sample(i - 1), p1 = sample(i), p2 = sample(i + 1),
                 p3 = sample(i + 2);
    for (int k = 0; k < kOversample; ++k) {
      const double t = k / static_cast<double>(kOversample);
      out[static_cast<size_t>(i) * kOversample + k] =
          p1 + 0.5 * t *
                   (p2 - p0 +
                    t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                         t * (3.0 * (p1 - p2) + p3 - p0)));
    }
  }
  return out;
}

double read_oversampled(const std::vector<double>& os, double sample_pos) {
  const double pos = sample_pos * kOversample;
  if (pos <= 0.0) return 0.0;
  const size_t i = static_cast<size_t>(pos);
  if (i + 1 >= os.size()) return 0.0;
  const double frac = pos - static_cast<double>(i);
  return (1.0 - frac) * os[i] + frac * os[i + 1];
}

struct Vec3 {
  double x, y, z;
};

double dist(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double rms(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s / std::max<size_t>(x.size(), 1));
}

}  // namespace

StereoBuffer render_binaural(const Trajectory& wearer,
                             const Trajectory& speaker,
                             const std::vector<double>& source,
                             const AcousticsConfig& cfg,
                             std::uint64_t reverb_seed) {
  if (wearer.tick_rate_hz != speaker.tick_rate_hz) {
    throw std::invalid_argument("render_binaural: trajectory tick rates differ");
  }
  const double duration = std::min(wearer.duration_s(), speaker.duration_s());
  const int n = static_cast<int>(std::round(duration * cfg.sample_rate));
  if (static_cast<int>(source.size()) < n) {
    throw std::invalid_argument("render_binaural: source shorter than scene");
  }

  const std::vector<double> os = oversample4x(source);
  const double c = cfg.sound_speed;
  const double gain0 = std::pow(10.0, cfg.source_level_dbfs / 20.0);
  const double fs = cfg.sample_rate;

  StereoBuffer out;
  out.sample_rate = fs;
  out.left.assign(n, 0.0);
  out.right.assign(n, 0.0);

  // One-pole head-shadow filter state per ear.
  double lp_l = 0.0, lp_r = 0.0;

  for (int i = 0; i < n; ++i) {
    const double t = i / fs;
    const Pose wp = wearer.at(t);
    const Pose sp0 = speaker.at(t);
    const HeadingBasis b = heading_basis(wp.yaw_deg);

    const Vec3 head{wp.x, wp.y, wp.z};
    const double half = cfg.mic_spacing / 2.0;
    const Vec3 ear_r{wp.x + half * b.right_x, wp.y, wp.z + half * b.right_z};
    const Vec3 ear_l{wp.x - half * b.right_x, wp.y, wp.z - half * b.right_z};

    // One fixed-point refinement of the emission time per ear.
    auto ear_sample = [&](const Vec3& ear) {
      const Vec3 s0{sp0.x, sp0.y, sp0.z};
      const double tau0 = dist(s0, ear) / c;
      const Pose spe = speaker.at(t - tau0);
      const Vec3 s1{spe.x, spe.y, spe.z};
      const double tau = dist(s1, ear) / c;
      const double r = std::max(dist(s1, ear), kNearFieldClampM);
      return std::pair<double, double>{(t - tau) * fs, gain0 / r};
    };

    const auto [pos_l, g_l] = ear_sample(ear_l);
    const auto [pos_r, g_r] = ear_sample(ear_r);

    // Wearer-frame source direction for the shadow model.
    const double dx = sp0.x - head.x, dz = sp0.z - head.z;
    const double norm = std::max(std::hypot(dx, dz), 1e-9);
    const double rightc = (dx * b.right_x + dz * b.right_z) / norm;
    const double fwdc = (dx * b.fwd_x + dz * b.fwd_z) / norm;
    const double rear = std::max(0.0, -fwdc);
    const double s_l = cfg.head_shadow_strength *
                       std::min(1.0, 0.8 * std::max(0.0, rightc) + 0.4 * rear);
    const double s_r = cfg.head_shadow_strength *
                       std::min(1.0, 0.8 * std::max(0.0, -rightc) + 0.4 * rear);

    const double x_l = read_oversampled(os, pos_l) * g_l * (1.0 - 0.35 * s_l);
    const double x_r = read_oversampled(os, pos_r) * g_r * (1.0 - 0.35 * s_r);

    auto one_pole = [&](double& state, double x, double shadow) {
      const double fc = 7000.0 * (1.0 - shadow) + 500.0 * shadow;
      const double alpha = 1.0 - std::exp(-2.0 * kPi * fc / fs);
      state += alpha * (x - state);
      return state;
    };
    out.left[i] = one_pole(lp_l, x_l, s_l);
    out.right[i] = one_pole(lp_r, x_r, s_r);
  }

  if (cfg.reverb_tail_s > 0.0) {
    const int ir_len = static_cast<int>(cfg.reverb_tail_s * fs);
    std::mt19937_64 rng(reverb_seed ^ 0x7265766572626572ULL);
    std::normal_distribution<double> dist01(0.0, 1.0);
    const double wet = 0.25;
    for (std::vector<double>* ch : {&out.left, &out.right}) {
      std::vector<double> ir(ir_len);
      double energy = 0.0;
      for (int i = 0; i < ir_len; ++i) {
        ir[i] = dist01(rng) * std::exp(-6.907 * i / ir_len);
        energy += ir[i] * ir[i];
      }
      const double scale = wet / std::sqrt(std::max(energy, 1e-12));
      for (double& v : ir) v *= scale;
      const auto rev = fft_convolve(*ch, ir);
      for (int i = 0; i < n; ++i) (*ch)[i] += rev[i];
    }
  }

  for (std::vector<double>* ch : {&out.left, &out.right}) {
    for (double& v : *ch) v = std::clamp(v, -1.0, 1.0);
  }
  return out;
}

void add_wearer_speech(StereoBuffer* mix, const std::vector<double>& source,
                       const std::vector<std::pair<double, double>>& on_segments,
                       const AcousticsConfig& cfg) {
  const double fs = mix->sample_rate;
  const int n = mix->samples();
  const double level = std::pow(10.0, (cfg.source_level_dbfs + 8.0) / 20.0);
  const double ramp_s = 0.01;

  for (int i = 0; i < n && i < static_cast<int>(source.size()); ++i) {
    const double t = i / fs;
    double gate = 0.0;
    for (const auto& [on, off] : on_segments) {
      if (t >= on - ramp_s && t <= off + ramp_s) {
        double g = 1.0;
        if (t < on) g = (t - (on - ramp_s)) / ramp_s;
        if (t > off) g = ((off + ramp_s) - t) / ramp_s;
        gate = std::max(gate, std::clamp(g, 0.0, 1.0));
      }
    }
    if (gate <= 0.0) continue;
    // Own voice: near field, the same signal at both ears.
    const double v = source[i] * level * gate;
    mix->left[i] = std::clamp(mix->left[i] + v, -1.0, 1.0);
    mix->right[i] = std::clamp(mix->right[i] + v, -1.0, 1.0);
  }
}

MixResult mix_at_snr(const std::vector<double>& clean,
                     const std::vector<double>& noise, double snr_db) {
  if (std::isinf(snr_db)) {
    return MixResult{clean, true};
  }
  if (noise.size() != clean.size()) {
    throw std::invalid_argument("mix_at_snr: length mismatch");
  }
  const double noise_rms = rms(noise);
  if (noise_rms <= 0.0) {
    throw std::invalid_argument("mix_at_snr: all-zero noise");
  }

  const double clean_rms = rms(clean);
  MixResult out;
  out.snr_defined = clean_rms > 0.0;
  // With a silent clean signal, the SNR is undefined; emit noise at a
  // nominal -26 dBFS reference instead.
  const double ref = out.snr_defined ? clean_rms : 0.05;
  const double g = ref / noise_rms * std::pow(10.0, -snr_db / 20.0);

  out.wave.resize(clean.size());
  for (size_t i = 0; i < clean.size(); ++i) {
    out.wave[i] = std::clamp(clean[i] + g * noise[i], -1.0, 1.0);
  }
  return out;
}

std::vector<double> make_speech_surrogate(std::uint64_t seed, int samples,
                                          double sample_rate) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Control points every 100 ms for f0 and the syllable gate.
  const int ctrl_hop = static_cast<int>(sample_rate / 10.0);
  const int n_ctrl = samples / ctrl_hop + 2;
  std::vector<double> f0_ctrl(n_ctrl), gate_ctrl(n_ctrl);
  double f0 = 120.0 + 100.0 * unit(rng);
  for (int i = 0; i < n_ctrl; ++i) {
    f0 = std::clamp(f0 + 12.0 * (unit(rng) - 0.5), 110.0, 240.0);
    f0_ctrl[i] = f0;
    gate_ctrl[i] = unit(rng) < 0.75 ? 1.0 : 0.0;
  }

  constexpr int kHarmonics = 10;
  std::vector<double> phase(kHarmonics, 0.0);
  std::vector<double> amp(kHarmonics);
  for (int k = 0; k < kHarmonics; ++k) amp[k] = 1.0 / (1.0 + k);

  std::vector<double> out(samples);
  double env = 0.0;
  for (int i = 0; i < samples; ++i) {
    const int ci = i / ctrl_hop;
    const double w = (i % ctrl_hop) / static_cast<double>(ctrl_hop);
    const double f = (1.0 - w) * f0_ctrl[ci] + w * f0_ctrl[ci + 1];
    const double gate = (1.0 - w) * gate_ctrl[ci] + w * gate_ctrl[ci + 1];
    env += 0.002 * (gate - env);  // ~10 ms smoothing at 16 kHz

    double v = 0.0;
    for (int k = 0; k < kHarmonics; ++k) {
      const double fk = f * (k + 1);
      if (fk >= 0.45 * sample_rate) break;
      phase[k] += 2.0 * kPi * fk / sample_rate;
      if (phase[k] > 2.0 * kPi) phase[k] -= 2.0 * kPi;
      v += amp[k] * std::sin(phase[k]);
    }
    out[i] = v * env;
  }

  const double r = rms(out);
  if (r > 0.0) {
    for (double& v : out) v /= r;
  }
  return out;
}

std::vector<double> make_noise(std::uint64_t seed, int samples, bool pink) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist01(0.0, 1.0);
  std::vector<double> out(samples);

  if (!pink) {
    for (double& v : out) v = dist01(rng);
  } else {
    // Paul Kellet's three-pole pink approximation.
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    for (double& v : out) {
      const double white = dist01(rng);
      b0 = 0.99765 * b0 + white * 0.0990460;
      b1 = 0.96300 * b1 + white * 0.2965164;
      b2 = 0.57000 * b2 + white * 1.0526913;
      v = b0 + b1 + b2 + white * 0.1848;
    }
  }

  const double r = rms(out);
  for (double& v : out) v /= r;
  return out;
}

}  // namespace egodoa
