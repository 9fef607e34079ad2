#ifndef EGODOA_ACOUSTICS_HPP_
#define EGODOA_ACOUSTICS_HPP_

#include <cstdint>
#include <vector>

#include "egodoa/geometry.hpp"
#include "egodoa/trajectory.hpp"

namespace egodoa {

struct AcousticsConfig {
  double sample_rate = 16000.0;
  double sound_speed = 343.0;
  double mic_spacing = 0.16;
  double head_shadow_strength = 0.8;
  double reverb_tail_s = 0.0;
  double source_level_dbfs = -20.0;
};

// Two-channel audio: channel 0 = left ear, channel 1 = right ear.
struct StereoBuffer {
  std::vector<double> left;
  std::vector<double> right;
  double sample_rate = 16000.0;

  int samples() const { return static_cast<int>(left.size()); }
};

struct ClipAnnotation {
  double azimuth_deg = 0.0;
  bool in_fov = false;
  Pose wearer;
  Pose speaker;
  bool wearer_speaking = false;
  bool snr_defined = true;
};

struct BinauralClip {
  StereoBuffer audio;
  ClipAnnotation annotation;
};

// Renders the speaker source as heard at the wearer's two ears:
// per-sample propagation delay (fractional, 4x oversampled read pointer),
// 1/max(r, 0.3) decay, azimuth-dependent head shadow, optional diffuse
// exponential reverb tail. Doppler arises from the time-varying delay.
// Throws std::invalid_argument on a sample-rate/duration mismatch.
StereoBuffer render_binaural(const Trajectory& wearer,
                             const Trajectory& speaker,
                             const std::vector<double>& source,
                             const AcousticsConfig& cfg,
                             std::uint64_t reverb_seed = 0);

// Adds the wearer's own speech: near-field, near-zero ITD, high level.
void add_wearer_speech(StereoBuffer* mix, const std::vector<double>& source,
                       const std::vector<std::pair<double, double>>& on_segments,
                       const AcousticsConfig& cfg);

struct MixResult {
  std::vector<double> wave;
  bool snr_defined = true;  // false when the clean signal was all-zero
};

// output = clean + g * noise with g chosen to hit snr_db. An infinite
// snr_db returns the clean signal unchanged. Throws std::invalid_argument
// on all-zero noise.
MixResult mix_at_snr(const std::vector<double>& clean,
                     const std::vector<double>& noise, double snr_db);

// Deterministic speech surrogate: a harmonic tone with slowly wandering
// fundamental and syllable-rate amplitude modulation.
std::vector<double> make_speech_surrogate(std::uint64_t seed, int samples,
                                          double sample_rate);

// White or pink noise, unit RMS.
std::vector<double> make_noise(std::uint64_t seed, int samples, bool pink);

}  // namespace egodoa

#endif  // EGODOA_ACOUSTICS_HPP_
