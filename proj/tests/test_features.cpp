#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>

#include <complex>

#include "egodoa/doa_target.hpp"
#include "egodoa/feature_cache.hpp"
#include "egodoa/fft.hpp"
#include "egodoa/gcc_phat.hpp"
#include "egodoa/patches.hpp"
#include "egodoa/stft.hpp"

using namespace egodoa;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> white(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> out(n);
  for (double& v : out) v = dist(rng);
  return out;
}

// Direct time-domain normalized cross-correlation argmax (the oracle for
// the GCC-PHAT lag).
int xcorr_peak_lag(const std::vector<double>& a, const std::vector<double>& b,
                   int max_lag) {
  double best = -1e300;
  int best_lag = 0;
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    double s = 0.0;
    for (int i = 0; i < static_cast<int>(a.size()); ++i) {
      const int j = i + lag;
      if (j >= 0 && j < static_cast<int>(b.size())) s += a[i] * b[j];
    }
    if (s > best) {
      best = s;
      best_lag = lag;
    }
  }
  return best_lag;
}

int gcc_avg_peak(const GccPhatFeature& feat) {
  Eigen::VectorXd avg = feat.data.colwise().mean();
  int peak = 0;
  avg.maxCoeff(&peak);
  return peak - feat.zero_lag_col();
}

}  // namespace

TEST_CASE("stft: zero input gives zero frames") {
  const auto frames = stft(std::vector<double>(4096, 0.0), 1024, 320, 16000.0);
  CHECK(frames.data.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stft: frame count formula") {
  const auto frames = stft(std::vector<double>(16000, 0.0), 1024, 320, 16000.0);
  CHECK(frames.frames() == 47);
  CHECK(frames.bins() == 513);
  CHECK_THROWS_AS(stft(std::vector<double>(100, 0.0), 1024, 320, 16000.0),
                  std::invalid_argument);
}

TEST_CASE("stft: bin-center sine concentrates in one bin") {
  // f = 32 * 16000 / 1024 = 500 Hz sits exactly on bin 32.
  const int bin = 32;
  const double f = bin * 16000.0 / 1024.0;
  std::vector<double> wave(8000);
  for (size_t i = 0; i < wave.size(); ++i) {
    wave[i] = std::sin(2.0 * kPi * f * i / 16000.0);
  }
  const auto frames = stft(wave, 1024, 320, 16000.0);
  for (int t = 0; t < frames.frames(); ++t) {
    int peak = 0;
    frames.data.row(t).cwiseAbs().maxCoeff(&peak);
    CHECK(peak == bin);
  }
}

TEST_CASE("gcc_phat: identical channels peak at lag 0") {
  const auto wave = white(1, 8000);
  const auto s = stft(wave, 1024, 320, 16000.0);
  const auto feat = gcc_phat(s, s, 96);
  CHECK(feat.frames() == s.frames());
  CHECK(feat.lags() == 96);
  for (int t = 0; t < feat.frames(); ++t) {
    int peak = 0;
    feat.data.row(t).maxCoeff(&peak);
    CHECK(peak == feat.zero_lag_col());
  }
}

TEST_CASE("gcc_phat: 100 random integer delays match the xcorr oracle") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> delay(-40, 40);
  int hits = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = delay(rng);
    const auto base = white(100 + trial, 8200);
    // Channel 2 delayed by d relative to channel 1: ch2[i] = ch1[i - d];
    // channel 1 leads for d > 0, so the declared convention puts the
    // peak at +d.
    std::vector<double> ch1(8000), ch2(8000);
    for (int i = 0; i < 8000; ++i) {
      ch1[i] = base[i + 80];
      ch2[i] = base[i + 80 - d];
    }
    const auto s1 = stft(ch1, 1024, 320, 16000.0);
    const auto s2 = stft(ch2, 1024, 320, 16000.0);
    const int lag = gcc_avg_peak(gcc_phat(s1, s2, 96));
    if (std::abs(lag - d) <= 1) ++hits;
    // Oracle agreement on the same signals.
    CHECK(xcorr_peak_lag(ch1, ch2, 47) == d);
  }
  CHECK(hits >= 99);
}

TEST_CASE("gcc_phat: PHAT whitening bounds every value") {
  const auto s1 = stft(white(5, 8000), 1024, 320, 16000.0);
  const auto s2 = stft(white(6, 8000), 1024, 320, 16000.0);
  const auto feat = gcc_phat(s1, s2, 96);
  CHECK(feat.data.cwiseAbs().maxCoeff() <= 1.0 + 1e-6);
  CHECK_THROWS_AS(gcc_phat(s1, stft(white(6, 4000), 1024, 320, 16000.0), 96),
                  std::invalid_argument);
}

TEST_CASE("srp_phat_doa: synthetic far-field delays across a 1-degree sweep") {
  AcousticsConfig cfg;
  const double d_samples =
      cfg.mic_spacing / cfg.sound_speed * cfg.sample_rate;

  // Random band-limited periodic source; fractional delays applied
  // exactly in the frequency domain (DC and Nyquist zeroed), split
  // symmetrically across the two channels.
  const int n = 8192;
  std::mt19937_64 rng(77);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<std::complex<double>> spec(n / 2 + 1, 0.0);
  for (int k = 1; k < n / 2; ++k) spec[k] = {dist(rng), dist(rng)};

  for (int az = 0; az < 360; az += 1) {
    // Positive lag = channel 1 (left) leads; a source at azimuth az gives
    // tau = -d*cos(az)/c on that convention.
    const double lag = -d_samples * std::cos(az * kPi / 180.0);
    std::vector<std::complex<double>> s1(spec), s2(spec);
    for (int k = 0; k <= n / 2; ++k) {
      const double w = 2.0 * kPi * k / n;
      s1[k] *= std::exp(std::complex<double>(0.0, +w * lag / 2.0));
      s2[k] *= std::exp(std::complex<double>(0.0, -w * lag / 2.0));
    }
    const auto ch1 = irfft(s1, n);
    const auto ch2 = irfft(s2, n);
    const auto f1 = stft(ch1, 1024, 320, 16000.0);
    const auto f2 = stft(ch2, 1024, 320, 16000.0);
    const auto res = srp_phat_doa(gcc_phat(f1, f2, 96), cfg);
    CHECK_FALSE(res.low_confidence);
    // A two-microphone left-right pair cannot separate front from back:
    // azimuths az and -az produce the identical lag, so the aliased
    // "back image" of az is 360 - az.
    const double ae = cyclic_abs_error(res.azimuth.deg, az);
    const double back_ae = cyclic_abs_error(res.azimuth.deg, wrap_deg(-az));
    CHECK(std::min(ae, back_ae) <= 2.0);
  }
}

TEST_CASE("srp_phat_doa: silence falls back to boresight with a flag") {
  const auto s = stft(std::vector<double>(8000, 0.0), 1024, 320, 16000.0);
  const auto res = srp_phat_doa(gcc_phat(s, s, 96), AcousticsConfig{});
  CHECK(res.low_confidence);
  CHECK(res.azimuth.deg == doctest::Approx(90.0));
}

TEST_CASE("patchify: shapes and constant image") {
  FrameImage img;
  img.height = 224;
  img.width = 224;
  img.rgb.assign(224 * 224 * 3, 37);
  const auto seq = patchify(img, 16);
  CHECK(seq.patches() == 196);
  CHECK(seq.dims() == 768);
  for (int i = 1; i < seq.patches(); ++i) {
    CHECK((seq.data.row(i).array() == seq.data.row(0).array()).all());
  }
  CHECK(seq.data(0, 0) == doctest::Approx(37.0 / 255.0));
  CHECK_THROWS_AS(patchify(img, 15), std::invalid_argument);
}

TEST_CASE("patchify/unpatchify is a bit-exact bijection") {
  std::mt19937_64 rng(8);
  FrameImage img;
  img.height = 64;
  img.width = 96;
  img.rgb.resize(64 * 96 * 3);
  for (auto& v : img.rgb) v = static_cast<std::uint8_t>(rng());
  const auto seq = patchify(img, 16);
  const auto back = unpatchify(seq, img.height, img.width);
  CHECK(back.rgb == img.rgb);
}

TEST_CASE("gaussian_target: peak, normalization, wrap symmetry") {
  for (double sigma : {1.0, 5.0, 10.0}) {
    const auto t = gaussian_target(90, sigma);
    int peak = 0;
    t.p.maxCoeff(&peak);
    CHECK(peak == 90);
    CHECK(t.p.sum() == doctest::Approx(1.0).epsilon(1e-6));
  }
  const auto t0 = gaussian_target(0, 4.0);
  CHECK(t0.p(359) == doctest::Approx(t0.p(1)).epsilon(1e-12));
}

TEST_CASE("gaussian_target: index rotation invariance") {
  const auto a = gaussian_target(10, 4.0);
  const auto b = gaussian_target(200, 4.0);
  for (int i = 0; i < 360; ++i) {
    CHECK(a.p(i) == doctest::Approx(b.p((i + 190) % 360)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(gaussian_target(-1, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_target(0, 0.0), std::invalid_argument);
}

TEST_CASE("feature cache round-trips and rejects stale hashes") {
  FeaturizeConfig cfg;
  const std::string hash = feature_config_hash(cfg);
  FeaturizeConfig other = cfg;
  other.hop = 321;
  CHECK(feature_config_hash(other) != hash);

  ChunkFeatures feat;
  feat.gcc = Eigen::MatrixXd::Random(22, 96).cwiseAbs();
  feat.patch_rows = 4;
  feat.patch_cols = 768;
  feat.patches_u8.resize(4 * 768);
  std::mt19937_64 rng(9);
  for (auto& v : feat.patches_u8) v = static_cast<std::uint8_t>(rng());

  const auto path = std::filesystem::temp_directory_path() / "egodoa.feat";
  write_chunk_features(path, feat, hash);
  CHECK(chunk_features_valid(path, hash));
  CHECK_FALSE(chunk_features_valid(path, feature_config_hash(other)));

  const auto rt = read_chunk_features(path, hash);
  CHECK(rt.patches_u8 == feat.patches_u8);
  CHECK((rt.gcc.cast<float>().array() == feat.gcc.cast<float>().array()).all());
  CHECK_THROWS_AS(read_chunk_features(path, "deadbeef"), std::runtime_error);
  std::filesystem::remove(path);
}
