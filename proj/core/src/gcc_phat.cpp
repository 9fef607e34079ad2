#include "egodoa/gcc_phat.hpp"

#include <cmath>
#include <stdexcept>

#include "egodoa/fft.hpp"

namespace egodoa {

namespace {
constexpr double kPhatFloor = 1e-8;
constexpr double kPi = 3.14159265358979323846;
}  // namespace

GccPhatFeature gcc_phat(const StftFrames& ch1, const StftFrames& ch2,
                        int n_lags) {
  if (ch1.data.rows() != ch2.data.rows() || ch1.data.cols() != ch2.data.cols()) {
    throw std::invalid_argument("gcc_phat: channel shape mismatch");
  }
  if (n_lags <= 0 || n_lags > ch1.window) {
    throw std::invalid_argument("gcc_phat: n_lags out of range");
  }

  const int frames = ch1.frames();
  const int bins = ch1.bins();
  const int n = ch1.window;
  const int half = n_lags / 2;

  GccPhatFeature out;
  out.sample_rate = ch1.sample_rate;
  out.data.resize(frames, n_lags);

  std::vector<std::complex<double>> cross(bins);
  for (int t = 0; t < frames; ++t) {
    for (int f = 0; f < bins; ++f) {
      // Positive lag = channel 1 leads; see header.
      const std::complex<double> c = ch2.data(t, f) * std::conj(ch1.data(t, f));
      cross[f] = c / std::max(std::abs(c), kPhatFloor);
    }
    // A coherent integer delay D yields a unit peak at lag D: the PHAT
    // spectrum is e^{-j2*pi*kD/n} and irfft maps that back to a delta.
    const auto cc = irfft(cross, n);
    for (int j = 0; j < n_lags; ++j) {
      const int lag = j - half;
      const int idx = ((lag % n) + n) % n;
      out.data(t, j) = cc[idx];
    }
  }
  return out;
}

SrpResult srp_phat_doa(const GccPhatFeature& feat, const AcousticsConfig& cfg) {
  const int n_lags = feat.lags();
  Eigen::VectorXd avg = feat.data.colwise().mean();

  if (avg.cwiseAbs().maxCoeff() < 1e-9) {
    return SrpResult{AzimuthDeg{90.0}, true};
  }

  const double half = feat.zero_lag_col();
  double best_power = -1e300;
  int best_az = 0;
  for (int az = 0; az < 360; ++az) {
    // Far field: left-minus-right path difference is d*cos(az), so the
    // channel-1-leads lag is -d*cos(az)/c (channel 1 = left ear).
    const double tau = -cfg.mic_spacing * std::cos(az * kPi / 180.0) /
                       cfg.sound_speed;
    const double lag_bin = half + tau * feat.sample_rate;
    const int lo = static_cast<int>(std::floor(lag_bin));
    if (lo < 0 || lo + 1 >= n_lags) continue;
    // Band-limited read-out at the fractional lag: windowed-sinc
    // interpolation resolves sub-sample peaks that nearest-bin or linear
    // reads would flatten near endfire, where d(tau)/d(az) vanishes.
    constexpr int kHalfWidth = 24;
    double power = 0.0;
    for (int k = std::max(0, lo - kHalfWidth);
         k <= std::min(n_lags - 1, lo + 1 + kHalfWidth); ++k) {
      const double u = lag_bin - k;
      const double core =
          std::fabs(u) < 1e-12 ? 1.0 : std::sin(kPi * u) / (kPi * u);
      const double taper =
          0.5 + 0.5 * std::cos(kPi * u / (kHalfWidth + 1.0));
      power += avg(k) * core * taper;
    }
    if (power > best_power) {
      best_power = power;
      best_az = az;
    }
  }
  return SrpResult{AzimuthDeg{static_cast<double>(best_az)}, false};
}

}  // namespace egodoa
