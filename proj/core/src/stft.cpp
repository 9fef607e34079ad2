#include "egodoa/stft.hpp"

#include <cmath>
#include <stdexcept>

#include "egodoa/fft.hpp"

namespace egodoa {

StftFrames stft(const std::vector<double>& wave, int window, int hop,
                double sample_rate) {
  const int n = static_cast<int>(wave.size());
  if (n < window) throw std::invalid_argument("stft: input shorter than window");
  if (hop <= 0 || window <= 0) throw std::invalid_argument("stft: bad framing");

  const int frames = (n - window) / hop + 1;
  const int bins = window / 2 + 1;

  std::vector<double> hann(window);
  constexpr double kPi = 3.14159265358979323846;
  for (int i = 0; i < window; ++i) {
    hann[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / window);
  }

  StftFrames out;
  out.window = window;
  out.hop = hop;
  out.sample_rate = sample_rate;
  out.data.resize(frames, bins);

  std::vector<double> buf(window);
  for (int t = 0; t < frames; ++t) {
    const int start = t * hop;
    for (int i = 0; i < window; ++i) buf[i] = wave[start + i] * hann[i];
    auto spec = rfft(buf);
    for (int f = 0; f < bins; ++f) out.data(t, f) = spec[f];
  }
  return out;
}

}  // namespace egodoa
