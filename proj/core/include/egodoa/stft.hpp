#ifndef EGODOA_STFT_HPP_
#define EGODOA_STFT_HPP_

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace egodoa {

// T frames x (window/2 + 1) bins, Hann-windowed.
struct StftFrames {
  Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic> data;
  int window = 1024;
  int hop = 320;
  double sample_rate = 16000.0;

  int frames() const { return static_cast<int>(data.rows()); }
  int bins() const { return static_cast<int>(data.cols()); }
};

// Throws std::invalid_argument when the input is shorter than one window.
StftFrames stft(const std::vector<double>& wave, int window, int hop,
                double sample_rate);

}  // namespace egodoa

#endif  // EGODOA_STFT_HPP_
