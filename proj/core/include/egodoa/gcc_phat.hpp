#ifndef EGODOA_GCC_PHAT_HPP_
#define EGODOA_GCC_PHAT_HPP_

#include <Eigen/Dense>

#include "egodoa/acoustics.hpp"
#include "egodoa/geometry.hpp"
#include "egodoa/stft.hpp"

namespace egodoa {

// L_a frames x Z lag coefficients, PHAT-normalized so |value| <= 1 + eps.
// Column Z/2 is lag 0. Lag-sign convention: positive lag means channel 1
// leads (the signal reaches channel 1 earlier than channel 2).
struct GccPhatFeature {
  Eigen::MatrixXd data;
  double sample_rate = 16000.0;

  int frames() const { return static_cast<int>(data.rows()); }
  int lags() const { return static_cast<int>(data.cols()); }
  int zero_lag_col() const { return lags() / 2; }
};

// Throws std::invalid_argument on shape mismatch or n_lags > window.
GccPhatFeature gcc_phat(const StftFrames& ch1, const StftFrames& ch2,
                        int n_lags);

struct SrpResult {
  AzimuthDeg azimuth;
  bool low_confidence = false;  // silence fallback: boresight returned
};

// Steered-response argmax over a 1-degree azimuth grid. Front-back
// ambiguous by construction; the back image is reported as-is.
SrpResult srp_phat_doa(const GccPhatFeature& feat, const AcousticsConfig& cfg);

}  // namespace egodoa

#endif  // EGODOA_GCC_PHAT_HPP_
