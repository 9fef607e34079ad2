#ifndef EGODOA_DOA_TARGET_HPP_
#define EGODOA_DOA_TARGET_HPP_

#include <Eigen/Dense>

namespace egodoa {

inline constexpr int kDoaBins = 360;

// 360-bin probability vector: wrapped Gaussian centered on the ground
// truth degree, normalized to sum 1.
struct DoaTarget {
  Eigen::VectorXd p;  // length 360
  int theta_deg = 0;
  double sigma_deg = 4.0;
};

// Throws std::invalid_argument on theta outside [0, 360) or sigma <= 0.
DoaTarget gaussian_target(int theta_deg, double sigma_deg);

}  // namespace egodoa

#endif  // EGODOA_DOA_TARGET_HPP_
