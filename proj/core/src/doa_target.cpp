#include "egodoa/doa_target.hpp"

#include <cmath>
#include <stdexcept>

namespace egodoa {

DoaTarget gaussian_target(int theta_deg, double sigma_deg) {
  if (theta_deg < 0 || theta_deg >= kDoaBins) {
    throw std::invalid_argument("gaussian_target: theta outside [0, 360)");
  }
  if (!(sigma_deg > 0.0)) {
    throw std::invalid_argument("gaussian_target: sigma must be positive");
  }

  DoaTarget out;
  out.theta_deg = theta_deg;
  out.sigma_deg = sigma_deg;
  out.p.resize(kDoaBins);

  for (int i = 0; i < kDoaBins; ++i) {
    double d = std::fabs(static_cast<double>(i - theta_deg));
    if (d > 180.0) d = 360.0 - d;
    out.p(i) = std::exp(-0.5 * (d / sigma_deg) * (d / sigma_deg));
  }
  out.p /= out.p.sum();
  return out;
}

}  // namespace egodoa
