#ifndef EGODOA_FFT_HPP_
#define EGODOA_FFT_HPP_

#include <complex>
#include <vector>

namespace egodoa {

// Forward real FFT: n real samples -> n/2 + 1 complex bins.
std::vector<std::complex<double>> rfft(const std::vector<double>& x);

// Inverse of rfft: n/2 + 1 bins -> n real samples (already scaled by 1/n).
std::vector<double> irfft(const std::vector<std::complex<double>>& spec, int n);

// Linear convolution via FFT, output length a.size() + b.size() - 1.
std::vector<double> fft_convolve(const std::vector<double>& a,
                                 const std::vector<double>& b);

}  // namespace egodoa

#endif  // EGODOA_FFT_HPP_
