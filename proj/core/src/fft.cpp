#include "egodoa/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace egodoa {

namespace {

// FFTW plan creation is not thread-safe; executions on separate buffers are.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

struct R2cPlan {
  fftw_plan plan;
  double* in;
  fftw_complex* out;
  int n;
};

struct C2rPlan {
  fftw_plan plan;
  fftw_complex* in;
  double* out;
  int n;
};

R2cPlan& r2c_plan(int n) {
  static std::map<int, R2cPlan> plans;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = plans.find(n);
  if (it == plans.end()) {
    R2cPlan p;
    p.n = n;
    p.in = fftw_alloc_real(n);
    p.out = fftw_alloc_complex(n / 2 + 1);
    p.plan = fftw_plan_dft_r2c_1d(n, p.in, p.out, FFTW_ESTIMATE);
    it = plans.emplace(n, p).first;
  }
  return it->second;
}

C2rPlan& c2r_plan(int n) {
  static std::map<int, C2rPlan> plans;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = plans.find(n);
  if (it == plans.end()) {
    C2rPlan p;
    p.n = n;
    p.in = fftw_alloc_complex(n / 2 + 1);
    p.out = fftw_alloc_real(n);
    p.plan = fftw_plan_dft_c2r_1d(n, p.in, p.out, FFTW_ESTIMATE);
    it = plans.emplace(n, p).first;
  }
  return it->second;
}

// Plan buffers are shared, so executions must hold the lock too. Throughput
// here is dominated by everything around the FFT, not the FFT itself.
std::mutex& exec_mutex() {
  static std::mutex m;
  return m;
}

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

std::vector<std::complex<double>> rfft(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  if (n < 2) throw std::invalid_argument("rfft: input too short");
  std::lock_guard<std::mutex> lock(exec_mutex());
  R2cPlan& p = r2c_plan(n);
  for (int i = 0; i < n; ++i) p.in[i] = x[i];
  fftw_execute(p.plan);
  std::vector<std::complex<double>> out(n / 2 + 1);
  for (int i = 0; i <= n / 2; ++i) out[i] = {p.out[i][0], p.out[i][1]};
  return out;
}

std::vector<double> irfft(const std::vector<std::complex<double>>& spec, int n) {
  if (static_cast<int>(spec.size()) != n / 2 + 1) {
    throw std::invalid_argument("irfft: spectrum size does not match n");
  }
  std::lock_guard<std::mutex> lock(exec_mutex());
  C2rPlan& p = c2r_plan(n);
  for (int i = 0; i <= n / 2; ++i) {
    p.in[i][0] = spec[i].real();
    p.in[i][1] = spec[i].imag();
  }
  fftw_execute(p.plan);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = p.out[i] / n;
  return out;
}

std::vector<double> fft_convolve(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  const int out_len = static_cast<int>(a.size() + b.size()) - 1;
  const int n = next_pow2(out_len);
  std::vector<double> pa(n, 0.0), pb(n, 0.0);
  std::copy(a.begin(), a.end(), pa.begin());
  std::copy(b.begin(), b.end(), pb.begin());
  auto sa = rfft(pa);
  auto sb = rfft(pb);
  for (size_t i = 0; i < sa.size(); ++i) sa[i] *= sb[i];
  auto full = irfft(sa, n);
  full.resize(out_len);
  return full;
}

}  // namespace egodoa
