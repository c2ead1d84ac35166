#include "levy/fft.hpp"

#include <cstring>
#include <mutex>

#include <fftw3.h>

#include "levy/errors.hpp"

namespace levy {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct RealFFT::Impl {
  int n;
  double* real;
  fftw_complex* spec;
  fftw_plan fwd, inv;
};

RealFFT::RealFFT(int n) : p_(std::make_unique<Impl>()) {
  if (n < 2 || n % 2) throw ConfigError("FFT length must be even and >= 2");
  p_->n = n;
  std::lock_guard<std::mutex> lock(planner_mutex());
  p_->real = fftw_alloc_real(n);
  p_->spec = fftw_alloc_complex(n / 2 + 1);
  p_->fwd = fftw_plan_dft_r2c_1d(n, p_->real, p_->spec, FFTW_ESTIMATE);
  p_->inv = fftw_plan_dft_c2r_1d(n, p_->spec, p_->real, FFTW_ESTIMATE);
}

RealFFT::~RealFFT() {
  if (!p_) return;
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(p_->fwd);
  fftw_destroy_plan(p_->inv);
  fftw_free(p_->real);
  fftw_free(p_->spec);
}

RealFFT::RealFFT(RealFFT&&) noexcept = default;
RealFFT& RealFFT::operator=(RealFFT&&) noexcept = default;

int RealFFT::size() const { return p_->n; }

void RealFFT::forward(const double* in, std::complex<double>* out) {
  std::memcpy(p_->real, in, sizeof(double) * p_->n);
  fftw_execute(p_->fwd);
  std::memcpy(static_cast<void*>(out), p_->spec, sizeof(fftw_complex) * (p_->n / 2 + 1));
}

void RealFFT::inverse(const std::complex<double>* in, double* out) {
  std::memcpy(p_->spec, in, sizeof(fftw_complex) * (p_->n / 2 + 1));
  fftw_execute(p_->inv);
  std::memcpy(out, p_->real, sizeof(double) * p_->n);
}

long next_power_of_two(long n) {
  long p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace levy
