#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace levy {

/// Real-to-complex FFT of fixed length n backed by FFTW; each instance owns its buffers.
/// Plan creation is serialized internally; execution on distinct instances is thread safe.
class RealFFT {
 public:
  explicit RealFFT(int n);
  ~RealFFT();
  RealFFT(RealFFT&&) noexcept;
  RealFFT& operator=(RealFFT&&) noexcept;
  RealFFT(const RealFFT&) = delete;
  RealFFT& operator=(const RealFFT&) = delete;

  int size() const;
  /// out[k] = sum_j in[j] exp(-2 pi i j k / n), k = 0..n/2.
  void forward(const double* in, std::complex<double>* out);
  /// out[j] = sum_k in[k] exp(+2 pi i j k / n) over the Hermitian extension (no 1/n).
  void inverse(const std::complex<double>* in, double* out);

 private:
  struct Impl;
  std::unique_ptr<Impl> p_;
};

inline bool is_power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }
long next_power_of_two(long n);

}  // namespace levy
