#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>

namespace blreg {

using Complex = std::complex<double>;
using Dims3 = std::array<int, 3>;

/// Real-to-complex / complex-to-real transforms on a periodic 3D grid whose
/// axis 0 varies fastest. Degenerate axes have extent 1. The half spectrum
/// keeps n0/2+1 entries along axis 0.
///
/// Plans are created once per grid shape with FFTW_ESTIMATE so results are
/// reproducible run to run. Execution is thread-safe.
class RealFft {
 public:
  static const RealFft& get(const Dims3& dims);

  const Dims3& dims() const { return dims_; }
  std::size_t real_size() const { return std::size_t(dims_[0]) * dims_[1] * dims_[2]; }
  std::size_t half_size() const { return std::size_t(dims_[0] / 2 + 1) * dims_[1] * dims_[2]; }
  std::size_t half_index(int k0, int k1, int k2) const;

  /// Unnormalized forward transform (exponent sign -1).
  void forward(std::span<const double> in, std::span<Complex> out) const;
  /// Unnormalized backward transform (exponent sign +1). Clobbers `in`.
  void backward(std::span<Complex> in, std::span<double> out) const;

  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  ~RealFft();

 private:
  explicit RealFft(const Dims3& dims);

  Dims3 dims_;
  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
};

}  // namespace blreg
