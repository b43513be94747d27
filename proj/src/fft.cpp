#include "blreg/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace blreg {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int wrap(int k, int n) { return ((k % n) + n) % n; }

}  // namespace

const RealFft& RealFft::get(const Dims3& dims) {
  static std::map<Dims3, std::unique_ptr<RealFft>> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = cache.find(dims);
  if (it == cache.end()) {
    it = cache.emplace(dims, std::unique_ptr<RealFft>(new RealFft(dims))).first;
  }
  return *it->second;
}

RealFft::RealFft(const Dims3& dims) : dims_(dims) {
  for (int n : dims) {
    if (n < 1) throw std::invalid_argument("RealFft: non-positive grid extent");
  }
  std::vector<double> real(real_size());
  std::vector<Complex> half(half_size());
  auto* cplx = reinterpret_cast<fftw_complex*>(half.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  // FFTW is row-major with the last index fastest, so the axes are reversed.
  forward_plan_ = fftw_plan_dft_r2c_3d(dims[2], dims[1], dims[0], real.data(), cplx, flags);
  backward_plan_ = fftw_plan_dft_c2r_3d(dims[2], dims[1], dims[0], cplx, real.data(), flags);
  if (!forward_plan_ || !backward_plan_) throw std::runtime_error("RealFft: FFTW planning failed");
}

// Plans live in a process-wide cache and are released at exit only.
RealFft::~RealFft() {
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

std::size_t RealFft::half_index(int k0, int k1, int k2) const {
  const int h0 = dims_[0] / 2 + 1;
  return std::size_t(k0) + std::size_t(h0) * (std::size_t(wrap(k1, dims_[1])) + std::size_t(dims_[1]) * wrap(k2, dims_[2]));
}

void RealFft::forward(std::span<const double> in, std::span<Complex> out) const {
  if (in.size() != real_size() || out.size() != half_size()) {
    throw std::invalid_argument("RealFft::forward: buffer size mismatch");
  }
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft::backward(std::span<Complex> in, std::span<double> out) const {
  if (in.size() != half_size() || out.size() != real_size()) {
    throw std::invalid_argument("RealFft::backward: buffer size mismatch");
  }
  fftw_execute_dft_c2r(static_cast<fftw_plan>(backward_plan_), reinterpret_cast<fftw_complex*>(in.data()),
                       out.data());
}

}  // namespace blreg
