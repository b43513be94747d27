#include "blreg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "blreg/errors.hpp"

namespace blreg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSymmetryTolerance = 1e-10;

std::vector<double> realize(const BLField& f, int c, const Dims3& grid) {
  const RealFft& fft = RealFft::get(grid);
  std::vector<Complex> half(fft.half_size());
  const Dims3& K = f.domain().bounds();
  for (int k2 = -K[2]; k2 <= K[2]; ++k2)
    for (int k1 = -K[1]; k1 <= K[1]; ++k1)
      for (int k0 = 0; k0 <= K[0]; ++k0) half[fft.half_index(k0, k1, k2)] = f(c, k0, k1, k2);
  std::vector<double> out(fft.real_size());
  fft.backward(half, out);
  return out;
}

void truncate(std::span<const double> values, const Dims3& grid, BLField& out, int c) {
  const RealFft& fft = RealFft::get(grid);
  std::vector<Complex> half(fft.half_size());
  fft.forward(values, half);
  const double scale = 1.0 / double(fft.real_size());
  for_each_frequency(out.domain(), [&](int k0, int k1, int k2, std::size_t) {
    Complex value;
    if (k0 > 0) {
      value = half[fft.half_index(k0, k1, k2)];
    } else if (k0 < 0) {
      value = std::conj(half[fft.half_index(-k0, -k1, -k2)]);
    } else {
      value = 0.5 * (half[fft.half_index(0, k1, k2)] + std::conj(half[fft.half_index(0, -k1, -k2)]));
    }
    out(c, k0, k1, k2) = value * scale;
  });
}

void require_same_domain(const BLDomain& a, const BLDomain& b, const char* what) {
  if (!(a == b)) throw DomainMismatch(std::string(what) + ": operands live on different domains");
}

// Multiplies every component by the imaginary odd symbol i*w(k).
template <typename Symbol>
void multiply_imaginary(BLField& f, Symbol&& w) {
  for (int c = 0; c < f.components(); ++c) {
    for_each_frequency(f.domain(), [&](int k0, int k1, int k2, std::size_t) {
      Complex& a = f(c, k0, k1, k2);
      const double s = w(k0, k1, k2);
      a = Complex(-a.imag() * s, a.real() * s);
    });
  }
}

double wavenumber(int axis, int k0, int k1, int k2) {
  const int k[3] = {k0, k1, k2};
  return kTwoPi * k[axis];
}

}  // namespace

GridField include(const BLField& f) {
  if (f.symmetry_defect() > kSymmetryTolerance) {
    throw SymmetryViolation("include: spectrum is not conjugate-symmetric; its realization would be complex");
  }
  GridField out(f.domain(), f.components());
  for (int c = 0; c < f.components(); ++c) {
    const auto values = realize(f, c, f.domain().grid());
    std::ranges::copy(values, out.component(c).begin());
  }
  return out;
}

BLField project(const GridField& f) {
  BLField out(f.domain(), f.components());
  for (int c = 0; c < f.components(); ++c) truncate(f.component(c), f.domain().grid(), out, c);
  return out;
}

PaddedField realize_padded(const BLField& f) {
  PaddedField out{f.domain(), f.components(), {}};
  out.values.reserve(std::size_t(f.components()));
  for (int c = 0; c < f.components(); ++c) out.values.push_back(realize(f, c, f.domain().padded()));
  return out;
}

BLField truncate_padded(const PaddedField& f) {
  BLField out(f.domain, f.components);
  for (int c = 0; c < f.components; ++c) truncate(f.values[std::size_t(c)], f.domain.padded(), out, c);
  return out;
}

BLField contract(const PaddedField& matrix, const PaddedField& v) {
  require_same_domain(matrix.domain, v.domain, "contract");
  const int cols = v.components;
  if (cols == 0 || matrix.components % cols != 0) throw DomainMismatch("contract: incompatible ranks");
  const int rows = matrix.components / cols;
  const std::size_t n = v.values.front().size();
  PaddedField prod{v.domain, rows, std::vector<std::vector<double>>(std::size_t(rows), std::vector<double>(n))};
  for (int i = 0; i < rows; ++i) {
    auto& out = prod.values[std::size_t(i)];
    for (int j = 0; j < cols; ++j) {
      const auto& m = matrix.values[std::size_t(i * cols + j)];
      const auto& x = v.values[std::size_t(j)];
      for (std::size_t p = 0; p < n; ++p) out[p] += m[p] * x[p];
    }
  }
  return truncate_padded(prod);
}

BLField contract_transpose(const PaddedField& matrix, const PaddedField& r) {
  require_same_domain(matrix.domain, r.domain, "contract_transpose");
  const int rows = r.components;
  if (rows == 0 || matrix.components % rows != 0) throw DomainMismatch("contract_transpose: incompatible ranks");
  const int cols = matrix.components / rows;
  const std::size_t n = r.values.front().size();
  PaddedField prod{r.domain, cols, std::vector<std::vector<double>>(std::size_t(cols), std::vector<double>(n))};
  for (int j = 0; j < cols; ++j) {
    auto& out = prod.values[std::size_t(j)];
    for (int i = 0; i < rows; ++i) {
      const auto& m = matrix.values[std::size_t(i * cols + j)];
      const auto& x = r.values[std::size_t(i)];
      for (std::size_t p = 0; p < n; ++p) out[p] += m[p] * x[p];
    }
  }
  return truncate_padded(prod);
}

BLField scale(const PaddedField& scalar, const PaddedField& f) {
  require_same_domain(scalar.domain, f.domain, "scale");
  if (scalar.components != 1) throw DomainMismatch("scale: first operand must be scalar");
  PaddedField prod = f;
  for (auto& comp : prod.values) {
    for (std::size_t p = 0; p < comp.size(); ++p) comp[p] *= scalar.values[0][p];
  }
  return truncate_padded(prod);
}

BLField product_divergence(const PaddedField& r, const PaddedField& v) {
  require_same_domain(r.domain, v.domain, "product_divergence");
  const BLDomain& dom = r.domain;
  const int d = dom.dim();
  if (v.components != d) throw DomainMismatch("product_divergence: transport velocity must be a vector field");
  const std::size_t n = v.values.front().size();
  BLField out(dom, r.components);
  BLField flux(dom, 1);
  std::vector<double> prod(n);
  for (int i = 0; i < r.components; ++i) {
    for (int j = 0; j < d; ++j) {
      const auto& a = r.values[std::size_t(i)];
      const auto& b = v.values[std::size_t(j)];
      for (std::size_t p = 0; p < n; ++p) prod[p] = a[p] * b[p];
      truncate(prod, dom.padded(), flux, 0);
      multiply_imaginary(flux, [&](int k0, int k1, int k2) { return wavenumber(j, k0, k1, k2); });
      auto dst = out.component(i);
      auto src = flux.component(0);
      for (std::size_t q = 0; q < dst.size(); ++q) dst[q] += src[q];
    }
  }
  return out;
}

BLField truncated_convolution(const BLField& a, const BLField& b) {
  require_same_domain(a.domain(), b.domain(), "truncated_convolution");
  const int d = a.domain().dim();
  const PaddedField pa = realize_padded(a);
  const PaddedField pb = realize_padded(b);
  if (a.components() == 1) return scale(pa, pb);
  if (b.components() == 1) return scale(pb, pa);
  if (a.components() == d * d && b.components() == d) return contract(pa, pb);
  if (a.components() == b.components()) return contract(pa, pb);  // row times vector: dot product
  throw DomainMismatch("truncated_convolution: unsupported operand ranks");
}

BLField apply_L(const BLField& v) {
  BLField out = v;
  for (int c = 0; c < out.components(); ++c) {
    for_each_frequency(v.domain(), [&](int k0, int k1, int k2, std::size_t) {
      out(c, k0, k1, k2) *= v.domain().regularizer_symbol(k0, k1, k2);
    });
  }
  return out;
}

BLField apply_K(const BLField& v) {
  BLField out = v;
  for (int c = 0; c < out.components(); ++c) {
    for_each_frequency(v.domain(), [&](int k0, int k1, int k2, std::size_t) {
      out(c, k0, k1, k2) /= v.domain().regularizer_symbol(k0, k1, k2);
    });
  }
  return out;
}

BLField spectral_derivative(const BLField& f, int axis) {
  BLField out = f;
  multiply_imaginary(out, [&](int k0, int k1, int k2) { return wavenumber(axis, k0, k1, k2); });
  return out;
}

BLField spectral_gradient(const BLField& p) {
  if (p.components() != 1) throw DomainMismatch("spectral_gradient: expected a scalar field");
  const int d = p.domain().dim();
  BLField out(p.domain(), d);
  for (int j = 0; j < d; ++j) out.set_component(j, spectral_derivative(p, j));
  return out;
}

BLField spectral_divergence(const BLField& v) {
  const int d = v.domain().dim();
  if (v.components() != d) throw DomainMismatch("spectral_divergence: expected a vector field");
  BLField out(v.domain(), 1);
  for (int j = 0; j < d; ++j) out += spectral_derivative(v.component_field(j), j);
  return out;
}

BLField spectral_jacobian(const BLField& v) {
  const int d = v.domain().dim();
  if (v.components() != d) throw DomainMismatch("spectral_jacobian: expected a vector field");
  BLField out(v.domain(), d * d);
  for (int i = 0; i < d; ++i) {
    const BLField vi = v.component_field(i);
    for (int j = 0; j < d; ++j) out.set_component(i * d + j, spectral_derivative(vi, j));
  }
  return out;
}

double spectral_laplacian_symbol(const BLDomain& dom, int k0, int k1, int k2) {
  double s = 0.0;
  for (int j = 0; j < dom.dim(); ++j) {
    const double w = wavenumber(j, k0, k1, k2);
    s -= w * w;
  }
  return s;
}

LerayDecomposition leray_decompose(const BLField& v) {
  const BLDomain& dom = v.domain();
  const int d = dom.dim();
  if (v.components() != d) throw DomainMismatch("leray_decompose: expected a vector field");
  LerayDecomposition out{v, BLField(dom, 1)};
  for_each_frequency(dom, [&](int k0, int k1, int k2, std::size_t) {
    if (k0 == 0 && k1 == 0 && k2 == 0) return;  // gauge p(0) = 0
    double w[3];
    for (int j = 0; j < 3; ++j) w[j] = j < d ? wavenumber(j, k0, k1, k2) : 0.0;
    // ∇·v = i w·v, Δ = -|w|^2, so p = -i (w·v) / |w|^2 and ∇p = w (w·v) / |w|^2.
    Complex wv{};
    double w2 = 0.0;
    for (int j = 0; j < d; ++j) {
      wv += w[j] * v(j, k0, k1, k2);
      w2 += w[j] * w[j];
    }
    const Complex coef = wv / w2;
    out.pressure(0, k0, k1, k2) = Complex(coef.imag(), -coef.real());
    for (int j = 0; j < d; ++j) out.velocity(j, k0, k1, k2) -= w[j] * coef;
  });
  return out;
}

BLField leray_project(const BLField& v) { return leray_decompose(v).velocity; }

double max_divergence(const BLField& v) { return include(spectral_divergence(v)).max_abs(); }

}  // namespace blreg
