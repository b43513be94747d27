#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "blreg/fft.hpp"

namespace blreg {

/// Which symbol realizes the regularizer L = (Id - alpha*Laplacian)^s.
enum class SymbolKind {
  discrete_laplacian,  ///< 1 + 2*alpha*sum_j (1 - cos(2*pi*k_j/N_j)) / h_j^2
  continuous,          ///< 1 + alpha*sum_j (2*pi*k_j)^2
};

/// Periodic unit-cube grid plus the frequency box of the band-limited space.
///
/// Two-dimensional domains are stored as 3D with a degenerate third axis
/// (grid extent 1, frequency bound 0) so every loop is written once.
class BLDomain {
 public:
  BLDomain(std::span<const int> grid, std::span<const int> bounds, double alpha, int exponent,
           SymbolKind symbol = SymbolKind::discrete_laplacian);

  /// Isotropic convenience constructor: N samples and bound K on each of `dim` axes.
  static BLDomain cube(int dim, int n, int k, double alpha, int exponent,
                       SymbolKind symbol = SymbolKind::discrete_laplacian);

  int dim() const { return dim_; }
  const Dims3& grid() const { return grid_; }
  const Dims3& bounds() const { return bounds_; }
  /// 2K_j + 1 coefficients per axis.
  Dims3 extent() const;
  /// Anti-aliasing grid for truncated products, 4K_j + 1 points per axis.
  Dims3 padded() const;

  std::size_t grid_size() const;
  std::size_t spectral_size() const;
  double spacing(int axis) const { return 1.0 / grid_[axis]; }
  double min_spacing() const;
  double voxel_volume() const;

  double alpha() const { return alpha_; }
  int exponent() const { return exponent_; }
  SymbolKind symbol() const { return symbol_; }

  std::size_t spectral_index(int k0, int k1, int k2) const {
    const Dims3 e = extent();
    return std::size_t(k0 + bounds_[0]) +
           std::size_t(e[0]) * (std::size_t(k1 + bounds_[1]) + std::size_t(e[1]) * std::size_t(k2 + bounds_[2]));
  }
  std::size_t grid_index(int i0, int i1, int i2) const {
    return std::size_t(i0) + std::size_t(grid_[0]) * (std::size_t(i1) + std::size_t(grid_[1]) * std::size_t(i2));
  }

  /// Diagonal symbol A(k) of Id - alpha*Laplacian (always >= 1).
  double helmholtz_symbol(int k0, int k1, int k2) const;
  /// A(k)^s, the symbol of L.
  double regularizer_symbol(int k0, int k1, int k2) const;

  friend bool operator==(const BLDomain&, const BLDomain&) = default;

 private:
  int dim_ = 0;
  Dims3 grid_{1, 1, 1};
  Dims3 bounds_{0, 0, 0};
  double alpha_ = 0.0;
  int exponent_ = 1;
  SymbolKind symbol_ = SymbolKind::discrete_laplacian;
};

/// Calls f(k0, k1, k2, index) for every frequency of the truncated box in storage order.
template <typename F>
void for_each_frequency(const BLDomain& dom, F&& f) {
  const Dims3& K = dom.bounds();
  std::size_t idx = 0;
  for (int k2 = -K[2]; k2 <= K[2]; ++k2)
    for (int k1 = -K[1]; k1 <= K[1]; ++k1)
      for (int k0 = -K[0]; k0 <= K[0]; ++k0) f(k0, k1, k2, idx++);
}

/// Calls f(i0, i1, i2, index) for every voxel of the full grid in storage order.
template <typename F>
void for_each_voxel(const BLDomain& dom, F&& f) {
  const Dims3& N = dom.grid();
  std::size_t idx = 0;
  for (int i2 = 0; i2 < N[2]; ++i2)
    for (int i1 = 0; i1 < N[1]; ++i1)
      for (int i0 = 0; i0 < N[0]; ++i0) f(i0, i1, i2, idx++);
}

/// Fourier coefficients of a band-limited field with one or more components
/// (1: scalar, d: vector, d*d: matrix stored row-major, entry (i,j) at i*d+j).
///
/// Coefficients are kept for the whole box [-K_j, K_j]; ι of the field is real
/// when coeff(-k) == conj(coeff(k)).
class BLField {
 public:
  BLField() = default;
  BLField(const BLDomain& domain, int components);

  static BLField scalar(const BLDomain& domain) { return BLField(domain, 1); }
  static BLField vector(const BLDomain& domain) { return BLField(domain, domain.dim()); }
  /// Spatially constant field: only the k = 0 coefficient is set.
  static BLField constant(const BLDomain& domain, std::span<const double> values);

  const BLDomain& domain() const { return domain_; }
  int components() const { return components_; }
  bool empty() const { return components_ == 0; }
  std::size_t component_size() const { return domain_.spectral_size(); }

  std::span<Complex> data() { return coeffs_; }
  std::span<const Complex> data() const { return coeffs_; }
  std::span<Complex> component(int c);
  std::span<const Complex> component(int c) const;

  Complex& operator()(int c, int k0, int k1 = 0, int k2 = 0) {
    return coeffs_[std::size_t(c) * component_size() + domain_.spectral_index(k0, k1, k2)];
  }
  const Complex& operator()(int c, int k0, int k1 = 0, int k2 = 0) const {
    return coeffs_[std::size_t(c) * component_size() + domain_.spectral_index(k0, k1, k2)];
  }

  BLField component_field(int c) const;
  void set_component(int c, const BLField& scalar);

  BLField& operator+=(const BLField& other);
  BLField& operator-=(const BLField& other);
  BLField& operator*=(double a);
  /// this += a * x
  BLField& axpy(double a, const BLField& x);
  void set_zero();

  /// max_k |c(k) - conj(c(-k))| relative to max_k |c(k)| (0 for the zero field).
  double symmetry_defect() const;
  /// Replaces c(k) by (c(k) + conj(c(-k))) / 2.
  void symmetrize();
  bool all_finite() const;
  double max_abs() const;

  friend BLField operator+(BLField a, const BLField& b) { return a += b; }
  friend BLField operator-(BLField a, const BLField& b) { return a -= b; }
  friend BLField operator*(double s, BLField a) { return a *= s; }

 private:
  void check_compatible(const BLField& other) const;

  BLDomain domain_ = BLDomain::cube(2, 4, 1, 1.0, 1);
  int components_ = 0;
  std::vector<Complex> coeffs_;
};

/// Real l2 product Re sum conj(a) b over every coefficient of every component.
double dot(const BLField& a, const BLField& b);
double norm(const BLField& a);

/// Real samples on the full N_1 x ... x N_d grid, axis 0 fastest, component-major.
class GridField {
 public:
  GridField() = default;
  GridField(const BLDomain& domain, int components);

  static GridField scalar(const BLDomain& domain) { return GridField(domain, 1); }
  static GridField vector(const BLDomain& domain) { return GridField(domain, domain.dim()); }

  const BLDomain& domain() const { return domain_; }
  int components() const { return components_; }
  std::size_t component_size() const { return domain_.grid_size(); }

  std::span<double> data() { return values_; }
  std::span<const double> data() const { return values_; }
  std::span<double> component(int c);
  std::span<const double> component(int c) const;

  double& operator()(int c, int i0, int i1 = 0, int i2 = 0) {
    return values_[std::size_t(c) * component_size() + domain_.grid_index(i0, i1, i2)];
  }
  double operator()(int c, int i0, int i1 = 0, int i2 = 0) const {
    return values_[std::size_t(c) * component_size() + domain_.grid_index(i0, i1, i2)];
  }

  GridField component_field(int c) const;

  GridField& operator+=(const GridField& other);
  GridField& operator-=(const GridField& other);
  GridField& operator*=(double a);
  GridField& axpy(double a, const GridField& x);

  bool all_finite() const;
  double max_abs() const;
  /// Grid sum of squares times voxel volume (squared L2 norm over the unit torus).
  double squared_l2() const;

  friend GridField operator+(GridField a, const GridField& b) { return a += b; }
  friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
  friend GridField operator*(double s, GridField a) { return a *= s; }

 private:
  void check_compatible(const GridField& other) const;

  BLDomain domain_ = BLDomain::cube(2, 4, 1, 1.0, 1);
  int components_ = 0;
  std::vector<double> values_;
};

}  // namespace blreg
