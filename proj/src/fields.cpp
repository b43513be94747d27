#include "blreg/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "blreg/errors.hpp"

namespace blreg {

BLDomain::BLDomain(std::span<const int> grid, std::span<const int> bounds, double alpha, int exponent,
                   SymbolKind symbol)
    : dim_(int(grid.size())), alpha_(alpha), exponent_(exponent), symbol_(symbol) {
  if (dim_ < 2 || dim_ > 3) throw DomainMismatch("BLDomain: dimension must be 2 or 3");
  if (bounds.size() != grid.size()) throw DomainMismatch("BLDomain: one frequency bound per axis required");
  if (!(alpha > 0.0)) throw DomainMismatch("BLDomain: alpha must be positive");
  if (exponent < 1) throw DomainMismatch("BLDomain: exponent s must be >= 1");
  for (int j = 0; j < dim_; ++j) {
    grid_[j] = grid[j];
    bounds_[j] = bounds[j];
    // 2K+1 <= N keeps +K and -K distinct on the grid, so project(include(f)) == f.
    if (bounds[j] < 1 || 2 * bounds[j] + 1 > grid[j]) {
      throw DomainMismatch("BLDomain: frequency bound on axis " + std::to_string(j) + " must satisfy 1 <= K <= (N-1)/2");
    }
  }
}

BLDomain BLDomain::cube(int dim, int n, int k, double alpha, int exponent, SymbolKind symbol) {
  std::vector<int> g(std::size_t(dim), n), b(std::size_t(dim), k);
  return BLDomain(g, b, alpha, exponent, symbol);
}

Dims3 BLDomain::extent() const {
  return {2 * bounds_[0] + 1, 2 * bounds_[1] + 1, 2 * bounds_[2] + 1};
}

Dims3 BLDomain::padded() const {
  return {4 * bounds_[0] + 1, 4 * bounds_[1] + 1, 4 * bounds_[2] + 1};
}

std::size_t BLDomain::grid_size() const { return std::size_t(grid_[0]) * grid_[1] * grid_[2]; }

std::size_t BLDomain::spectral_size() const {
  const Dims3 e = extent();
  return std::size_t(e[0]) * e[1] * e[2];
}

double BLDomain::min_spacing() const {
  double h = 1.0;
  for (int j = 0; j < dim_; ++j) h = std::min(h, spacing(j));
  return h;
}

double BLDomain::voxel_volume() const { return 1.0 / double(grid_size()); }

double BLDomain::helmholtz_symbol(int k0, int k1, int k2) const {
  const int k[3] = {k0, k1, k2};
  double lap = 0.0;
  for (int j = 0; j < dim_; ++j) {
    if (symbol_ == SymbolKind::discrete_laplacian) {
      const double n = grid_[j];
      lap += 2.0 * (1.0 - std::cos(2.0 * std::numbers::pi * k[j] / n)) * n * n;
    } else {
      const double w = 2.0 * std::numbers::pi * k[j];
      lap += w * w;
    }
  }
  return 1.0 + alpha_ * lap;
}

double BLDomain::regularizer_symbol(int k0, int k1, int k2) const {
  return std::pow(helmholtz_symbol(k0, k1, k2), exponent_);
}

// ---------------------------------------------------------------------------

BLField::BLField(const BLDomain& domain, int components)
    : domain_(domain), components_(components), coeffs_(std::size_t(components) * domain.spectral_size()) {}

BLField BLField::constant(const BLDomain& domain, std::span<const double> values) {
  BLField f(domain, int(values.size()));
  for (int c = 0; c < f.components(); ++c) f(c, 0, 0, 0) = values[std::size_t(c)];
  return f;
}

std::span<Complex> BLField::component(int c) {
  return std::span<Complex>(coeffs_).subspan(std::size_t(c) * component_size(), component_size());
}

std::span<const Complex> BLField::component(int c) const {
  return std::span<const Complex>(coeffs_).subspan(std::size_t(c) * component_size(), component_size());
}

BLField BLField::component_field(int c) const {
  BLField out(domain_, 1);
  std::ranges::copy(component(c), out.data().begin());
  return out;
}

void BLField::set_component(int c, const BLField& scalar) {
  if (scalar.components() != 1 || !(scalar.domain() == domain_)) {
    throw DomainMismatch("BLField::set_component: expected a scalar field on the same domain");
  }
  std::ranges::copy(scalar.data(), component(c).begin());
}

void BLField::check_compatible(const BLField& other) const {
  if (components_ != other.components_ || !(domain_ == other.domain_)) {
    throw DomainMismatch("BLField: operands differ in domain or rank");
  }
}

BLField& BLField::operator+=(const BLField& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

BLField& BLField::operator-=(const BLField& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

BLField& BLField::operator*=(double a) {
  for (auto& c : coeffs_) c *= a;
  return *this;
}

BLField& BLField::axpy(double a, const BLField& x) {
  check_compatible(x);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * x.coeffs_[i];
  return *this;
}

void BLField::set_zero() { std::ranges::fill(coeffs_, Complex{}); }

double BLField::symmetry_defect() const {
  double defect = 0.0;
  const double scale = max_abs();
  if (scale == 0.0) return 0.0;
  for (int c = 0; c < components_; ++c) {
    for_each_frequency(domain_, [&](int k0, int k1, int k2, std::size_t) {
      defect = std::max(defect, std::abs((*this)(c, k0, k1, k2) - std::conj((*this)(c, -k0, -k1, -k2))));
    });
  }
  return defect / scale;
}

void BLField::symmetrize() {
  for (int c = 0; c < components_; ++c) {
    for_each_frequency(domain_, [&](int k0, int k1, int k2, std::size_t) {
      Complex& a = (*this)(c, k0, k1, k2);
      Complex& b = (*this)(c, -k0, -k1, -k2);
      if (&a > &b) return;
      const Complex m = 0.5 * (a + std::conj(b));
      a = m;
      b = std::conj(m);
    });
  }
}

bool BLField::all_finite() const {
  return std::ranges::all_of(coeffs_, [](const Complex& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

double BLField::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

double dot(const BLField& a, const BLField& b) {
  if (a.components() != b.components() || !(a.domain() == b.domain())) {
    throw DomainMismatch("dot: operands differ in domain or rank");
  }
  double s = 0.0;
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
  return s;
}

double norm(const BLField& a) { return std::sqrt(dot(a, a)); }

// ---------------------------------------------------------------------------

GridField::GridField(const BLDomain& domain, int components)
    : domain_(domain), components_(components), values_(std::size_t(components) * domain.grid_size()) {}

std::span<double> GridField::component(int c) {
  return std::span<double>(values_).subspan(std::size_t(c) * component_size(), component_size());
}

std::span<const double> GridField::component(int c) const {
  return std::span<const double>(values_).subspan(std::size_t(c) * component_size(), component_size());
}

GridField GridField::component_field(int c) const {
  GridField out(domain_, 1);
  std::ranges::copy(component(c), out.data().begin());
  return out;
}

void GridField::check_compatible(const GridField& other) const {
  if (components_ != other.components_ || !(domain_.grid() == other.domain_.grid())) {
    throw DomainMismatch("GridField: operands differ in grid or rank");
  }
}

GridField& GridField::operator+=(const GridField& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridField& GridField::operator-=(const GridField& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridField& GridField::operator*=(double a) {
  for (auto& v : values_) v *= a;
  return *this;
}

GridField& GridField::axpy(double a, const GridField& x) {
  check_compatible(x);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * x.values_[i];
  return *this;
}

bool GridField::all_finite() const {
  return std::ranges::all_of(values_, [](double v) { return std::isfinite(v); });
}

double GridField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GridField::squared_l2() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s * domain_.voxel_volume();
}

}  // namespace blreg
