#pragma once

#include <array>
#include <vector>

#include "blreg/fields.hpp"

namespace blreg {

enum class Interpolation {
  linear,         ///< multilinear, C0; the registration default
  cubic_bspline,  ///< prefiltered cubic B-spline, C2
};

/// A map Ω → Ω stored as its displacement: φ(x) = x + u(x), periodic.
class GridMap {
 public:
  explicit GridMap(GridField displacement);
  static GridMap identity(const BLDomain& domain);

  const GridField& displacement() const { return displacement_; }
  const BLDomain& domain() const { return displacement_.domain(); }

 private:
  GridField displacement_;
};

/// Value and unit-torus derivatives of an interpolant at one point.
/// Hessian is row-major d x d.
struct PointSample {
  double value = 0.0;
  std::array<double, 3> gradient{};
  std::array<double, 9> hessian{};
};

/// Periodic interpolant of a scalar grid field.
///
/// At points lying exactly on a cell face the linear interpolant is not
/// differentiable across that face; its gradient there is taken as the mean of
/// the two one-sided slopes (the central difference), which is what a
/// symmetric finite difference of the interpolant converges to.
class Interpolant {
 public:
  Interpolant(const GridField& f, Interpolation kind);

  Interpolation kind() const { return kind_; }
  const BLDomain& domain() const { return domain_; }

  /// `order` 0: value only, 1: + gradient, 2: + Hessian. Position is in unit-torus coordinates.
  PointSample sample(const std::array<double, 3>& position, int order) const;
  /// Same, with the position given in grid units (x_j N_j); derivatives stay unit-torus.
  PointSample sample_grid(const std::array<double, 3>& coords, int order) const;

 private:
  BLDomain domain_;
  Interpolation kind_;
  std::vector<double> coeffs_;
};

struct WarpSamples {
  GridField value;     ///< f ∘ φ
  GridField gradient;  ///< (∇f) ∘ φ, empty unless order >= 1
  GridField hessian;   ///< (∇²f) ∘ φ, d*d components, empty unless order >= 2
};

/// Samples f at φ(x) = x + u(x) for every voxel x.
WarpSamples warp_with_derivatives(const Interpolant& f, const GridField& displacement, int order);

/// f ∘ φ.
GridField warp(const GridField& f, const GridMap& map, Interpolation kind = Interpolation::linear);

/// Periodic central differences, spacing h_j = 1/N_j. Scalar in, d-vector out.
GridField spatial_gradient(const GridField& f);

/// det(I + Du) with Du from periodic central differences.
GridField jacobian_determinant(const GridMap& map);

/// Pointwise sum_j a_j b_j of two vector fields.
GridField pointwise_dot(const GridField& a, const GridField& b);
/// Pointwise s * v for a scalar s and any-rank v.
GridField scale_vector(const GridField& s, const GridField& v);

}  // namespace blreg
