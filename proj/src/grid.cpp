#include "blreg/grid.hpp"

#include <cmath>
#include <numbers>

#include "blreg/errors.hpp"
#include "blreg/fft.hpp"

namespace blreg {

namespace {

inline int wrap(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}

// Four taps at offsets -1..2 from floor(g); derivatives are w.r.t. the grid coordinate.
struct Taps {
  int base = 0;
  double w[4]{};
  double dw[4]{};
  double d2w[4]{};
};

Taps linear_taps(double g) {
  Taps t;
  const double fl = std::floor(g);
  const double f = g - fl;
  t.base = int(fl);
  if (f == 0.0) {
    t.w[1] = 1.0;
    t.dw[0] = -0.5;
    t.dw[2] = 0.5;
  } else {
    t.w[1] = 1.0 - f;
    t.w[2] = f;
    t.dw[1] = -1.0;
    t.dw[2] = 1.0;
  }
  return t;
}

Taps cubic_taps(double g) {
  Taps t;
  const double fl = std::floor(g);
  const double f = g - fl;
  t.base = int(fl);
  const double r = 1.0 - f;
  t.w[0] = r * r * r / 6.0;
  t.w[1] = (3.0 * f * f * f - 6.0 * f * f + 4.0) / 6.0;
  t.w[2] = (-3.0 * f * f * f + 3.0 * f * f + 3.0 * f + 1.0) / 6.0;
  t.w[3] = f * f * f / 6.0;
  t.dw[0] = -0.5 * r * r;
  t.dw[1] = 1.5 * f * f - 2.0 * f;
  t.dw[2] = -1.5 * f * f + f + 0.5;
  t.dw[3] = 0.5 * f * f;
  t.d2w[0] = r;
  t.d2w[1] = 3.0 * f - 2.0;
  t.d2w[2] = -3.0 * f + 1.0;
  t.d2w[3] = f;
  return t;
}

// B-spline coefficients c with sum_j c_j B3(x - j) = f at the nodes.
std::vector<double> bspline_prefilter(std::span<const double> f, const Dims3& grid, int dim) {
  const RealFft& fft = RealFft::get(grid);
  std::vector<Complex> half(fft.half_size());
  fft.forward(f, half);
  const int h0 = grid[0] / 2 + 1;
  std::size_t idx = 0;
  for (int i2 = 0; i2 < grid[2]; ++i2)
    for (int i1 = 0; i1 < grid[1]; ++i1)
      for (int i0 = 0; i0 < h0; ++i0, ++idx) {
        const int ii[3] = {i0, i1, i2};
        double b = 1.0;
        for (int j = 0; j < dim; ++j) b *= (4.0 + 2.0 * std::cos(2.0 * std::numbers::pi * ii[j] / grid[j])) / 6.0;
        half[idx] /= b * double(fft.real_size());
      }
  std::vector<double> out(fft.real_size());
  fft.backward(half, out);
  return out;
}

}  // namespace

GridMap::GridMap(GridField displacement) : displacement_(std::move(displacement)) {
  if (displacement_.components() != displacement_.domain().dim()) {
    throw DomainMismatch("GridMap: displacement must be a d-vector field");
  }
  if (!displacement_.all_finite()) throw NumericalError("GridMap: non-finite displacement");
  if (displacement_.max_abs() >= 1.0) throw NumericalError("GridMap: displacement exceeds the domain extent");
}

GridMap GridMap::identity(const BLDomain& domain) { return GridMap(GridField::vector(domain)); }

Interpolant::Interpolant(const GridField& f, Interpolation kind) : domain_(f.domain()), kind_(kind) {
  if (f.components() != 1) throw DomainMismatch("Interpolant: scalar field expected");
  if (kind == Interpolation::cubic_bspline) {
    coeffs_ = bspline_prefilter(f.data(), domain_.grid(), domain_.dim());
  } else {
    coeffs_.assign(f.data().begin(), f.data().end());
  }
}

PointSample Interpolant::sample(const std::array<double, 3>& position, int order) const {
  const Dims3& N = domain_.grid();
  return sample_grid({position[0] * N[0], position[1] * N[1], position[2] * N[2]}, order);
}

PointSample Interpolant::sample_grid(const std::array<double, 3>& coords, int order) const {
  const int d = domain_.dim();
  const Dims3& N = domain_.grid();
  Taps t[3];
  for (int j = 0; j < 3; ++j) {
    if (j >= d) {
      t[j].base = 0;
      t[j].w[1] = 1.0;
      continue;
    }
    const double g = coords[std::size_t(j)];
    t[j] = kind_ == Interpolation::cubic_bspline ? cubic_taps(g) : linear_taps(g);
  }
  const int lo2 = d == 3 ? 0 : 1, hi2 = d == 3 ? 4 : 2;
  PointSample s;
  double hg[3][3]{};
  double gr[3]{};
  for (int a2 = lo2; a2 < hi2; ++a2) {
    const int i2 = d == 3 ? wrap(t[2].base + a2 - 1, N[2]) : 0;
    for (int a1 = 0; a1 < 4; ++a1) {
      const int i1 = wrap(t[1].base + a1 - 1, N[1]);
      for (int a0 = 0; a0 < 4; ++a0) {
        const double w0 = t[0].w[a0], w1 = t[1].w[a1], w2 = t[2].w[a2];
        const double c = coeffs_[domain_.grid_index(wrap(t[0].base + a0 - 1, N[0]), i1, i2)];
        s.value += c * w0 * w1 * w2;
        if (order < 1) continue;
        const double dw0 = t[0].dw[a0], dw1 = t[1].dw[a1], dw2 = t[2].dw[a2];
        gr[0] += c * dw0 * w1 * w2;
        gr[1] += c * w0 * dw1 * w2;
        gr[2] += c * w0 * w1 * dw2;
        if (order < 2) continue;
        hg[0][0] += c * t[0].d2w[a0] * w1 * w2;
        hg[1][1] += c * w0 * t[1].d2w[a1] * w2;
        hg[2][2] += c * w0 * w1 * t[2].d2w[a2];
        hg[0][1] += c * dw0 * dw1 * w2;
        hg[0][2] += c * dw0 * w1 * dw2;
        hg[1][2] += c * w0 * dw1 * dw2;
      }
    }
  }
  if (order >= 1) {
    for (int j = 0; j < d; ++j) s.gradient[std::size_t(j)] = gr[j] * N[j];
  }
  if (order >= 2) {
    hg[1][0] = hg[0][1];
    hg[2][0] = hg[0][2];
    hg[2][1] = hg[1][2];
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) s.hessian[std::size_t(i * d + j)] = hg[i][j] * N[i] * N[j];
  }
  return s;
}

WarpSamples warp_with_derivatives(const Interpolant& f, const GridField& displacement, int order) {
  const BLDomain& dom = f.domain();
  const int d = dom.dim();
  if (displacement.components() != d || !(displacement.domain().grid() == dom.grid())) {
    throw DomainMismatch("warp: displacement does not match the image grid");
  }
  WarpSamples out{GridField::scalar(dom), order >= 1 ? GridField(dom, d) : GridField(),
                  order >= 2 ? GridField(dom, d * d) : GridField()};
  const Dims3& N = dom.grid();
  for_each_voxel(dom, [&](int i0, int i1, int i2, std::size_t idx) {
    const int ii[3] = {i0, i1, i2};
    std::array<double, 3> x{};
    for (int j = 0; j < d; ++j) x[std::size_t(j)] = ii[j] + N[j] * displacement.component(j)[idx];
    const PointSample s = f.sample_grid(x, order);
    out.value.data()[idx] = s.value;
    if (order >= 1) {
      for (int j = 0; j < d; ++j) out.gradient.component(j)[idx] = s.gradient[std::size_t(j)];
    }
    if (order >= 2) {
      for (int c = 0; c < d * d; ++c) out.hessian.component(c)[idx] = s.hessian[std::size_t(c)];
    }
  });
  return out;
}

GridField warp(const GridField& f, const GridMap& map, Interpolation kind) {
  return warp_with_derivatives(Interpolant(f, kind), map.displacement(), 0).value;
}

GridField spatial_gradient(const GridField& f) {
  if (f.components() != 1) throw DomainMismatch("spatial_gradient: scalar field expected");
  const BLDomain& dom = f.domain();
  const int d = dom.dim();
  const Dims3& N = dom.grid();
  GridField out(dom, d);
  for_each_voxel(dom, [&](int i0, int i1, int i2, std::size_t idx) {
    const int ii[3] = {i0, i1, i2};
    for (int j = 0; j < d; ++j) {
      int p[3] = {i0, i1, i2}, m[3] = {i0, i1, i2};
      p[j] = wrap(ii[j] + 1, N[j]);
      m[j] = wrap(ii[j] - 1, N[j]);
      out.component(j)[idx] = 0.5 * N[j] * (f(0, p[0], p[1], p[2]) - f(0, m[0], m[1], m[2]));
    }
  });
  return out;
}

GridField jacobian_determinant(const GridMap& map) {
  const GridField& u = map.displacement();
  const BLDomain& dom = map.domain();
  const int d = dom.dim();
  std::vector<GridField> du;
  for (int i = 0; i < d; ++i) du.push_back(spatial_gradient(u.component_field(i)));
  GridField out = GridField::scalar(dom);
  for (std::size_t p = 0; p < dom.grid_size(); ++p) {
    double a[3][3]{};
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a[i][j] = (i == j ? 1.0 : 0.0) + du[std::size_t(i)].component(j)[p];
    out.data()[p] = d == 2 ? a[0][0] * a[1][1] - a[0][1] * a[1][0]
                           : a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                                 a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                                 a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  }
  return out;
}

GridField pointwise_dot(const GridField& a, const GridField& b) {
  GridField out = GridField::scalar(a.domain());
  for (int j = 0; j < a.components(); ++j) {
    auto x = a.component(j);
    auto y = b.component(j);
    auto o = out.component(0);
    for (std::size_t p = 0; p < o.size(); ++p) o[p] += x[p] * y[p];
  }
  return out;
}

GridField scale_vector(const GridField& s, const GridField& v) {
  GridField out = v;
  for (int j = 0; j < v.components(); ++j) {
    auto o = out.component(j);
    auto a = s.component(0);
    for (std::size_t p = 0; p < o.size(); ++p) o[p] *= a[p];
  }
  return out;
}

}  // namespace blreg
