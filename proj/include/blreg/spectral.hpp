#pragma once

#include <vector>

#include "blreg/fields.hpp"

namespace blreg {

/// ι: zero-pads the truncated spectrum onto the full grid and inverts the DFT.
/// Normalized so that project(include(f)) == f. Throws SymmetryViolation when
/// the spectrum is not Hermitian to 1e-10 (relative).
GridField include(const BLField& f);

/// π: forward DFT of a real grid field, keeping |k_j| <= K_j. The result is
/// Hermitian by construction.
BLField project(const GridField& f);

/// Realization of a band-limited field on the anti-aliasing grid (4K+1 per axis).
/// Products of two such realizations are exact trigonometric polynomials, so
/// truncating them back gives the exact truncated convolution.
struct PaddedField {
  BLDomain domain = BLDomain::cube(2, 3, 1, 1.0, 1);
  int components = 0;
  std::vector<std::vector<double>> values;
};

PaddedField realize_padded(const BLField& f);
/// Truncates a padded realization back to the band-limited box.
BLField truncate_padded(const PaddedField& f);

/// a ⋆ b. Ranks: scalar*any and any*scalar scale componentwise; a d*d matrix
/// times a d-vector contracts over the column index; two d-vectors give their
/// dot product.
BLField truncated_convolution(const BLField& a, const BLField& b);

/// Matrix ⋆ vector: out_i = sum_j M_ij ⋆ v_j. M has rows*cols components where
/// cols = v.components.
BLField contract(const PaddedField& matrix, const PaddedField& v);
/// Transposed contraction: out_j = sum_i M_ij ⋆ r_i, with rows = r.components.
BLField contract_transpose(const PaddedField& matrix, const PaddedField& r);
/// Scalar ⋆ field, componentwise.
BLField scale(const PaddedField& scalar, const PaddedField& f);
/// Conservative flux divergence: out_i = sum_j ∂_j (r_i ⋆ v_j). Works for scalar or vector r.
BLField product_divergence(const PaddedField& r, const PaddedField& v);

/// Multiplies every component by A(k)^s.
BLField apply_L(const BLField& v);
/// Multiplies every component by A(k)^-s.
BLField apply_K(const BLField& v);

/// Exact spectral derivative ∂_j (symbol 2*pi*i*k_j) of every component.
BLField spectral_derivative(const BLField& f, int axis);
BLField spectral_gradient(const BLField& p);
BLField spectral_divergence(const BLField& v);
/// All first partials; component i*d + j holds ∂_j v_i.
BLField spectral_jacobian(const BLField& v);
/// Symbol of spectral_divergence ∘ spectral_gradient, -(2*pi)^2 |k|^2.
double spectral_laplacian_symbol(const BLDomain& dom, int k0, int k1, int k2);

struct LerayDecomposition {
  BLField velocity;  ///< divergence-free part v - ∇p
  BLField pressure;  ///< solves Δp = ∇·v with p(0) = 0
};

/// Helmholtz-Leray split of a band-limited vector field.
LerayDecomposition leray_decompose(const BLField& v);
/// Divergence-free part only.
BLField leray_project(const BLField& v);

/// Max over the grid of |ι(∇·v)|.
double max_divergence(const BLField& v);

}  // namespace blreg
