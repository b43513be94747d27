#pragma once

#include <cstdint>
#include <span>

#include "blreg/fields.hpp"

namespace blreg {

/// 100 ‖m1 - I₁‖² / ‖I₀ - I₁‖², 0 when I₀ == I₁.
double mse_rel(const GridField& m1, const GridField& source, const GridField& target);

/// 2|A∩B| / (|A| + |B|) over voxels carrying `label`; 1 when both sets are empty.
double dice(std::span<const std::int32_t> a, std::span<const std::int32_t> b, std::int32_t label);

struct Extrema {
  double min = 0.0;
  double max = 0.0;
};
Extrema extrema(const GridField& f);

}  // namespace blreg
