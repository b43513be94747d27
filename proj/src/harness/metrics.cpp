#include "blreg/harness/metrics.hpp"

#include <algorithm>

#include "blreg/errors.hpp"

namespace blreg {

double mse_rel(const GridField& m1, const GridField& source, const GridField& target) {
  const double initial = (source - target).squared_l2();
  if (initial == 0.0) return 0.0;
  return 100.0 * (m1 - target).squared_l2() / initial;
}

double dice(std::span<const std::int32_t> a, std::span<const std::int32_t> b, std::int32_t label) {
  if (a.size() != b.size()) throw DomainMismatch("dice: label volumes differ in size");
  std::size_t na = 0, nb = 0, both = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool x = a[i] == label, y = b[i] == label;
    na += x;
    nb += y;
    both += x && y;
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * double(both) / double(na + nb);
}

Extrema extrema(const GridField& f) {
  const auto [lo, hi] = std::ranges::minmax_element(f.data());
  return {*lo, *hi};
}

}  // namespace blreg
