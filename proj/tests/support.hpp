#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "blreg/fields.hpp"
#include "blreg/harness/synthesize.hpp"
#include "blreg/time_flow.hpp"

namespace test {

using namespace blreg;

constexpr double two_pi = 2.0 * std::numbers::pi;

inline BLField random_field(const BLDomain& dom, int components, std::uint64_t seed, double amplitude = 1.0) {
  std::mt19937_64 rng(seed);
  return random_bl_field(dom, components, rng, amplitude);
}

inline TimeFlow random_flow(const BLDomain& dom, FlowMode mode, int intervals, std::uint64_t seed,
                            double amplitude = 1.0) {
  std::mt19937_64 rng(seed);
  return blreg::random_flow(dom, mode, intervals, rng, amplitude);
}

// Field whose coefficients are nonzero only on k1 = k2 = 0, so its realization varies along axis 0 alone.
inline BLField axis0_field(const BLDomain& dom, std::uint64_t seed) {
  BLField f = random_field(dom, 1, seed);
  for_each_frequency(dom, [&](int k0, int k1, int k2, std::size_t) {
    if (k1 != 0 || k2 != 0) f(0, k0, k1, k2) = 0.0;
  });
  return f;
}

inline double max_abs_diff(const GridField& a, const GridField& b) { return (a - b).max_abs(); }
inline double max_abs_diff(const BLField& a, const BLField& b) { return (a - b).max_abs(); }

inline double rel_diff(const TimeFlow& a, const TimeFlow& b) {
  const double n = std::max(weighted_norm(a), weighted_norm(b));
  return n == 0.0 ? 0.0 : weighted_norm(a - b) / n;
}

}  // namespace test
