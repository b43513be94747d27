#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "blreg/fields.hpp"
#include "blreg/time_flow.hpp"

namespace blreg {

enum class PairKind { translation, swirl, c_to_circle };

PairKind parse_pair_kind(const std::string& name);
std::string to_string(PairKind kind);

struct SynthesisOptions {
  PairKind kind = PairKind::translation;
  std::uint64_t seed = 0;  ///< 0 keeps the canonical layout; other seeds jitter it deterministically
  double shift = 0.1;      ///< translation: displacement along every axis, in unit-torus lengths
  double swirl = 0.8;      ///< swirl: rotation angle at the centre, radians
};

struct SyntheticPair {
  GridField source;
  GridField target;
  std::vector<std::int32_t> source_labels;  ///< c_to_circle only
  std::vector<std::int32_t> target_labels;
  std::vector<double> velocity;  ///< translation only: the stationary DC velocity mapping source onto target
};

/// Smooth periodic test pairs on `domain`'s grid (each axis >= 16 samples).
SyntheticPair synthesize_pair(const BLDomain& domain, const SynthesisOptions& options);

/// Labels 1 where f > threshold, 0 elsewhere.
std::vector<std::int32_t> threshold_labels(const GridField& f, double threshold = 0.5);

/// Random Hermitian spectrum with coefficients decaying like 1/(1+|k|²).
BLField random_bl_field(const BLDomain& domain, int components, std::mt19937_64& rng, double amplitude = 1.0);
TimeFlow random_flow(const BLDomain& domain, FlowMode mode, int intervals, std::mt19937_64& rng,
                     double amplitude = 1.0);

}  // namespace blreg
