#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "blreg/fields.hpp"

namespace blreg {

/// Text header followed by a raw little-endian payload, axis 0 fastest,
/// component-major:
///
///   BLVOL 1
///   dims 64 64
///   spacing 0.015625 0.015625
///   components 1
///   dtype float32
///   byteorder little
///   end
struct Volume {
  std::vector<int> dims;
  std::vector<double> spacing;
  int components = 1;
  std::string dtype = "float32";  ///< float32 or int32
  std::vector<float> values;         ///< dtype float32
  std::vector<std::int32_t> labels;  ///< dtype int32

  std::size_t voxel_count() const;
};

void write_volume(const std::filesystem::path& path, const Volume& v);
Volume read_volume(const std::filesystem::path& path);

Volume to_volume(const GridField& f);
Volume to_label_volume(const BLDomain& dom, const std::vector<std::int32_t>& labels);
/// Samples of a float32 volume on `domain`'s grid; throws InputError on a shape mismatch.
GridField to_grid_field(const Volume& v, const BLDomain& domain);

}  // namespace blreg
