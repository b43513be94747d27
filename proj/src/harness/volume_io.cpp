#include "blreg/harness/volume_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "blreg/errors.hpp"

namespace blreg {

namespace {

template <typename T>
void to_little(std::vector<T>& data) {
  if constexpr (std::endian::native == std::endian::big) {
    for (auto& x : data) {
      auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(x);
      std::reverse(bytes.begin(), bytes.end());
      x = std::bit_cast<T>(bytes);
    }
  }
}

}  // namespace

std::size_t Volume::voxel_count() const {
  std::size_t n = 1;
  for (int d : dims) n *= std::size_t(d);
  return n * std::size_t(components);
}

void write_volume(const std::filesystem::path& path, const Volume& v) {
  if (v.dims.empty() || v.dims.size() != v.spacing.size()) throw InputError("write_volume: dims and spacing disagree");
  const bool labels = v.dtype == "int32";
  if (!labels && v.dtype != "float32") throw InputError("write_volume: unsupported dtype " + v.dtype);
  if ((labels ? v.labels.size() : v.values.size()) != v.voxel_count()) {
    throw InputError("write_volume: payload length does not match the header");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("{}: cannot open for writing", path.string()));
  out << "BLVOL 1\ndims";
  for (int d : v.dims) out << ' ' << d;
  out << "\nspacing";
  for (double s : v.spacing) out << ' ' << fmt::format("{}", s);
  out << "\ncomponents " << v.components << "\ndtype " << v.dtype << "\nbyteorder little\nend\n";
  if (labels) {
    auto data = v.labels;
    to_little(data);
    out.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size() * sizeof(std::int32_t)));
  } else {
    auto data = v.values;
    to_little(data);
    out.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size() * sizeof(float)));
  }
  if (!out) throw InputError(fmt::format("{}: write failed", path.string()));
}

Volume read_volume(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("{}: cannot open", path.string()));
  std::string line;
  if (!std::getline(in, line) || line != "BLVOL 1") throw InputError(fmt::format("{}: not a volume file", path.string()));
  Volume v;
  std::string byteorder;
  while (std::getline(in, line) && line != "end") {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "dims") {
      for (int x; ls >> x;) v.dims.push_back(x);
    } else if (key == "spacing") {
      for (double x; ls >> x;) v.spacing.push_back(x);
    } else if (key == "components") {
      ls >> v.components;
    } else if (key == "dtype") {
      ls >> v.dtype;
    } else if (key == "byteorder") {
      ls >> byteorder;
    } else {
      throw InputError(fmt::format("{}: unknown header field '{}'", path.string(), key));
    }
  }
  if (line != "end") throw InputError(fmt::format("{}: header not terminated", path.string()));
  if (v.dims.empty() || v.spacing.size() != v.dims.size() || v.components < 1) {
    throw InputError(fmt::format("{}: header field 'dims'/'spacing'/'components' is malformed", path.string()));
  }
  for (int d : v.dims) {
    if (d < 1) throw InputError(fmt::format("{}: header field 'dims' must be positive", path.string()));
  }
  if (byteorder != "little") throw InputError(fmt::format("{}: header field 'byteorder' must be little", path.string()));
  const std::size_t n = v.voxel_count();
  auto read = [&](auto& data) {
    data.resize(n);
    using T = typename std::decay_t<decltype(data)>::value_type;
    in.read(reinterpret_cast<char*>(data.data()), std::streamsize(n * sizeof(T)));
    if (std::size_t(in.gcount()) != n * sizeof(T)) {
      throw InputError(fmt::format("{}: payload shorter than dims x dtype", path.string()));
    }
    if (in.peek() != std::char_traits<char>::eof()) {
      throw InputError(fmt::format("{}: payload longer than dims x dtype", path.string()));
    }
    to_little(data);
  };
  if (v.dtype == "float32") {
    read(v.values);
  } else if (v.dtype == "int32") {
    read(v.labels);
  } else {
    throw InputError(fmt::format("{}: header field 'dtype' must be float32 or int32", path.string()));
  }
  return v;
}

Volume to_volume(const GridField& f) {
  Volume v;
  const BLDomain& dom = f.domain();
  for (int j = 0; j < dom.dim(); ++j) {
    v.dims.push_back(dom.grid()[j]);
    v.spacing.push_back(dom.spacing(j));
  }
  v.components = f.components();
  v.values.assign(f.data().begin(), f.data().end());
  return v;
}

Volume to_label_volume(const BLDomain& dom, const std::vector<std::int32_t>& labels) {
  Volume v;
  for (int j = 0; j < dom.dim(); ++j) {
    v.dims.push_back(dom.grid()[j]);
    v.spacing.push_back(dom.spacing(j));
  }
  v.dtype = "int32";
  v.labels = labels;
  return v;
}

GridField to_grid_field(const Volume& v, const BLDomain& domain) {
  if (v.dtype != "float32") throw InputError("image volume must be float32");
  if (int(v.dims.size()) != domain.dim()) throw InputError("image dimensionality does not match the configured grid");
  for (int j = 0; j < domain.dim(); ++j) {
    if (v.dims[std::size_t(j)] != domain.grid()[j]) throw InputError("image dims do not match the configured grid");
  }
  GridField f(domain, v.components);
  for (std::size_t i = 0; i < v.values.size(); ++i) f.data()[i] = v.values[i];
  return f;
}

}  // namespace blreg
