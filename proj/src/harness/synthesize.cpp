#include "blreg/harness/synthesize.hpp"

#include <cmath>
#include <numbers>

#include "blreg/errors.hpp"

namespace blreg {

namespace {

double periodic(double x) { return x - std::round(x); }

double smooth_step(double z, double width) { return 0.5 * (1.0 + std::tanh(z / width)); }

template <typename F>
GridField sample(const BLDomain& dom, F&& f) {
  GridField out = GridField::scalar(dom);
  const Dims3& N = dom.grid();
  for_each_voxel(dom, [&](int i0, int i1, int i2, std::size_t idx) {
    out.data()[idx] = f(std::array<double, 3>{double(i0) / N[0], double(i1) / N[1], double(i2) / N[2]});
  });
  return out;
}

struct Jitter {
  std::array<double, 3> offset{};
};

Jitter make_jitter(std::uint64_t seed, int dim) {
  Jitter j;
  if (seed == 0) return j;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.02, 0.02);
  for (int a = 0; a < dim; ++a) j.offset[std::size_t(a)] = u(rng);
  return j;
}

}  // namespace

PairKind parse_pair_kind(const std::string& name) {
  if (name == "translation") return PairKind::translation;
  if (name == "swirl") return PairKind::swirl;
  if (name == "c_to_circle") return PairKind::c_to_circle;
  throw ConfigError("unknown synthetic pair kind '" + name + "'");
}

std::string to_string(PairKind kind) {
  switch (kind) {
    case PairKind::translation: return "translation";
    case PairKind::swirl: return "swirl";
    case PairKind::c_to_circle: return "c_to_circle";
  }
  return "unknown";
}

SyntheticPair synthesize_pair(const BLDomain& dom, const SynthesisOptions& opt) {
  const int d = dom.dim();
  for (int j = 0; j < d; ++j) {
    if (dom.grid()[j] < 16) throw InputError("synthesize_pair: at least 16 samples per axis required");
  }
  const Jitter jit = make_jitter(opt.seed, d);
  std::array<double, 3> c{};
  for (int j = 0; j < d; ++j) c[std::size_t(j)] = 0.5 + jit.offset[std::size_t(j)];

  SyntheticPair pair;
  switch (opt.kind) {
    case PairKind::translation: {
      const double s2 = 2.0 * 0.1 * 0.1;
      auto bump = [&](const std::array<double, 3>& x, double shift) {
        double r2 = 0.0;
        for (int j = 0; j < d; ++j) {
          const double z = periodic(x[std::size_t(j)] - shift - c[std::size_t(j)]);
          r2 += z * z;
        }
        return std::exp(-r2 / s2);
      };
      pair.source = sample(dom, [&](const auto& x) { return bump(x, 0.0); });
      pair.target = sample(dom, [&](const auto& x) { return bump(x, opt.shift); });
      pair.velocity.assign(std::size_t(d), opt.shift);
      break;
    }
    case PairKind::swirl: {
      // Three off-centre blobs; the target is the source under a rotation whose
      // angle depends only on the distance to the centre, an area-preserving map.
      const double s2 = 2.0 * 0.06 * 0.06;
      auto blobs = [&](double y0, double y1, double y2) {
        double v = 0.0;
        for (int b = 0; b < 3; ++b) {
          const double a = 2.0 * std::numbers::pi * b / 3.0;
          const double z0 = y0 - 0.16 * std::cos(a), z1 = y1 - 0.16 * std::sin(a);
          v += std::exp(-(z0 * z0 + z1 * z1 + y2 * y2) / s2);
        }
        return v;
      };
      auto image = [&](const std::array<double, 3>& x, double angle) {
        const double y0 = periodic(x[0] - c[0]), y1 = periodic(x[1] - c[1]);
        const double y2 = d == 3 ? periodic(x[2] - c[2]) : 0.0;
        const double th = -angle * std::exp(-(y0 * y0 + y1 * y1) / (2.0 * 0.2 * 0.2));
        const double r0 = std::cos(th) * y0 - std::sin(th) * y1;
        const double r1 = std::sin(th) * y0 + std::cos(th) * y1;
        return blobs(r0, r1, y2);
      };
      pair.source = sample(dom, [&](const auto& x) { return image(x, 0.0); });
      pair.target = sample(dom, [&](const auto& x) { return image(x, opt.swirl); });
      break;
    }
    case PairKind::c_to_circle: {
      const double r_in = 0.14, r_out = 0.3, edge = 0.02, gap = 0.45;
      auto ring = [&](const std::array<double, 3>& x, bool open) {
        double r2 = 0.0;
        std::array<double, 3> y{};
        for (int j = 0; j < d; ++j) {
          y[std::size_t(j)] = periodic(x[std::size_t(j)] - c[std::size_t(j)]);
          if (j < 2) r2 += y[std::size_t(j)] * y[std::size_t(j)];
        }
        const double r = std::sqrt(r2);
        double v = smooth_step(r - r_in, edge) * smooth_step(r_out - r, edge);
        if (open) v *= smooth_step(std::abs(std::atan2(y[1], y[0])) * r - gap * r, edge);
        if (d == 3) v *= smooth_step(0.3 - std::abs(y[2]), edge);
        return v;
      };
      pair.source = sample(dom, [&](const auto& x) { return ring(x, true); });
      pair.target = sample(dom, [&](const auto& x) { return ring(x, false); });
      pair.source_labels = threshold_labels(pair.source);
      pair.target_labels = threshold_labels(pair.target);
      break;
    }
  }
  return pair;
}

std::vector<std::int32_t> threshold_labels(const GridField& f, double threshold) {
  std::vector<std::int32_t> out(f.data().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f.data()[i] > threshold ? 1 : 0;
  return out;
}

BLField random_bl_field(const BLDomain& dom, int components, std::mt19937_64& rng, double amplitude) {
  std::normal_distribution<double> n(0.0, 1.0);
  BLField f(dom, components);
  for (int c = 0; c < components; ++c) {
    for_each_frequency(dom, [&](int k0, int k1, int k2, std::size_t) {
      const std::size_t self = dom.spectral_index(k0, k1, k2);
      const std::size_t mirror = dom.spectral_index(-k0, -k1, -k2);
      if (self > mirror) return;
      const double decay = amplitude / (1.0 + double(k0 * k0 + k1 * k1 + k2 * k2));
      if (self == mirror) {
        f(c, k0, k1, k2) = Complex(decay * n(rng), 0.0);
      } else {
        const Complex z(decay * n(rng), decay * n(rng));
        f(c, k0, k1, k2) = z;
        f(c, -k0, -k1, -k2) = std::conj(z);
      }
    });
  }
  return f;
}

TimeFlow random_flow(const BLDomain& dom, FlowMode mode, int intervals, std::mt19937_64& rng, double amplitude) {
  TimeFlow v = TimeFlow::zeros(dom, mode, intervals);
  for (auto& n : v.nodes()) n = random_bl_field(dom, dom.dim(), rng, amplitude);
  return v;
}

}  // namespace blreg
