#include "blreg/time_flow.hpp"

#include <algorithm>
#include <cmath>

#include "blreg/errors.hpp"
#include "blreg/spectral.hpp"

namespace blreg {

TimeFlow TimeFlow::stationary(BLField v) {
  TimeFlow f;
  f.mode_ = FlowMode::stationary;
  f.nodes_.push_back(std::move(v));
  return f;
}

TimeFlow TimeFlow::nonstationary(std::vector<BLField> nodes) {
  if (nodes.size() < 2) throw DomainMismatch("TimeFlow: a non-stationary flow needs N_t + 1 >= 2 nodes");
  for (const auto& n : nodes) {
    if (!(n.domain() == nodes.front().domain()) || n.components() != nodes.front().components()) {
      throw DomainMismatch("TimeFlow: nodes live on different domains");
    }
  }
  TimeFlow f;
  f.mode_ = FlowMode::nonstationary;
  f.nodes_ = std::move(nodes);
  return f;
}

TimeFlow TimeFlow::zeros(const BLDomain& domain, FlowMode mode, int intervals) {
  if (mode == FlowMode::stationary) return stationary(BLField::vector(domain));
  if (intervals < 1) throw DomainMismatch("TimeFlow: N_t must be >= 1");
  return nonstationary(std::vector<BLField>(std::size_t(intervals) + 1, BLField::vector(domain)));
}

double TimeFlow::weight(int i) const {
  if (is_stationary()) return 1.0;
  const int nt = intervals();
  return (i == 0 || i == nt) ? 0.5 / nt : 1.0 / nt;
}

double TimeFlow::hat(int i, double t) const {
  if (is_stationary()) return 1.0;
  const double x = t * intervals() - i;
  return std::max(0.0, 1.0 - std::abs(x));
}

BLField TimeFlow::at(double t) const {
  if (is_stationary()) return nodes_.front();
  const int nt = intervals();
  const double x = std::clamp(t, 0.0, 1.0) * nt;
  const int i = std::min(int(std::floor(x)), nt - 1);
  const double f = x - i;
  if (f == 0.0) return nodes_[std::size_t(i)];
  BLField out = nodes_[std::size_t(i)];
  out *= 1.0 - f;
  out.axpy(f, nodes_[std::size_t(i) + 1]);
  return out;
}

void TimeFlow::accumulate(double t, double s, const BLField& f) {
  if (is_stationary()) {
    nodes_.front().axpy(s, f);
    return;
  }
  const int nt = intervals();
  const double x = std::clamp(t, 0.0, 1.0) * nt;
  const int i = std::min(int(std::floor(x)), nt - 1);
  const double fr = x - i;
  nodes_[std::size_t(i)].axpy(s * (1.0 - fr), f);
  if (fr != 0.0) nodes_[std::size_t(i) + 1].axpy(s * fr, f);
}

void TimeFlow::check_compatible(const TimeFlow& other) const {
  if (mode_ != other.mode_ || nodes_.size() != other.nodes_.size()) {
    throw DomainMismatch("TimeFlow: operands differ in mode or node count");
  }
}

TimeFlow& TimeFlow::operator+=(const TimeFlow& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < nodes_.size(); ++i) nodes_[i] += other.nodes_[i];
  return *this;
}

TimeFlow& TimeFlow::operator-=(const TimeFlow& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < nodes_.size(); ++i) nodes_[i] -= other.nodes_[i];
  return *this;
}

TimeFlow& TimeFlow::operator*=(double a) {
  for (auto& n : nodes_) n *= a;
  return *this;
}

TimeFlow& TimeFlow::axpy(double a, const TimeFlow& x) {
  check_compatible(x);
  for (std::size_t i = 0; i < nodes_.size(); ++i) nodes_[i].axpy(a, x.nodes_[i]);
  return *this;
}

void TimeFlow::set_zero() {
  for (auto& n : nodes_) n.set_zero();
}

bool TimeFlow::all_finite() const {
  return std::ranges::all_of(nodes_, [](const BLField& n) { return n.all_finite(); });
}

double weighted_dot(const TimeFlow& a, const TimeFlow& b) {
  if (a.mode() != b.mode() || a.node_count() != b.node_count()) {
    throw DomainMismatch("weighted_dot: operands differ in mode or node count");
  }
  double s = 0.0;
  for (int i = 0; i < a.node_count(); ++i) s += a.weight(i) * dot(a.node(i), b.node(i));
  return s;
}

double weighted_norm(const TimeFlow& a) { return std::sqrt(weighted_dot(a, a)); }

double regularity_energy(const TimeFlow& v) {
  double s = 0.0;
  for (int i = 0; i < v.node_count(); ++i) s += v.weight(i) * dot(apply_L(v.node(i)), v.node(i));
  return 0.5 * s;
}

double max_speed(const TimeFlow& v) {
  double m = 0.0;
  for (const auto& n : v.nodes()) {
    const GridField g = include(n);
    for (std::size_t p = 0; p < g.component_size(); ++p) {
      double s = 0.0;
      for (int c = 0; c < g.components(); ++c) s += g.component(c)[p] * g.component(c)[p];
      m = std::max(m, std::sqrt(s));
    }
  }
  return m;
}

double max_abs_realized(const TimeFlow& v) {
  double m = 0.0;
  for (const auto& n : v.nodes()) m = std::max(m, include(n).max_abs());
  return m;
}

}  // namespace blreg
