#pragma once

#include <vector>

#include "blreg/fields.hpp"

namespace blreg {

enum class FlowMode { stationary, nonstationary };

/// Band-limited velocity on [0,1]. A non-stationary flow keeps N_t+1 nodes at
/// t_i = i/N_t and is linear in t between them; a stationary flow keeps one
/// field that is presented at every time.
class TimeFlow {
 public:
  TimeFlow() = default;
  static TimeFlow stationary(BLField v);
  static TimeFlow nonstationary(std::vector<BLField> nodes);
  static TimeFlow zeros(const BLDomain& domain, FlowMode mode, int intervals);

  FlowMode mode() const { return mode_; }
  bool is_stationary() const { return mode_ == FlowMode::stationary; }
  /// N_t. Stationary flows report 1.
  int intervals() const { return int(nodes_.size()) - (is_stationary() ? 0 : 1); }
  int node_count() const { return int(nodes_.size()); }
  const BLDomain& domain() const { return nodes_.front().domain(); }

  BLField& node(int i) { return nodes_[std::size_t(i)]; }
  const BLField& node(int i) const { return nodes_[std::size_t(i)]; }
  std::vector<BLField>& nodes() { return nodes_; }
  const std::vector<BLField>& nodes() const { return nodes_; }

  /// Trapezoidal quadrature weight of node i (1 for a stationary flow).
  double weight(int i) const;
  /// Node i's share of v(t): the hat function h_i(t) (1 for a stationary flow).
  double hat(int i, double t) const;
  /// v(t).
  BLField at(double t) const;
  /// Adds s * h_i(t) * f to every node i, the transpose of at().
  void accumulate(double t, double s, const BLField& f);

  TimeFlow& operator+=(const TimeFlow& other);
  TimeFlow& operator-=(const TimeFlow& other);
  TimeFlow& operator*=(double a);
  TimeFlow& axpy(double a, const TimeFlow& x);
  void set_zero();
  bool all_finite() const;

  friend TimeFlow operator+(TimeFlow a, const TimeFlow& b) { return a += b; }
  friend TimeFlow operator-(TimeFlow a, const TimeFlow& b) { return a -= b; }
  friend TimeFlow operator*(double s, TimeFlow a) { return a *= s; }

 private:
  void check_compatible(const TimeFlow& other) const;

  FlowMode mode_ = FlowMode::stationary;
  std::vector<BLField> nodes_;
};

/// sum_i w_i <a_i, b_i>, the quadrature of the l2 product over [0,1].
double weighted_dot(const TimeFlow& a, const TimeFlow& b);
double weighted_norm(const TimeFlow& a);
/// ½ sum_i w_i <L a_i, a_i>.
double regularity_energy(const TimeFlow& v);

/// Applies f to every node.
template <typename F>
TimeFlow map_nodes(const TimeFlow& v, F&& f) {
  TimeFlow out = v;
  for (auto& n : out.nodes()) n = f(n);
  return out;
}

/// Max over nodes and grid points of |ι(v_i)| (Euclidean length of the vector).
double max_speed(const TimeFlow& v);
/// Max over nodes of ‖ι(g_i)‖∞ taken componentwise.
double max_abs_realized(const TimeFlow& v);

}  // namespace blreg
