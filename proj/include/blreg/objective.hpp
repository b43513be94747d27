#pragma once

#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "blreg/grid.hpp"
#include "blreg/time_flow.hpp"
#include "blreg/transport.hpp"

namespace blreg {

enum class HessianKind { newton, gauss_newton };
enum class Formulation { state, deformation };
std::string to_string(Formulation f);

struct ProblemConfig {
  double sigma2 = 0.01;  ///< image-mismatch weight; +inf leaves only the regularizer
  bool incompressible = false;
  FlowMode mode = FlowMode::stationary;
  int time_nodes = 10;  ///< N_t for non-stationary flows
  HessianKind hessian = HessianKind::gauss_newton;
  Interpolation interpolation = Interpolation::linear;
  TransportOptions transport;
};

/// Trajectories retained by an evaluation; each objective extends this.
struct EvaluationCache {
  virtual ~EvaluationCache() = default;
  const void* owner = nullptr;
  int steps = 0;
};

struct ObjectiveEvaluation {
  TimeFlow velocity;
  double energy = 0.0;
  double regularity = 0.0;
  double mismatch = 0.0;
  TimeFlow gradient;
  GridField m1;
  GridField lambda1;
  std::shared_ptr<const EvaluationCache> cache;
};

/// E(ṽ) = ½ ∫ ⟨L̃ṽ_t, ṽ_t⟩ dt + (1/σ²) ‖I₀ ∘ ι(φ̃(1)) - I₁‖², with gradient and
/// Hessian products taken with respect to the quadrature-weighted l2 product
/// (weighted_dot).
class Objective {
 public:
  Objective(GridField source, GridField target, ProblemConfig config);
  virtual ~Objective() = default;

  virtual Formulation formulation() const = 0;

  const ProblemConfig& config() const { return config_; }
  const BLDomain& domain() const { return source_.domain(); }
  const GridField& source() const { return source_; }
  const GridField& target() const { return target_; }
  /// RK4 steps currently used by every evaluation.
  int steps() const { return steps_; }
  void set_steps(int steps);

  /// Checks the CFL bound for v against the current steps; refines them or throws
  /// CflViolation depending on the transport policy. Returns true when the steps changed.
  bool prepare(const TimeFlow& v);

  /// Zero velocity of the configured mode.
  TimeFlow zero_velocity() const;
  /// Leray-projects every node when the problem is incompressible.
  TimeFlow constrain(TimeFlow v) const;

  double energy(const TimeFlow& v) const;
  /// I₀ ∘ ι(φ̃(1)).
  GridField warped_source(const TimeFlow& v) const;
  /// ι(φ̃(1)) - id on the full grid.
  GridField final_displacement(const TimeFlow& v) const;

  virtual ObjectiveEvaluation evaluate(const TimeFlow& v) const = 0;
  virtual TimeFlow hessian_vector(const ObjectiveEvaluation& eval, const TimeFlow& dv, HessianKind kind) const = 0;
  TimeFlow hessian_vector(const ObjectiveEvaluation& eval, const TimeFlow& dv) const {
    return hessian_vector(eval, dv, config_.hessian);
  }

 protected:
  TransportOptions fixed_steps() const;
  double mismatch_weight() const;
  /// λ(1) = -(2/σ²)(m(1) - I₁).
  GridField endpoint_lambda(const GridField& m1) const;
  /// Fills the energy terms of an evaluation from v and m(1).
  void fill_energy(ObjectiveEvaluation& eval, const TimeFlow& v, const GridField& m1) const;
  /// g_i = L̃v_i + c_i / w_i, projected when incompressible.
  TimeFlow assemble(const TimeFlow& v, const TimeFlow& cotangent) const;
  void check_cache(const ObjectiveEvaluation& eval, const TimeFlow& dv) const;

  GridField source_;
  GridField target_;
  ProblemConfig config_;
  Interpolant source_interp_;
  int steps_ = 0;
};

/// Gradient through the closed-form adjoint λ(t) = ι(J̃(t)) λ(1) ∘ ι(ψ̃(t)) and the
/// image trajectory m(t) = I₀ ∘ ι(φ̃(t)).
class StateObjective final : public Objective {
 public:
  using Objective::Objective;
  Formulation formulation() const override { return Formulation::state; }
  ObjectiveEvaluation evaluate(const TimeFlow& v) const override;
  using Objective::hessian_vector;
  TimeFlow hessian_vector(const ObjectiveEvaluation& eval, const TimeFlow& dv, HessianKind kind) const override;

  /// Full-resolution data terms λ(t_n) ∇m(t_n) at the quadrature times, before
  /// projection, with their weights: the data part of the gradient of node i is
  /// sum_n weight(i, n) π(term_n).
  struct SpatialTerms {
    std::vector<GridField> terms;
    std::vector<std::vector<std::pair<int, double>>> weights;  ///< per velocity node: (term index, weight)
  };
  SpatialTerms spatial_terms(const ObjectiveEvaluation& eval) const;
};

/// Gradient through the discrete adjoint ρ̃ of the deformation transport.
class DeformationObjective final : public Objective {
 public:
  using Objective::Objective;
  Formulation formulation() const override { return Formulation::deformation; }
  ObjectiveEvaluation evaluate(const TimeFlow& v) const override;
  using Objective::hessian_vector;
  TimeFlow hessian_vector(const ObjectiveEvaluation& eval, const TimeFlow& dv, HessianKind kind) const override;
};

std::unique_ptr<Objective> make_objective(Formulation kind, GridField source, GridField target,
                                          const ProblemConfig& config);

}  // namespace blreg
