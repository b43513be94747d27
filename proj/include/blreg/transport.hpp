#pragma once

#include <array>
#include <map>
#include <memory>
#include <vector>

#include "blreg/spectral.hpp"
#include "blreg/time_flow.hpp"

namespace blreg {

enum class CflPolicy {
  refine,  ///< raise the step count until the bound holds
  fail,    ///< throw CflViolation
  ignore,  ///< integrate with the requested steps regardless
};

struct TransportOptions {
  int steps = 10;  ///< RK4 steps on [0,1]; rounded up to a multiple of N_t
  CflPolicy cfl = CflPolicy::refine;
  double cfl_limit = 0.5;
};

struct CflReport {
  double number = 0.0;     ///< max_t ‖ι(v_t)‖∞ Δt / min_j h_j
  bool ok = true;
  int proposed_steps = 0;  ///< smallest step count with number <= limit
};

CflReport check_cfl(const TimeFlow& v, int steps, double limit = 0.5);
CflReport check_cfl(double max_speed, double min_spacing, int steps, double limit = 0.5);

/// Step count to integrate v with: opts.steps rounded up to a multiple of
/// N_t, then refined or rejected according to opts.cfl.
int resolve_steps(const TimeFlow& v, const TransportOptions& opts);

/// Band-limited and padded realizations of v at the RK4 stage times
/// t = k Δt / 2, built on first use.
class StageVelocities {
 public:
  struct Entry {
    BLField bl;
    PaddedField padded;
  };

  StageVelocities(const TimeFlow& v, int steps);
  int steps() const { return steps_; }
  double dt() const { return 1.0 / steps_; }
  /// Velocity at half-step index k (time k Δt / 2).
  std::shared_ptr<const Entry> at_half_step(int k);

 private:
  const TimeFlow* flow_;
  int steps_;
  std::map<int, std::shared_ptr<const Entry>> cache_;
};

/// One RK4 stage of the forward map: input displacement a, the velocity seen
/// at that stage and the padded realization of D̃a.
struct RkStage {
  int half_step = 0;
  BLField a;
  std::shared_ptr<const StageVelocities::Entry> velocity;
  PaddedField jacobian;
};

/// φ̃ = id + ũ at t_n = n/M, n = 0..M, plus every stage for adjoint reuse.
struct PhiTrajectory {
  int steps = 0;
  std::vector<BLField> u;
  std::vector<std::array<RkStage, 4>> stages;
  double dt() const { return 1.0 / steps; }
};

/// Forward RK4 of ∂_t ũ = -ṽ - D̃ũ ⋆ ṽ from ũ(0) = 0.
PhiTrajectory integrate_phi(const TimeFlow& v, const TransportOptions& opts);

/// ψ̃ = id + w̃ and J̃ at t_n = n/M, integrated backward from w̃(1) = 0, J̃(1) = 1:
/// ∂_t w̃ = -ṽ - D̃w̃ ⋆ ṽ,  ∂_t J̃ = -∇̃·(J̃ ⋆ ṽ).
struct PsiJTrajectory {
  int steps = 0;
  std::vector<BLField> w;
  std::vector<BLField> J;
};
PsiJTrajectory integrate_psi_J(const TimeFlow& v, int steps);
PsiJTrajectory integrate_psi_J(const TimeFlow& v, const TransportOptions& opts);

/// Linearization of the forward map along δṽ, with the stage increments.
struct PhiTangent {
  std::vector<BLField> du;
  std::vector<std::array<BLField, 4>> da;
  std::vector<std::array<std::shared_ptr<const StageVelocities::Entry>, 4>> dvelocity;
};
PhiTangent integrate_incremental_phi(const PhiTrajectory& phi, const TimeFlow& dv);

struct IncrementalState {
  std::vector<BLField> dphi;  ///< δφ̃ at t_n, δφ̃(0) = 0
  std::vector<BLField> dpsi;  ///< δψ̃ at t_n, δψ̃(1) = 0
  std::vector<BLField> dJ;    ///< δJ̃ at t_n, δJ̃(1) = 0
};
IncrementalState integrate_incremental_state(const TimeFlow& v, const TimeFlow& dv, const PhiTrajectory& phi);

/// Discrete adjoint of integrate_phi. Given ρ̃(1), sweeps backward so that
/// ρ̃ solves -∂_t ρ̃ - ∇̃·(ρ̃ ⋆ ṽ) = 0. Also returns the l2 gradient of
/// ṽ ↦ -⟨ρ̃(1), ũ(1)⟩ with respect to each velocity node (no quadrature weights).
struct AdjointSweep {
  std::vector<BLField> rho;                          ///< ρ̃ at t_n
  TimeFlow velocity_cotangent;
  std::vector<std::array<PaddedField, 4>> stage_rho; ///< padded stage cotangents, kept for second-order sweeps
};
AdjointSweep integrate_rho(const PhiTrajectory& phi, const TimeFlow& v, const BLField& rho1, bool keep_stages = false);

/// Tangent of integrate_rho along δṽ. The extra sources ∇̃·(ρ̃ ⋆ δṽ) and D̃δφ̃ ⋆ ρ̃
/// are dropped when `gauss_newton` is set.
struct IncrementalAdjoint {
  std::vector<BLField> drho;
  TimeFlow velocity_cotangent;
};
IncrementalAdjoint integrate_incremental_rho(const PhiTrajectory& phi, const AdjointSweep& base, const TimeFlow& v,
                                             const PhiTangent& tangent, const BLField& drho1, bool gauss_newton);

}  // namespace blreg
