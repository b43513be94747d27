#include "blreg/errors.hpp"
#include "blreg/objective.hpp"
#include "blreg/spectral.hpp"

namespace blreg {

namespace {

struct DeformationCache : EvaluationCache {
  PhiTrajectory phi;
  AdjointSweep adjoint;
  WarpSamples source_at_phi1;  ///< I₀, ∇I₀ and ∇²I₀ at φ(1)
};

}  // namespace

ObjectiveEvaluation DeformationObjective::evaluate(const TimeFlow& v) const {
  auto cache = std::make_shared<DeformationCache>();
  cache->owner = this;
  cache->steps = steps_;
  cache->phi = integrate_phi(v, fixed_steps());
  cache->source_at_phi1 = warp_with_derivatives(source_interp_, include(cache->phi.u.back()), 2);

  ObjectiveEvaluation eval;
  fill_energy(eval, v, cache->source_at_phi1.value);
  eval.lambda1 = endpoint_lambda(eval.m1);

  // ρ̃(1) = π(λ(1) ∇I₀ ∘ φ(1)).
  const BLField rho1 = project(scale_vector(eval.lambda1, cache->source_at_phi1.gradient));
  cache->adjoint = integrate_rho(cache->phi, v, rho1, true);
  eval.gradient = assemble(v, cache->adjoint.velocity_cotangent);
  eval.cache = std::move(cache);
  return eval;
}

TimeFlow DeformationObjective::hessian_vector(const ObjectiveEvaluation& eval, const TimeFlow& dv_in,
                                              HessianKind kind) const {
  check_cache(eval, dv_in);
  const auto& cache = static_cast<const DeformationCache&>(*eval.cache);
  const TimeFlow dv = constrain(dv_in);
  const bool gn = kind == HessianKind::gauss_newton;
  const int d = domain().dim();

  const PhiTangent tangent = integrate_incremental_phi(cache.phi, dv);
  const GridField du1 = include(tangent.du.back());
  const GridField& grad = cache.source_at_phi1.gradient;

  // δm(1) = ∇I₀ ∘ φ(1) · δφ(1),  δλ(1) = -(2/σ²) δm(1).
  GridField dlambda1 = pointwise_dot(grad, du1);
  dlambda1 *= -2.0 * mismatch_weight();
  GridField drho1_grid = scale_vector(dlambda1, grad);
  if (!gn) {
    // λ(1) · δ(∇I₀ ∘ φ(1)) = λ(1) ∇²I₀ ∘ φ(1) δφ(1)
    const GridField& hess = cache.source_at_phi1.hessian;
    for (int i = 0; i < d; ++i) {
      auto o = drho1_grid.component(i);
      for (std::size_t p = 0; p < o.size(); ++p) {
        double s = 0.0;
        for (int j = 0; j < d; ++j) s += hess.component(i * d + j)[p] * du1.component(j)[p];
        o[p] += eval.lambda1.data()[p] * s;
      }
    }
  }
  const IncrementalAdjoint inc =
      integrate_incremental_rho(cache.phi, cache.adjoint, eval.velocity, tangent, project(drho1_grid), gn);

  TimeFlow out = dv;
  for (int i = 0; i < out.node_count(); ++i) {
    out.node(i) = apply_L(dv.node(i));
    out.node(i).axpy(1.0 / dv.weight(i), inc.velocity_cotangent.node(i));
    out.node(i).symmetrize();
  }
  return constrain(std::move(out));
}

}  // namespace blreg
