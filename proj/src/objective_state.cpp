#include "blreg/errors.hpp"
#include "blreg/objective.hpp"
#include "blreg/spectral.hpp"

namespace blreg {

namespace {

// One time sample of the closed-form adjoint pipeline.
struct StateSample {
  int step = 0;
  GridField w;                 ///< ι(ψ̃(t)) - id
  GridField J;                 ///< ι(J̃(t))
  GridField m;                 ///< I₀ ∘ φ(t)
  GridField grad_m;            ///< central differences of m
  GridField source_grad;       ///< ∇I₀ ∘ φ(t)
  GridField lambda1_at_psi;    ///< λ(1) ∘ ψ(t)
  GridField grad_lambda1_at_psi;
  GridField lambda;            ///< J λ(1) ∘ ψ(t)
};

struct StateCache : EvaluationCache {
  PhiTrajectory phi;
  std::vector<StateSample> samples;
  /// Per velocity node: (sample index, weight) pairs of its data term.
  std::vector<std::vector<std::pair<int, double>>> weights;
};

// Quadrature of the data term: every integration step for a stationary flow
// (trapezoidal), the parameter nodes for a non-stationary one.
void build_quadrature(const TimeFlow& v, int steps, std::vector<int>& sample_steps,
                      std::vector<std::vector<std::pair<int, double>>>& weights) {
  sample_steps.clear();
  weights.assign(std::size_t(v.node_count()), {});
  if (v.is_stationary()) {
    for (int n = 0; n <= steps; ++n) {
      sample_steps.push_back(n);
      weights[0].emplace_back(n, (n == 0 || n == steps ? 0.5 : 1.0) / steps);
    }
  } else {
    const int stride = steps / v.intervals();
    for (int i = 0; i < v.node_count(); ++i) {
      sample_steps.push_back(i * stride);
      weights[std::size_t(i)].emplace_back(i, 1.0);
    }
  }
}

}  // namespace

ObjectiveEvaluation StateObjective::evaluate(const TimeFlow& v) const {
  auto cache = std::make_shared<StateCache>();
  cache->owner = this;
  cache->steps = steps_;
  cache->phi = integrate_phi(v, fixed_steps());
  const PsiJTrajectory psi = integrate_psi_J(v, steps_);

  std::vector<int> sample_steps;
  build_quadrature(v, steps_, sample_steps, cache->weights);

  ObjectiveEvaluation eval;
  const WarpSamples end = warp_with_derivatives(source_interp_, include(cache->phi.u.back()), 1);
  fill_energy(eval, v, end.value);
  eval.lambda1 = endpoint_lambda(eval.m1);
  const Interpolant lambda1(eval.lambda1, config_.interpolation);

  TimeFlow cotangent = v;
  cotangent.set_zero();
  cache->samples.reserve(sample_steps.size());
  for (int n : sample_steps) {
    StateSample s;
    s.step = n;
    WarpSamples m = warp_with_derivatives(source_interp_, include(cache->phi.u[std::size_t(n)]), 1);
    s.m = std::move(m.value);
    s.source_grad = std::move(m.gradient);
    s.grad_m = spatial_gradient(s.m);
    s.w = include(psi.w[std::size_t(n)]);
    s.J = include(psi.J[std::size_t(n)]);
    WarpSamples l = warp_with_derivatives(lambda1, s.w, 1);
    s.lambda1_at_psi = std::move(l.value);
    s.grad_lambda1_at_psi = std::move(l.gradient);
    s.lambda = scale_vector(s.J, s.lambda1_at_psi);
    if (!s.lambda.all_finite()) throw NumericalError("adjoint image is not finite");
    cache->samples.push_back(std::move(s));
  }
  for (int i = 0; i < v.node_count(); ++i) {
    for (auto [k, wt] : cache->weights[std::size_t(i)]) {
      const StateSample& s = cache->samples[std::size_t(k)];
      cotangent.node(i).axpy(wt * v.weight(i), project(scale_vector(s.lambda, s.grad_m)));
    }
  }
  eval.gradient = assemble(v, cotangent);
  eval.cache = std::move(cache);
  return eval;
}

TimeFlow StateObjective::hessian_vector(const ObjectiveEvaluation& eval, const TimeFlow& dv_in,
                                        HessianKind kind) const {
  check_cache(eval, dv_in);
  const auto& cache = static_cast<const StateCache&>(*eval.cache);
  const TimeFlow dv = constrain(dv_in);
  const TimeFlow& v = eval.velocity;
  const bool gn = kind == HessianKind::gauss_newton;

  const IncrementalState inc = integrate_incremental_state(v, dv, cache.phi);
  // δλ(1) = -(2/σ²) δm(1),  δm(1) = ∇I₀ ∘ φ(1) · δφ(1).
  GridField dlambda1 = pointwise_dot(cache.samples.back().source_grad, include(inc.dphi.back()));
  dlambda1 *= -2.0 * mismatch_weight();
  const Interpolant dlambda1_interp(dlambda1, config_.interpolation);

  std::vector<BLField> data;
  data.reserve(cache.samples.size());
  for (const StateSample& s : cache.samples) {
    const std::size_t n = std::size_t(s.step);
    GridField dlambda = scale_vector(s.J, warp_with_derivatives(dlambda1_interp, s.w, 0).value);
    GridField term;
    if (gn) {
      term = scale_vector(dlambda, s.grad_m);
    } else {
      dlambda += scale_vector(include(inc.dJ[n]), s.lambda1_at_psi);
      dlambda += scale_vector(s.J, pointwise_dot(s.grad_lambda1_at_psi, include(inc.dpsi[n])));
      term = scale_vector(dlambda, s.grad_m);
      const GridField dm = pointwise_dot(s.source_grad, include(inc.dphi[n]));
      term += scale_vector(s.lambda, spatial_gradient(dm));
    }
    data.push_back(project(term));
  }

  TimeFlow out = dv;
  for (int i = 0; i < out.node_count(); ++i) {
    out.node(i) = apply_L(dv.node(i));
    for (auto [k, wt] : cache.weights[std::size_t(i)]) out.node(i).axpy(wt, data[std::size_t(k)]);
    out.node(i).symmetrize();
  }
  return constrain(std::move(out));
}

StateObjective::SpatialTerms StateObjective::spatial_terms(const ObjectiveEvaluation& eval) const {
  if (!eval.cache || eval.cache->owner != this) throw StaleCache("spatial_terms: evaluation belongs to another objective");
  const auto& cache = static_cast<const StateCache&>(*eval.cache);
  SpatialTerms out;
  for (const StateSample& s : cache.samples) out.terms.push_back(scale_vector(s.lambda, s.grad_m));
  out.weights = cache.weights;
  return out;
}

}  // namespace blreg
