#include "blreg/objective.hpp"

#include <cmath>

#include "blreg/errors.hpp"
#include "blreg/spectral.hpp"

namespace blreg {

namespace {

int flow_intervals(const ProblemConfig& c) { return c.mode == FlowMode::stationary ? 1 : c.time_nodes; }

}  // namespace

std::string to_string(Formulation f) { return f == Formulation::state ? "state" : "deformation"; }

Objective::Objective(GridField source, GridField target, ProblemConfig config)
    : source_(std::move(source)),
      target_(std::move(target)),
      config_(config),
      source_interp_(source_, config.interpolation) {
  if (source_.components() != 1 || target_.components() != 1) {
    throw DomainMismatch("Objective: images must be scalar fields");
  }
  if (!(source_.domain() == target_.domain())) throw DomainMismatch("Objective: images live on different grids");
  if (!(config_.sigma2 > 0.0)) throw ConfigError("Objective: sigma2 must be positive");
  if (config_.mode == FlowMode::nonstationary && config_.time_nodes < 1) {
    throw ConfigError("Objective: time_nodes must be >= 1");
  }
  if (!source_.all_finite() || !target_.all_finite()) throw InputError("Objective: images contain NaN or Inf");
  set_steps(config_.transport.steps);
}

void Objective::set_steps(int steps) {
  const int nt = flow_intervals(config_);
  steps_ = ((std::max(1, steps) + nt - 1) / nt) * nt;
}

bool Objective::prepare(const TimeFlow& v) {
  if (config_.transport.cfl == CflPolicy::ignore) return false;
  const CflReport r = check_cfl(v, steps_, config_.transport.cfl_limit);
  if (r.ok) return false;
  TransportOptions opts = config_.transport;
  opts.steps = steps_;
  set_steps(resolve_steps(v, opts));  // throws CflViolation under CflPolicy::fail
  return true;
}

TimeFlow Objective::zero_velocity() const { return TimeFlow::zeros(domain(), config_.mode, config_.time_nodes); }

TimeFlow Objective::constrain(TimeFlow v) const {
  if (config_.incompressible) {
    for (auto& n : v.nodes()) n = leray_project(n);
  }
  return v;
}

TransportOptions Objective::fixed_steps() const {
  TransportOptions opts = config_.transport;
  opts.steps = steps_;
  opts.cfl = CflPolicy::ignore;
  return opts;
}

double Objective::mismatch_weight() const { return std::isinf(config_.sigma2) ? 0.0 : 1.0 / config_.sigma2; }

GridField Objective::endpoint_lambda(const GridField& m1) const {
  GridField lambda = m1 - target_;
  lambda *= -2.0 * mismatch_weight();
  if (!lambda.all_finite()) throw NumericalError("endpoint adjoint is not finite; sigma2 too small?");
  return lambda;
}

void Objective::fill_energy(ObjectiveEvaluation& eval, const TimeFlow& v, const GridField& m1) const {
  eval.velocity = v;
  eval.regularity = regularity_energy(v);
  eval.mismatch = mismatch_weight() * (m1 - target_).squared_l2();
  eval.energy = eval.regularity + eval.mismatch;
  eval.m1 = m1;
}

double Objective::energy(const TimeFlow& v) const {
  return regularity_energy(v) + mismatch_weight() * (warped_source(v) - target_).squared_l2();
}

GridField Objective::warped_source(const TimeFlow& v) const {
  const PhiTrajectory phi = integrate_phi(v, fixed_steps());
  return warp_with_derivatives(source_interp_, include(phi.u.back()), 0).value;
}

GridField Objective::final_displacement(const TimeFlow& v) const {
  return include(integrate_phi(v, fixed_steps()).u.back());
}

TimeFlow Objective::assemble(const TimeFlow& v, const TimeFlow& cotangent) const {
  TimeFlow g = v;
  for (int i = 0; i < g.node_count(); ++i) {
    g.node(i) = apply_L(v.node(i));
    g.node(i).axpy(1.0 / v.weight(i), cotangent.node(i));
    g.node(i).symmetrize();
  }
  if (!g.all_finite()) throw NumericalError("gradient is not finite");
  return constrain(std::move(g));
}

void Objective::check_cache(const ObjectiveEvaluation& eval, const TimeFlow& dv) const {
  if (!eval.cache || eval.cache->owner != this || eval.cache->steps != steps_) {
    throw StaleCache("hessian_vector: evaluation belongs to another objective or discretization");
  }
  if (dv.mode() != eval.velocity.mode() || dv.node_count() != eval.velocity.node_count() ||
      !(dv.domain() == eval.velocity.domain())) {
    throw StaleCache("hessian_vector: direction does not match the evaluated velocity");
  }
}

std::unique_ptr<Objective> make_objective(Formulation kind, GridField source, GridField target,
                                          const ProblemConfig& config) {
  if (kind == Formulation::state) return std::make_unique<StateObjective>(std::move(source), std::move(target), config);
  return std::make_unique<DeformationObjective>(std::move(source), std::move(target), config);
}

}  // namespace blreg
