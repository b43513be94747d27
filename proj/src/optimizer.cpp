#include "blreg/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "blreg/errors.hpp"
#include "blreg/harness/metrics.hpp"
#include "blreg/spectral.hpp"

namespace blreg {

namespace {

TimeFlow precondition(const TimeFlow& r, bool incompressible) {
  return map_nodes(r, [&](const BLField& n) { return incompressible ? leray_project(apply_K(n)) : apply_K(n); });
}

}  // namespace

PcgResult pcg_solve(const LinearOperator& hvp, const TimeFlow& g, double tolerance, int max_iterations,
                    bool incompressible) {
  PcgResult out;
  out.solution = g;
  out.solution.set_zero();
  TimeFlow r = g;
  TimeFlow z = precondition(r, incompressible);
  double rz = weighted_dot(r, z);
  if (!std::isfinite(rz)) throw NumericalError("pcg_solve: non-finite right-hand side");
  if (rz <= 0.0) return out;
  const double rz0 = rz;
  TimeFlow p = z;
  while (out.iterations < max_iterations) {
    const TimeFlow hp = hvp(p);
    const double php = weighted_dot(p, hp);
    if (!(php > 0.0)) {
      out.flag = PcgFlag::negative_curvature;
      if (out.iterations == 0) out.solution = z;
      return out;
    }
    const double alpha = rz / php;
    out.solution.axpy(alpha, p);
    r.axpy(-alpha, hp);
    if (!r.all_finite()) throw NumericalError("pcg_solve: non-finite residual");
    z = precondition(r, incompressible);
    const double rz_new = weighted_dot(r, z);
    ++out.iterations;
    out.relative_residual = std::sqrt(std::max(rz_new, 0.0) / rz0);
    if (out.relative_residual <= tolerance) return out;
    const double beta = rz_new / rz;
    rz = rz_new;
    p *= beta;
    p += z;
  }
  out.flag = PcgFlag::max_iterations;
  return out;
}

double relative_gradient_norm(const TimeFlow& g, const TimeFlow& g0) {
  const double d = max_abs_realized(g0);
  if (d == 0.0) return 0.0;
  return max_abs_realized(g) / d;
}

double max_flow_divergence(const TimeFlow& v) {
  double m = 0.0;
  for (const auto& n : v.nodes()) m = std::max(m, max_divergence(n));
  return m;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::converged: return "converged";
    case Status::max_iterations: return "max_iterations";
    case Status::stalled: return "stalled";
  }
  return "unknown";
}

std::string to_string(Method m) {
  switch (m) {
    case Method::newton: return "newton";
    case Method::gauss_newton: return "gauss_newton";
    case Method::gradient_descent: return "gradient_descent";
  }
  return "unknown";
}

OptimizationResult minimize(Objective& objective, const TimeFlow& v0, const OptimizerConfig& cfg,
                            const IterationCallback& on_iteration) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const bool incompressible = objective.config().incompressible;

  OptimizationResult res;
  TimeFlow v = objective.constrain(v0);
  objective.prepare(v);
  ObjectiveEvaluation eval = objective.evaluate(v);
  const TimeFlow g0 = eval.gradient;

  int pcg_used = 0;
  double step = 0.0;
  bool negative = false;
  double gd_step = cfg.initial_step;
  for (int k = 0;; ++k) {
    IterationRecord rec;
    rec.outer = k;
    rec.energy = eval.energy;
    rec.mse_rel = mse_rel(eval.m1, objective.source(), objective.target());
    rec.gradient_rel = relative_gradient_norm(eval.gradient, g0);
    rec.pcg_iterations = pcg_used;
    rec.step = step;
    rec.negative_curvature = negative;
    rec.time_steps = objective.steps();
    rec.max_divergence = incompressible ? max_flow_divergence(v) : 0.0;
    rec.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    res.history.push_back(rec);
    if (on_iteration) on_iteration(rec);

    if (rec.gradient_rel <= cfg.gradient_tolerance) {
      res.status = Status::converged;
      break;
    }
    if (k >= cfg.max_outer) {
      res.status = Status::max_iterations;
      break;
    }

    TimeFlow direction;
    pcg_used = 0;
    negative = false;
    double eps = cfg.initial_step;
    if (cfg.method == Method::gradient_descent) {
      direction = precondition(eval.gradient, incompressible);
      eps = gd_step;
    } else {
      const HessianKind kind = cfg.method == Method::newton ? HessianKind::newton : HessianKind::gauss_newton;
      const double eta =
          cfg.eisenstat_walker ? std::min(cfg.pcg_tolerance, std::sqrt(rec.gradient_rel)) : cfg.pcg_tolerance;
      const PcgResult pcg = pcg_solve([&](const TimeFlow& p) { return objective.hessian_vector(eval, p, kind); },
                                      eval.gradient, eta, cfg.max_inner, incompressible);
      direction = pcg.solution;
      pcg_used = pcg.iterations;
      negative = pcg.flag == PcgFlag::negative_curvature;
      res.total_pcg_iterations += pcg.iterations;
      res.negative_curvature_events += negative ? 1 : 0;
    }
    direction = objective.constrain(std::move(direction));

    const double slope = weighted_dot(eval.gradient, direction);
    bool accepted = false;
    TimeFlow trial;
    if (slope > 0.0) {
      for (int h = 0; h <= cfg.max_halvings; ++h, eps *= cfg.backtrack) {
        trial = v;
        trial.axpy(-eps, direction);
        trial = objective.constrain(std::move(trial));
        const double e = objective.energy(trial);
        if (std::isfinite(e) && e <= eval.energy - cfg.armijo * eps * slope) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      res.status = Status::stalled;
      break;
    }
    step = eps;
    if (cfg.method == Method::gradient_descent) gd_step = 2.0 * eps;
    v = std::move(trial);
    objective.prepare(v);
    eval = objective.evaluate(v);
  }
  res.velocity = v;
  res.final = std::move(eval);
  return res;
}

}  // namespace blreg
