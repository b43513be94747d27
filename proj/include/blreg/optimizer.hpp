#pragma once

#include <functional>
#include <string>
#include <vector>

#include "blreg/objective.hpp"

namespace blreg {

enum class Method { newton, gauss_newton, gradient_descent };

struct OptimizerConfig {
  Method method = Method::gauss_newton;
  int max_outer = 50;
  double gradient_tolerance = 0.01;  ///< on ‖g‖∞,rel
  double pcg_tolerance = 0.1;        ///< η, relative preconditioned residual
  int max_inner = 10;
  bool eisenstat_walker = false;
  double backtrack = 0.5;
  double armijo = 1e-4;
  double initial_step = 1.0;
  int max_halvings = 20;
};

struct IterationRecord {
  int outer = 0;
  double energy = 0.0;
  double mse_rel = 0.0;
  double gradient_rel = 0.0;
  int pcg_iterations = 0;     ///< inner iterations spent to produce this iterate
  double step = 0.0;          ///< accepted ε that produced this iterate
  bool negative_curvature = false;
  int time_steps = 0;         ///< RK4 steps used for this iterate
  double max_divergence = 0.0;
  double wall_seconds = 0.0;
};

enum class PcgFlag { converged, max_iterations, negative_curvature };

struct PcgResult {
  TimeFlow solution;
  int iterations = 0;
  PcgFlag flag = PcgFlag::converged;
  double relative_residual = 0.0;
};

using LinearOperator = std::function<TimeFlow(const TimeFlow&)>;

/// Solves H x = g with preconditioner K̃ (Leray-projected when `incompressible`),
/// using the quadrature-weighted l2 product. On ⟨p, Hp⟩ <= 0 returns the current
/// iterate, or K̃g when that happens on the first iteration.
PcgResult pcg_solve(const LinearOperator& hvp, const TimeFlow& g, double tolerance, int max_iterations,
                    bool incompressible = false);

/// ‖ι(g)‖∞ / ‖ι(g0)‖∞ over all nodes; 0 when g0 vanishes.
double relative_gradient_norm(const TimeFlow& g, const TimeFlow& g0);

/// Max over nodes of the realized divergence.
double max_flow_divergence(const TimeFlow& v);

enum class Status { converged, max_iterations, stalled };
std::string to_string(Status s);
std::string to_string(Method m);

struct OptimizationResult {
  TimeFlow velocity;
  ObjectiveEvaluation final;
  std::vector<IterationRecord> history;
  Status status = Status::max_iterations;
  int total_pcg_iterations = 0;
  int negative_curvature_events = 0;
};

using IterationCallback = std::function<void(const IterationRecord&)>;

/// Reduced-space Newton-Krylov / Gauss-Newton-Krylov / preconditioned gradient
/// descent with Armijo backtracking. Accepted energies never increase within a
/// fixed time discretization.
OptimizationResult minimize(Objective& objective, const TimeFlow& v0, const OptimizerConfig& config,
                            const IterationCallback& on_iteration = {});

}  // namespace blreg
