#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blreg/objective.hpp"

namespace blreg {

struct GradientCheck {
  double analytic = 0.0;   ///< ⟨g, w⟩
  double fd = 0.0;         ///< (E(v+εw) - E(v-εw)) / 2ε
  double rel_error = 0.0;
  double order = 0.0;      ///< observed order of the FD error in ε
};

/// Central-difference check of the directional derivative along w.
GradientCheck check_gradient(const Objective& f, const ObjectiveEvaluation& eval, const TimeFlow& w, double eps = 1e-4);

/// ‖(g(v+εw) - g(v-εw))/2ε - Hw‖ / ‖Hw‖ in the weighted norm.
double check_hessian_vector(const Objective& f, const ObjectiveEvaluation& eval, const TimeFlow& w, double eps = 1e-4,
                            HessianKind kind = HessianKind::newton);

/// |⟨Hw1, w2⟩ - ⟨w1, Hw2⟩| / max(|⟨Hw1, w2⟩|, |⟨w1, Hw2⟩|).
double check_symmetry(const Objective& f, const ObjectiveEvaluation& eval, const TimeFlow& w1, const TimeFlow& w2,
                      HessianKind kind = HessianKind::newton);

/// min over directions of ⟨w, H_GN w⟩ / ⟨w, L̃w⟩ and the number of directions below 1 - 1e-8.
struct CurvatureCheck {
  double min_ratio = 0.0;
  int violations = 0;
  int directions = 0;
};
CurvatureCheck check_gauss_newton_curvature(const Objective& f, const ObjectiveEvaluation& eval,
                                            const std::vector<TimeFlow>& directions);

struct CheckEntry {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct DerivativeCheckOptions {
  int size = 32;
  int bound = 8;
  double alpha = 0.05;
  int exponent = 2;
  double sigma2 = 0.05;
  int time_nodes = 4;
  int steps = 8;
  int directions = 3;
  int curvature_directions = 20;
  std::uint64_t seed = 1;
  double eps = 1e-4;
  bool include_incompressible = true;
  bool include_nonstationary = true;
};

/// A small smooth registration problem with a random velocity, shared by the
/// CLI checks and the acceptance suite.
struct CheckProblem {
  std::unique_ptr<Objective> objective;
  TimeFlow velocity;
  std::vector<TimeFlow> directions;
};
CheckProblem make_check_problem(Formulation formulation, FlowMode mode, bool incompressible,
                                const DerivativeCheckOptions& options);

/// Gradient and Hessian checks over both objectives, both Hessian modes and
/// both incompressibility settings, plus the pure-regularizer surrogate.
std::vector<CheckEntry> run_derivative_checks(const DerivativeCheckOptions& options);

}  // namespace blreg
