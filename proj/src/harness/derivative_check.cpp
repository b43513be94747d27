#include "blreg/harness/derivative_check.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "blreg/harness/synthesize.hpp"
#include "blreg/spectral.hpp"

namespace blreg {

namespace {

TimeFlow shifted(const TimeFlow& v, double eps, const TimeFlow& w) {
  TimeFlow out = v;
  out.axpy(eps, w);
  return out;
}

double fd_error(const Objective& f, const TimeFlow& v, const TimeFlow& w, double eps, double analytic, double* fd) {
  const double d = (f.energy(shifted(v, eps, w)) - f.energy(shifted(v, -eps, w))) / (2.0 * eps);
  if (fd) *fd = d;
  return std::abs(d - analytic);
}

// Scales every node so the flow's largest realized speed is `speed`.
TimeFlow with_speed(TimeFlow v, double speed) {
  const double s = max_speed(v);
  if (s > 0.0) v *= speed / s;
  return v;
}

}  // namespace

GradientCheck check_gradient(const Objective& f, const ObjectiveEvaluation& eval, const TimeFlow& w, double eps) {
  GradientCheck c;
  c.analytic = weighted_dot(eval.gradient, w);
  const double err = fd_error(f, eval.velocity, w, eps, c.analytic, &c.fd);
  c.rel_error = err / std::max(std::abs(c.analytic), std::numeric_limits<double>::min());
  const double e1 = fd_error(f, eval.velocity, w, 10.0 * eps, c.analytic, nullptr);
  const double e2 = fd_error(f, eval.velocity, w, 5.0 * eps, c.analytic, nullptr);
  c.order = (e1 > 0.0 && e2 > 0.0) ? std::log2(e1 / e2) : 0.0;
  return c;
}

double check_hessian_vector(const Objective& f, const ObjectiveEvaluation& eval, const TimeFlow& w, double eps,
                            HessianKind kind) {
  const TimeFlow hw = f.hessian_vector(eval, w, kind);
  TimeFlow fd = f.evaluate(shifted(eval.velocity, eps, w)).gradient;
  fd -= f.evaluate(shifted(eval.velocity, -eps, w)).gradient;
  fd *= 1.0 / (2.0 * eps);
  fd -= hw;
  return weighted_norm(fd) / std::max(weighted_norm(hw), std::numeric_limits<double>::min());
}

double check_symmetry(const Objective& f, const ObjectiveEvaluation& eval, const TimeFlow& w1, const TimeFlow& w2,
                      HessianKind kind) {
  const double a = weighted_dot(f.hessian_vector(eval, w1, kind), w2);
  const double b = weighted_dot(w1, f.hessian_vector(eval, w2, kind));
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

CurvatureCheck check_gauss_newton_curvature(const Objective& f, const ObjectiveEvaluation& eval,
                                            const std::vector<TimeFlow>& directions) {
  CurvatureCheck c;
  c.min_ratio = std::numeric_limits<double>::infinity();
  for (const TimeFlow& w0 : directions) {
    const TimeFlow w = f.constrain(w0);
    const double quad = weighted_dot(w, f.hessian_vector(eval, w, HessianKind::gauss_newton));
    const double reg = weighted_dot(w, map_nodes(w, [](const BLField& n) { return apply_L(n); }));
    const double ratio = quad / reg;
    c.min_ratio = std::min(c.min_ratio, ratio);
    if (!(quad >= (1.0 - 1e-8) * reg)) ++c.violations;
    ++c.directions;
  }
  return c;
}

CheckProblem make_check_problem(Formulation formulation, FlowMode mode, bool incompressible,
                                const DerivativeCheckOptions& o) {
  const BLDomain dom = BLDomain::cube(2, o.size, o.bound, o.alpha, o.exponent);
  SynthesisOptions so;
  so.kind = PairKind::swirl;
  SyntheticPair pair = synthesize_pair(dom, so);
  ProblemConfig pc;
  pc.sigma2 = o.sigma2;
  pc.incompressible = incompressible;
  pc.mode = mode;
  pc.time_nodes = o.time_nodes;
  pc.interpolation = Interpolation::cubic_bspline;
  pc.transport.steps = o.steps;
  pc.transport.cfl = CflPolicy::ignore;
  CheckProblem p;
  p.objective = make_objective(formulation, std::move(pair.source), std::move(pair.target), pc);
  std::mt19937_64 rng(o.seed);
  p.velocity = with_speed(p.objective->constrain(random_flow(dom, mode, o.time_nodes, rng)), 0.1);
  const int count = std::max(o.directions, o.curvature_directions);
  for (int i = 0; i < count; ++i) {
    p.directions.push_back(with_speed(p.objective->constrain(random_flow(dom, mode, o.time_nodes, rng)), 0.1));
  }
  return p;
}

std::vector<CheckEntry> run_derivative_checks(const DerivativeCheckOptions& o) {
  std::vector<CheckEntry> out;
  auto add = [&](std::string name, double value, double tol, bool passed, std::string detail = {}) {
    out.push_back({std::move(name), value, tol, passed, std::move(detail)});
  };

  {
    // Pure regularizer: E = ½⟨L̃v, v⟩, gradient L̃v.
    DerivativeCheckOptions q = o;
    q.sigma2 = std::numeric_limits<double>::infinity();
    CheckProblem p = make_check_problem(Formulation::deformation, FlowMode::stationary, false, q);
    const ObjectiveEvaluation e = p.objective->evaluate(p.velocity);
    TimeFlow diff = e.gradient;
    diff -= map_nodes(p.velocity, [](const BLField& n) { return apply_L(n); });
    const double err = weighted_norm(diff) / weighted_norm(e.gradient);
    add("surrogate gradient == L v", err, 1e-10, err <= 1e-10);
  }

  for (Formulation form : {Formulation::state, Formulation::deformation}) {
    for (FlowMode mode : {FlowMode::stationary, FlowMode::nonstationary}) {
      if (mode == FlowMode::nonstationary && !o.include_nonstationary) continue;
      for (bool incompressible : {false, true}) {
        if (incompressible && !o.include_incompressible) continue;
        const std::string tag = fmt::format("{} {} gamma={}", to_string(form),
                                            mode == FlowMode::stationary ? "stationary" : "nonstationary",
                                            incompressible ? 1 : 0);
        CheckProblem p = make_check_problem(form, mode, incompressible, o);
        const ObjectiveEvaluation e = p.objective->evaluate(p.velocity);
        double worst = 0.0, order = std::numeric_limits<double>::infinity();
        for (int i = 0; i < o.directions; ++i) {
          const GradientCheck g = check_gradient(*p.objective, e, p.directions[std::size_t(i)], o.eps);
          worst = std::max(worst, g.rel_error);
          order = std::min(order, g.order);
        }
        add(tag + ": gradient vs FD", worst, 1e-6, worst < 1e-6, fmt::format("min observed order {:.2f}", order));
        add(tag + ": gradient FD order", order, 1.8, order >= 1.8);

        double hv = 0.0;
        for (int i = 0; i < o.directions; ++i) {
          hv = std::max(hv, check_hessian_vector(*p.objective, e, p.directions[std::size_t(i)], o.eps));
        }
        add(tag + ": Newton Hvp vs FD", hv, 1e-4, hv < 1e-4);
        const double sym = check_symmetry(*p.objective, e, p.directions[0], p.directions[1]);
        add(tag + ": Newton symmetry", sym, 1e-8, sym < 1e-8);
        const double gsym = check_symmetry(*p.objective, e, p.directions[0], p.directions[1], HessianKind::gauss_newton);
        add(tag + ": Gauss-Newton symmetry", gsym, 1e-8, gsym < 1e-8);
        std::vector<TimeFlow> dirs(p.directions.begin(), p.directions.begin() + o.curvature_directions);
        const CurvatureCheck c = check_gauss_newton_curvature(*p.objective, e, dirs);
        add(tag + ": Gauss-Newton curvature violations", c.violations, 0, c.violations == 0,
            fmt::format("{} directions, min <w,Hw>/<w,Lw> = {:.6g}", c.directions, c.min_ratio));
      }
    }
  }
  return out;
}

}  // namespace blreg
