#include <doctest.h>

#include <limits>

#include "blreg/errors.hpp"
#include "blreg/grid.hpp"
#include "blreg/harness/derivative_check.hpp"
#include "blreg/harness/synthesize.hpp"
#include "blreg/objective.hpp"
#include "blreg/spectral.hpp"
#include "support.hpp"

using namespace blreg;

namespace {

const auto dom32 = BLDomain::cube(2, 32, 8, 0.05, 2);

ProblemConfig problem(FlowMode mode = FlowMode::stationary, bool incompressible = false) {
  ProblemConfig c;
  c.sigma2 = 0.05;
  c.mode = mode;
  c.time_nodes = 3;
  c.incompressible = incompressible;
  c.transport.steps = 6;
  c.transport.cfl = CflPolicy::ignore;
  return c;
}

SyntheticPair swirl_pair() {
  SynthesisOptions o;
  o.kind = PairKind::swirl;
  return synthesize_pair(dom32, o);
}

TimeFlow data_part(const ObjectiveEvaluation& e) {
  return e.gradient - map_nodes(e.velocity, [](const BLField& n) { return apply_L(n); });
}

}  // namespace

TEST_CASE("objective construction rejects bad inputs") {
  const SyntheticPair p = swirl_pair();
  ProblemConfig c = problem();
  c.sigma2 = 0.0;
  CHECK_THROWS_AS(StateObjective(p.source, p.target, c), ConfigError);
  GridField nan = p.target;
  nan.data()[7] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(DeformationObjective(p.source, nan, problem()), InputError);
  const auto other = BLDomain::cube(2, 16, 4, 0.05, 2);
  CHECK_THROWS_AS(DeformationObjective(p.source, GridField::scalar(other), problem()), DomainMismatch);
}

TEST_CASE("energy at zero velocity") {
  const SyntheticPair p = swirl_pair();
  for (Formulation f : {Formulation::state, Formulation::deformation}) {
    const auto same = make_objective(f, p.source, p.source, problem());
    const ObjectiveEvaluation e = same->evaluate(same->zero_velocity());
    CHECK(e.energy == 0.0);
    CHECK(weighted_norm(e.gradient) == 0.0);

    const auto obj = make_objective(f, p.source, p.target, problem());
    const double expect = (p.source - p.target).squared_l2() / 0.05;
    const ObjectiveEvaluation e0 = obj->evaluate(obj->zero_velocity());
    CHECK(e0.energy == doctest::Approx(expect).epsilon(1e-14));
    CHECK(e0.regularity == 0.0);
  }
}

TEST_CASE("energy of a uniform translation") {
  const SyntheticPair p = swirl_pair();
  const double h = 1.0 / 32;
  const double c[] = {3 * h, -2 * h};
  // m(1)(x) = I0(x - c): a roll by whole voxels
  GridField rolled = p.source;
  for_each_voxel(dom32, [&](int i0, int i1, int i2, std::size_t) {
    rolled(0, i0, i1, i2) = p.source(0, (i0 + 32 - 3) % 32, (i1 + 2) % 32, i2);
  });
  const double expect = 0.5 * (c[0] * c[0] + c[1] * c[1]) + (rolled - p.target).squared_l2() / 0.05;
  for (Formulation f : {Formulation::state, Formulation::deformation}) {
    const auto obj = make_objective(f, p.source, p.target, problem());
    const TimeFlow v = TimeFlow::stationary(BLField::constant(dom32, c));
    CHECK(obj->energy(v) == doctest::Approx(expect).epsilon(1e-6));
  }
}

TEST_CASE("both formulations give pi(lambda1 grad I0) at zero velocity") {
  const SyntheticPair p = swirl_pair();
  GridField lambda1 = p.source - p.target;
  lambda1 *= -2.0 / 0.05;
  const BLField expect = project(scale_vector(lambda1, spatial_gradient(p.source)));
  for (FlowMode mode : {FlowMode::stationary, FlowMode::nonstationary}) {
    const auto s = make_objective(Formulation::state, p.source, p.target, problem(mode));
    const auto d = make_objective(Formulation::deformation, p.source, p.target, problem(mode));
    const ObjectiveEvaluation es = s->evaluate(s->zero_velocity());
    const ObjectiveEvaluation ed = d->evaluate(d->zero_velocity());
    for (int i = 0; i < es.gradient.node_count(); ++i) {
      CHECK(test::max_abs_diff(es.gradient.node(i), expect) < 1e-10 * expect.max_abs());
      CHECK(test::max_abs_diff(ed.gradient.node(i), expect) < 1e-10 * expect.max_abs());
    }
  }
}

TEST_CASE("state data terms project onto the gradient") {
  for (FlowMode mode : {FlowMode::stationary, FlowMode::nonstationary}) {
    DerivativeCheckOptions o;
    o.time_nodes = 3;
    o.steps = 6;
    const CheckProblem cp = make_check_problem(Formulation::state, mode, false, o);
    const auto& obj = static_cast<const StateObjective&>(*cp.objective);
    const ObjectiveEvaluation e = obj.evaluate(cp.velocity);
    const StateObjective::SpatialTerms st = obj.spatial_terms(e);
    const TimeFlow data = data_part(e);
    for (int i = 0; i < data.node_count(); ++i) {
      BLField sum = BLField::vector(obj.domain());
      for (auto [k, w] : st.weights[std::size_t(i)]) sum.axpy(w, project(st.terms[std::size_t(k)]));
      CHECK(test::max_abs_diff(sum, data.node(i)) < 1e-12 * data.node(i).max_abs());
    }
  }
}

TEST_CASE("Hessian products: linearity, zero direction, incompressibility") {
  for (Formulation f : {Formulation::state, Formulation::deformation})
    for (bool incompressible : {false, true}) {
      DerivativeCheckOptions o;
      o.time_nodes = 2;
      o.steps = 4;
      const CheckProblem cp = make_check_problem(f, FlowMode::nonstationary, incompressible, o);
      const Objective& obj = *cp.objective;
      const ObjectiveEvaluation e = obj.evaluate(cp.velocity);
      const TimeFlow& w1 = cp.directions[0];
      const TimeFlow& w2 = cp.directions[1];
      for (HessianKind kind : {HessianKind::newton, HessianKind::gauss_newton}) {
        CHECK(weighted_norm(obj.hessian_vector(e, 0.0 * w1, kind)) == 0.0);
        const TimeFlow lhs = obj.hessian_vector(e, 2.0 * w1 + (-0.5) * w2, kind);
        const TimeFlow rhs = 2.0 * obj.hessian_vector(e, w1, kind) + (-0.5) * obj.hessian_vector(e, w2, kind);
        CHECK(test::rel_diff(lhs, rhs) < 1e-12);
        if (incompressible) {
          for (const BLField& n : lhs.nodes()) CHECK(max_divergence(n) <= 1e-12 * std::max(1.0, n.max_abs()));
        }
      }
      if (incompressible) {
        for (const BLField& n : e.gradient.nodes()) CHECK(max_divergence(n) <= 1e-12 * std::max(1.0, n.max_abs()));
      }
    }
}

TEST_CASE("stale evaluations are rejected") {
  const CheckProblem a = make_check_problem(Formulation::deformation, FlowMode::stationary, false, {});
  const CheckProblem b = make_check_problem(Formulation::deformation, FlowMode::stationary, false, {});
  const ObjectiveEvaluation e = a.objective->evaluate(a.velocity);
  CHECK_THROWS_AS(b.objective->hessian_vector(e, a.directions[0]), StaleCache);
  a.objective->set_steps(a.objective->steps() + 1);
  CHECK_THROWS_AS(a.objective->hessian_vector(e, a.directions[0]), StaleCache);
  const CheckProblem ns = make_check_problem(Formulation::deformation, FlowMode::nonstationary, false, {});
  a.objective->set_steps(a.objective->steps() - 1);
  CHECK_THROWS_AS(a.objective->hessian_vector(e, ns.directions[0]), StaleCache);
}

TEST_CASE("non-finite adjoint is reported") {
  const SyntheticPair p = swirl_pair();
  ProblemConfig c = problem();
  c.sigma2 = 1e-320;
  const DeformationObjective obj(p.source, p.target, c);
  CHECK_THROWS_AS(obj.evaluate(obj.zero_velocity()), NumericalError);
}

TEST_CASE("deformation objective: gradient and Hessian against finite differences") {
  const CheckProblem cp = make_check_problem(Formulation::deformation, FlowMode::stationary, false, {});
  const ObjectiveEvaluation e = cp.objective->evaluate(cp.velocity);
  const GradientCheck g = check_gradient(*cp.objective, e, cp.directions[0]);
  CHECK(g.rel_error < 1e-6);
  CHECK(check_hessian_vector(*cp.objective, e, cp.directions[1]) < 1e-4);
  CHECK(check_symmetry(*cp.objective, e, cp.directions[0], cp.directions[1]) < 1e-8);
  CHECK(check_gauss_newton_curvature(*cp.objective, e, cp.directions).violations == 0);
}

TEST_CASE("state objective: Newton product against finite differences of its gradient") {
  const CheckProblem cp = make_check_problem(Formulation::state, FlowMode::stationary, false, {});
  const ObjectiveEvaluation e = cp.objective->evaluate(cp.velocity);
  CHECK(check_hessian_vector(*cp.objective, e, cp.directions[0]) < 1e-4);
  CHECK(check_gauss_newton_curvature(*cp.objective, e, cp.directions).violations == 0);
}

TEST_CASE("pure regularizer: gradient is L v") {
  const SyntheticPair p = swirl_pair();
  ProblemConfig c = problem(FlowMode::nonstationary);
  c.sigma2 = std::numeric_limits<double>::infinity();
  for (Formulation f : {Formulation::state, Formulation::deformation}) {
    const auto obj = make_objective(f, p.source, p.target, c);
    const TimeFlow v = test::random_flow(dom32, FlowMode::nonstationary, 3, 4, 0.01);
    const ObjectiveEvaluation e = obj->evaluate(v);
    CHECK(test::rel_diff(e.gradient, map_nodes(v, [](const BLField& n) { return apply_L(n); })) < 1e-10);
    CHECK(e.mismatch == 0.0);
  }
}
