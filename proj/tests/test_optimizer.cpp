#include <doctest.h>

#include <limits>

#include "blreg/harness/metrics.hpp"
#include "blreg/harness/synthesize.hpp"
#include "blreg/optimizer.hpp"
#include "blreg/spectral.hpp"
#include "support.hpp"

using namespace blreg;

namespace {

const auto dom16 = BLDomain::cube(2, 16, 4, 0.05, 2);

TimeFlow apply_each(const TimeFlow& v, BLField (*op)(const BLField&)) { return map_nodes(v, op); }

// Real, even per-frequency multiplier in [1, 40]: SPD for the weighted product.
double diagonal(int k0, int k1) { return 1.0 + 3.0 * std::abs(k0) + 2.0 * k1 * k1 + 0.5 * std::abs(k0 * k1); }

TimeFlow apply_diagonal(const TimeFlow& v, bool invert) {
  TimeFlow out = v;
  for (auto& n : out.nodes())
    for (int c = 0; c < n.components(); ++c)
      for_each_frequency(n.domain(), [&](int k0, int k1, int k2, std::size_t) {
        const double d = diagonal(k0, k1);
        n(c, k0, k1, k2) *= invert ? 1.0 / d : d;
      });
  return out;
}

ProblemConfig problem(FlowMode mode = FlowMode::stationary) {
  ProblemConfig c;
  c.sigma2 = 0.05;
  c.mode = mode;
  c.time_nodes = 3;
  return c;
}

}  // namespace

TEST_CASE("pcg: zero right-hand side") {
  const TimeFlow g = TimeFlow::zeros(dom16, FlowMode::nonstationary, 2);
  const PcgResult r = pcg_solve([](const TimeFlow& p) { return p; }, g, 0.1, 10);
  CHECK(r.iterations == 0);
  CHECK(weighted_norm(r.solution) == 0.0);
}

TEST_CASE("pcg: the regularizer is solved in one iteration") {
  for (bool incompressible : {false, true}) {
    TimeFlow g = test::random_flow(dom16, FlowMode::nonstationary, 2, 1);
    if (incompressible) g = map_nodes(g, [](const BLField& n) { return leray_project(n); });
    const PcgResult r = pcg_solve([](const TimeFlow& p) { return apply_each(p, apply_L); }, g, 1e-12, 10, incompressible);
    CHECK(r.iterations == 1);
    CHECK(r.flag == PcgFlag::converged);
    CHECK(test::rel_diff(r.solution, apply_each(g, apply_K)) < 1e-10);
  }
}

TEST_CASE("pcg: diagonal operator against the direct solve") {
  const auto dom = BLDomain::cube(2, 16, 4, 0.05, 2);
  const TimeFlow g = test::random_flow(dom, FlowMode::nonstationary, 3, 2);
  const double eta = 0.1;
  const PcgResult r = pcg_solve([](const TimeFlow& p) { return apply_diagonal(p, false); }, g, eta, 100);
  CHECK(r.flag == PcgFlag::converged);
  CHECK(test::rel_diff(r.solution, apply_diagonal(g, true)) < eta);

  const PcgResult tight = pcg_solve([](const TimeFlow& p) { return apply_diagonal(p, false); }, g, 1e-10, 200);
  CHECK(test::rel_diff(tight.solution, apply_diagonal(g, true)) < 1e-9);
}

TEST_CASE("pcg: negative curvature on the first iteration returns the preconditioned gradient") {
  const TimeFlow g = test::random_flow(dom16, FlowMode::stationary, 1, 3);
  const PcgResult r = pcg_solve([](const TimeFlow& p) { return -1.0 * p; }, g, 0.1, 10);
  CHECK(r.flag == PcgFlag::negative_curvature);
  CHECK(test::rel_diff(r.solution, apply_each(g, apply_K)) == 0.0);
}

TEST_CASE("relative gradient norm") {
  const TimeFlow g0 = test::random_flow(dom16, FlowMode::nonstationary, 2, 4);
  CHECK(relative_gradient_norm(g0, g0) == 1.0);
  CHECK(relative_gradient_norm(0.0 * g0, g0) == 0.0);
  CHECK(relative_gradient_norm(0.05 * g0, g0) == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(relative_gradient_norm(g0, 0.0 * g0) == 0.0);
}

TEST_CASE("minimize: identical images stop immediately") {
  SynthesisOptions o;
  o.kind = PairKind::swirl;
  const SyntheticPair p = synthesize_pair(BLDomain::cube(2, 32, 8, 0.05, 2), o);
  for (Formulation f : {Formulation::state, Formulation::deformation}) {
    auto obj = make_objective(f, p.source, p.source, problem());
    const OptimizationResult r = minimize(*obj, obj->zero_velocity(), {});
    CHECK(r.history.size() == 1);
    CHECK(r.status == Status::converged);
    CHECK(r.final.energy == 0.0);
  }
}

TEST_CASE("minimize: the pure regularizer is solved by one Newton step") {
  const auto dom = BLDomain::cube(2, 32, 8, 0.05, 2);
  const SyntheticPair p = synthesize_pair(dom, {});
  ProblemConfig c = problem(FlowMode::nonstationary);
  c.sigma2 = std::numeric_limits<double>::infinity();
  for (Method m : {Method::newton, Method::gauss_newton}) {
    DeformationObjective obj(p.source, p.target, c);
    OptimizerConfig cfg;
    cfg.method = m;
    cfg.pcg_tolerance = 1e-12;
    const TimeFlow v0 = test::random_flow(dom, FlowMode::nonstationary, 3, 5, 0.01);
    const OptimizationResult r = minimize(obj, v0, cfg);
    CHECK(r.history.size() == 2);
    CHECK(r.status == Status::converged);
    CHECK(r.history[1].step == 1.0);
    CHECK(weighted_norm(r.velocity) < 1e-12 * weighted_norm(v0));
  }
}

TEST_CASE("minimize: monotone energy, divergence-free iterates, band-limited updates") {
  const auto dom = BLDomain::cube(2, 32, 8, 0.05, 2);
  SynthesisOptions o;
  o.kind = PairKind::swirl;
  const SyntheticPair p = synthesize_pair(dom, o);
  for (Method m : {Method::gauss_newton, Method::newton, Method::gradient_descent}) {
    ProblemConfig c = problem(FlowMode::nonstationary);
    c.incompressible = true;
    DeformationObjective obj(p.source, p.target, c);
    OptimizerConfig cfg;
    cfg.method = m;
    cfg.max_outer = 6;
    const OptimizationResult r = minimize(obj, obj.zero_velocity(), cfg);
    for (std::size_t k = 1; k < r.history.size(); ++k) {
      if (r.history[k].time_steps == r.history[k - 1].time_steps) {
        CHECK(r.history[k].energy <= r.history[k - 1].energy);
      }
      CHECK(r.history[k].max_divergence <= 1e-10);
    }
    CHECK(r.history.back().mse_rel < 100.0);
    CHECK(r.velocity.domain() == dom);
    if (m == Method::gauss_newton) CHECK(r.negative_curvature_events == 0);
  }
}

TEST_CASE("minimize: a line search that cannot succeed reports a stall") {
  const auto dom = BLDomain::cube(2, 32, 8, 0.05, 2);
  const SyntheticPair p = synthesize_pair(dom, {});
  DeformationObjective obj(p.source, p.target, problem());
  OptimizerConfig cfg;
  cfg.armijo = 1.0 - 1e-12;
  cfg.max_halvings = 0;
  const OptimizationResult r = minimize(obj, obj.zero_velocity(), cfg);
  CHECK(r.status == Status::stalled);
  CHECK(r.history.size() == 1);
}

TEST_CASE("minimize: Gaussian translation pair drops below 10 percent within 30 iterations") {
  const auto dom = BLDomain::cube(2, 64, 16, 0.05, 2);
  const SyntheticPair p = synthesize_pair(dom, {});
  DeformationObjective obj(p.source, p.target, ProblemConfig{});
  OptimizerConfig cfg;
  cfg.max_outer = 30;
  const OptimizationResult r = minimize(obj, obj.zero_velocity(), cfg);
  CHECK(r.history.back().mse_rel < 10.0);
  CHECK(r.history.size() <= 31);
}
