// One PASS/FAIL line per acceptance criterion, detail lines indented below it.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <random>

#include <fmt/format.h>

#include "blreg/harness/config.hpp"
#include "blreg/harness/derivative_check.hpp"
#include "blreg/harness/report.hpp"
#include "blreg/harness/run.hpp"
#include "blreg/harness/synthesize.hpp"
#include "blreg/harness/volume_io.hpp"
#include "blreg/optimizer.hpp"
#include "blreg/spectral.hpp"

using namespace blreg;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

int failures = 0;

void verdict(int id, bool pass, const std::string& summary, bool soft = false) {
  const char* tag = pass ? "PASS" : (soft ? "WARN" : "FAIL");
  fmt::print("{}  {:>2}  {}\n", tag, id, summary);
  std::fflush(stdout);
  if (!pass && !soft) ++failures;
}

void invariant(const std::string& name, bool pass, const std::string& summary) {
  fmt::print("{}  inv {}: {}\n", pass ? "PASS" : "FAIL", name, summary);
  std::fflush(stdout);
  if (!pass) ++failures;
}

void detail(const std::string& line) {
  fmt::print("          {}\n", line);
  std::fflush(stdout);
}

std::string label(Formulation f, FlowMode m, bool incompressible) {
  return fmt::format("{} {} gamma={}", to_string(f), m == FlowMode::stationary ? "stationary" : "nonstationary",
                     incompressible ? 1 : 0);
}

// ---------------------------------------------------------------- registration runs

struct Run {
  std::string name;
  RegistrationOutputs out;
  bool gauss_newton = false;
};

std::deque<Run> runs;

const Run& registration(const std::string& name, const std::string& ini) {
  for (const Run& r : runs)
    if (r.name == name) return r;
  const RunConfig c = parse_config(ini, name);
  Run r;
  r.name = name;
  r.gauss_newton = c.optimizer.method == Method::gauss_newton;
  r.out = register_images(c, load_inputs(c));
  runs.push_back(std::move(r));
  return runs.back();
}

std::string pair_ini(const std::string& kind, int bound, const std::string& formulation, bool incompressible,
                     const std::string& method = "gauss_newton", int max_outer = 50) {
  return fmt::format(
      "[grid]\ndims = 64 64\nbounds = {}\n[problem]\nformulation = {}\nincompressible = {}\n"
      "[optimizer]\nmethod = {}\nmax_outer = {}\n[synthetic]\nkind = {}\n",
      bound, formulation, incompressible, method, max_outer, kind);
}

int first_reaching(const std::vector<IterationRecord>& h, double level) {
  for (const auto& r : h)
    if (r.mse_rel <= level) return r.outer;
  return -1;
}

bool monotone_energy(const std::vector<IterationRecord>& h) {
  for (std::size_t k = 1; k < h.size(); ++k)
    if (h[k].energy > h[k - 1].energy) return false;
  return true;
}

// ---------------------------------------------------------------- criteria

constexpr double two_pi = 6.283185307179586;

GridField fourier_sum(const BLField& f) {
  const BLDomain& dom = f.domain();
  GridField out(dom, f.components());
  const auto& N = dom.grid();
  for (int c = 0; c < f.components(); ++c)
    for_each_voxel(dom, [&](int i0, int i1, int i2, std::size_t) {
      std::complex<double> s = 0.0;
      for_each_frequency(dom, [&](int k0, int k1, int k2, std::size_t) {
        const double phase = two_pi * (double(k0) * i0 / N[0] + double(k1) * i1 / N[1] + double(k2) * i2 / N[2]);
        s += f(c, k0, k1, k2) * std::polar(1.0, phase);
      });
      out(c, i0, i1, i2) = s.real();
    });
  return out;
}

double convolution_error(const BLField& a, const BLField& b) {
  const BLDomain& dom = a.domain();
  const auto& K = dom.bounds();
  const BLField fast = truncated_convolution(a, b);
  double err = 0.0;
  for_each_frequency(dom, [&](int k0, int k1, int k2, std::size_t) {
    std::complex<double> s = 0.0;
    for_each_frequency(dom, [&](int p0, int p1, int p2, std::size_t) {
      const int q0 = k0 - p0, q1 = k1 - p1, q2 = k2 - p2;
      if (std::abs(q0) > K[0] || std::abs(q1) > K[1] || std::abs(q2) > K[2]) return;
      s += a(0, p0, p1, p2) * b(0, q0, q1, q2);
    });
    err = std::max(err, std::abs(s - fast(0, k0, k1, k2)));
  });
  return err;
}

void spectral_identities() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1);
  double err = 0.0;
  bool coercive = true;
  for (int dim : {2, 3}) {
    const auto small = BLDomain::cube(dim, 8, 3, 0.05, 2);
    const BLField f = random_bl_field(small, 2, rng);
    err = std::max(err, (include(f) - fourier_sum(f)).max_abs());

    const auto dom = BLDomain::cube(dim, dim == 2 ? 32 : 16, dim == 2 ? 8 : 4, 0.05, 2);
    const BLField v = random_bl_field(dom, dim, rng);
    err = std::max(err, (project(include(v)) - v).max_abs());
    const GridField once = include(project(include(random_bl_field(
        BLDomain::cube(dim, dom.grid()[0], dom.grid()[0] / 2 - 1, 0.05, 2), 1, rng))));
    std::vector<double> samples(once.data().begin(), once.data().end());
    GridField g(dom, 1);
    std::copy(samples.begin(), samples.end(), g.data().begin());
    const GridField proj = include(project(g));
    err = std::max(err, (include(project(proj)) - proj).max_abs());

    const BLField w = random_bl_field(dom, dim, rng);
    const double a = dot(apply_L(v), w), b = dot(v, apply_L(w));
    err = std::max(err, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
    coercive = coercive && dot(v, apply_L(v)) >= dot(v, v) && dot(w, apply_L(w)) >= dot(w, w);
  }
  for (int k0 = 1; k0 <= 3; ++k0)
    for (int k1 = 1; k1 <= 3; ++k1) {
      const int grid[] = {8, 8};
      const int bounds[] = {k0, k1};
      const BLDomain dom(grid, bounds, 0.05, 2);
      const BLField a = random_bl_field(dom, 1, rng), b = random_bl_field(dom, 1, rng);
      err = std::max(err, convolution_error(a, b));
    }
  for (int k = 1; k <= 3; ++k) {
    const auto dom = BLDomain::cube(3, 8, k, 0.05, 2);
    const BLField a = random_bl_field(dom, 1, rng), b = random_bl_field(dom, 1, rng);
    err = std::max(err, convolution_error(a, b));
  }
  const double t = seconds_since(start);
  verdict(1, err <= 1e-12 && coercive && t < 10.0,
          fmt::format("spectral identities (Fourier sum, project/include, idempotence, L self-adjoint, truncated "
                      "convolution vs direct sum on every K <= 3 box): max error {:.2e} (<= 1e-12), <v,Lv> >= |v|^2 {}, "
                      "{:.1f} s (< 10 s)",
                      err, coercive ? "holds" : "violated", t));
}

struct CheckConfig {
  Formulation formulation;
  FlowMode mode;
  bool incompressible;
};

std::vector<CheckConfig> check_configs() {
  std::vector<CheckConfig> out;
  for (Formulation f : {Formulation::state, Formulation::deformation})
    for (FlowMode m : {FlowMode::stationary, FlowMode::nonstationary})
      for (bool g : {false, true}) out.push_back({f, m, g});
  return out;
}

void gradient_correctness() {
  const auto start = Clock::now();
  DerivativeCheckOptions o;
  o.directions = 10;
  o.curvature_directions = 0;
  bool pass = true;
  for (const CheckConfig& c : check_configs()) {
    const CheckProblem p = make_check_problem(c.formulation, c.mode, c.incompressible, o);
    const ObjectiveEvaluation e = p.objective->evaluate(p.velocity);
    double worst = 0.0, min_order = 1e300;
    for (const TimeFlow& w : p.directions) {
      const GradientCheck g = check_gradient(*p.objective, e, w, 1e-4);
      worst = std::max(worst, g.rel_error);
      min_order = std::min(min_order, g.order);
    }
    const bool ok = worst < 1e-6 && min_order >= 1.8;
    pass = pass && ok;
    detail(fmt::format("{:<34} worst rel err {:.2e}, min observed order {:.2f}  {}",
                       label(c.formulation, c.mode, c.incompressible), worst, min_order, ok ? "ok" : "FAILS"));
  }
  const double t = seconds_since(start);
  verdict(2, pass && t < 120.0,
          fmt::format("gradient vs central FD (N=32, K=8, eps=1e-4, 10 directions): rel err < 1e-6 and order ~2 in every "
                      "configuration, {:.1f} s (< 120 s)",
                      t));
}

void hessian_correctness() {
  const auto start = Clock::now();
  DerivativeCheckOptions o;
  o.directions = 3;
  o.curvature_directions = 0;
  bool pass = true;
  for (const CheckConfig& c : check_configs()) {
    const CheckProblem p = make_check_problem(c.formulation, c.mode, c.incompressible, o);
    const ObjectiveEvaluation e = p.objective->evaluate(p.velocity);
    double hvp = 0.0, sym = 0.0;
    for (std::size_t i = 0; i < p.directions.size(); ++i) {
      hvp = std::max(hvp, check_hessian_vector(*p.objective, e, p.directions[i], 1e-4, HessianKind::newton));
      const TimeFlow& other = p.directions[(i + 1) % p.directions.size()];
      sym = std::max(sym, check_symmetry(*p.objective, e, p.directions[i], other, HessianKind::newton));
    }
    const bool ok = hvp < 1e-4 && sym <= 1e-8;
    pass = pass && ok;
    detail(fmt::format("{:<34} Hvp vs FD {:.2e}, symmetry {:.2e}  {}", label(c.formulation, c.mode, c.incompressible),
                       hvp, sym, ok ? "ok" : "FAILS"));
  }
  const double t = seconds_since(start);
  verdict(3, pass && t < 300.0,
          fmt::format("Newton Hvp vs FD of the gradient < 1e-4 and symmetry <= 1e-8 in every configuration, {:.1f} s "
                      "(< 300 s)",
                      t));
}

void gauss_newton_definiteness() {
  DerivativeCheckOptions o;
  o.directions = 0;
  o.curvature_directions = 20;
  int violations = 0, directions = 0, pcg_events = 0;
  double min_ratio = 1e300;
  for (const CheckConfig& c : check_configs()) {
    const CheckProblem p = make_check_problem(c.formulation, c.mode, c.incompressible, o);
    const ObjectiveEvaluation e = p.objective->evaluate(p.velocity);
    const CurvatureCheck cc = check_gauss_newton_curvature(*p.objective, e, p.directions);
    violations += cc.violations;
    directions += cc.directions;
    min_ratio = std::min(min_ratio, cc.min_ratio);
    const PcgResult r = pcg_solve(
        [&](const TimeFlow& w) { return p.objective->hessian_vector(e, w, HessianKind::gauss_newton); }, e.gradient,
        1e-6, 30, c.incompressible);
    pcg_events += r.flag == PcgFlag::negative_curvature ? 1 : 0;
  }
  int run_events = 0, gn_runs = 0;
  for (const Run& r : runs) {
    if (!r.gauss_newton) continue;
    ++gn_runs;
    run_events += r.out.report.negative_curvature_events;
  }
  verdict(4, violations == 0 && pcg_events == 0 && run_events == 0,
          fmt::format("Gauss-Newton curvature: {} violations over {} directions (min <w,Hw>/<w,Lw> = {:.4f}); "
                      "negative-curvature PCG events: {} in check solves, {} across {} Gauss-Newton registrations",
                      violations, directions, min_ratio, pcg_events, run_events, gn_runs));
}

void incompressibility() {
  const auto start = Clock::now();
  const Run& r = registration("swirl-gamma1", pair_ini("swirl", 16, "deformation", true));
  const double t = seconds_since(start);
  double div = 0.0;
  for (const auto& h : r.out.report.history) div = std::max(div, h.max_divergence);
  const Extrema j = r.out.report.jacobian;
  verdict(5, div <= 1e-10 && j.min >= 0.95 && j.max <= 1.05 && t < 300.0,
          fmt::format("incompressible swirl (N=64, K=16): max divergence {:.2e} (<= 1e-10), Jacobian [{:.4f}, {:.4f}] "
                      "(within [0.95, 1.05]), MSE_rel {:.3f}%, {:.1f} s (< 300 s)",
                      div, j.min, j.max, r.out.report.final_mse_rel, t));
}

void convergence_behavior() {
  const auto start = Clock::now();
  const Run& gn = registration("c_to_circle-K16", pair_ini("c_to_circle", 16, "deformation", false));
  const Run& gd = registration("c_to_circle-gd",
                               pair_ini("c_to_circle", 16, "deformation", false, "gradient_descent", 200));
  const double t = seconds_since(start);
  const int n_gn = first_reaching(gn.out.report.history, 15.0);
  const int n_gd = first_reaching(gd.out.report.history, 15.0);
  const bool fewer = n_gn >= 0 && (n_gd < 0 || n_gn < n_gd);
  const bool mono = monotone_energy(gn.out.report.history) && monotone_energy(gd.out.report.history);
  verdict(6, fewer && mono && t < 600.0,
          fmt::format("c_to_circle (N=64, K=16): Gauss-Newton reaches MSE_rel <= 15% at outer {}, gradient descent {}; "
                      "monotone energy {}; {:.1f} s (< 600 s)",
                      n_gn, n_gd < 0 ? fmt::format("not within {} iterations (final {:.2f}%)",
                                                   gd.out.report.history.back().outer, gd.out.report.final_mse_rel)
                                     : fmt::format("at outer {}", n_gd),
                      mono ? "yes" : "no", t));
}

void variant_ordering() {
  bool pass = true;
  for (const char* kind : {"translation", "swirl", "c_to_circle"}) {
    const Run& d = registration(fmt::format("{}-K16", kind), pair_ini(kind, 16, "deformation", false));
    const Run& s = registration(fmt::format("{}-state", kind), pair_ini(kind, 16, "state", false));
    const double md = d.out.report.final_mse_rel, ms = s.out.report.final_mse_rel;
    const bool ok = md <= ms + 2.0;
    pass = pass && ok;
    detail(fmt::format("{:<12} deformation {:.3f}% ({}), state {:.3f}% ({})  {}", kind, md,
                       to_string(d.out.report.status), ms, to_string(s.out.report.status), ok ? "ok" : "violated"));
  }
  verdict(7, pass, "variant ordering: deformation MSE_rel <= state MSE_rel + 2 points on every synthetic pair",
          true);
}

void bandwidth_degradation() {
  std::map<int, double> mse;
  for (int k : {4, 8, 16}) {
    const std::string name = k == 16 ? "c_to_circle-K16" : fmt::format("c_to_circle-K{}", k);
    mse[k] = registration(name, pair_ini("c_to_circle", k, "deformation", false)).out.report.final_mse_rel;
  }
  const bool ok = mse[4] >= mse[8] && mse[8] >= mse[16] && mse[4] - mse[16] >= 2.0;
  verdict(8, ok,
          fmt::format("c_to_circle final MSE_rel K=4 {:.3f}%, K=8 {:.3f}%, K=16 {:.3f}%: non-increasing in K, "
                      "K=4 worse than K=16 by {:.2f} points (>= 2)",
                      mse[4], mse[8], mse[16], mse[4] - mse[16]));
}

void stopping_regime() {
  int converged = 0;
  double worst = 0.0;
  for (const Run& r : runs) {
    if (r.out.report.status != Status::converged) continue;
    ++converged;
    worst = std::max(worst, r.out.report.final_gradient_rel);
  }
  verdict(9, converged > 0 && worst <= 0.1,
          fmt::format("{} converged runs of {}, largest final |g|rel {:.3e} (<= 0.1)", converged, runs.size(), worst));
}

void determinism_and_io() {
  const fs::path dir = fs::temp_directory_path() / "blreg_acceptance";
  fs::remove_all(dir);
  const std::string base = pair_ini("swirl", 16, "deformation", true, "gauss_newton", 4);
  RunConfig a = parse_config(base + "[output]\ndirectory = " + (dir / "a").string() + "\n");
  RunConfig b = parse_config(base + "[output]\ndirectory = " + (dir / "b").string() + "\n");
  run(a);
  run(b);
  const bool csv_same = read_text(dir / "a" / "history.csv") == read_text(dir / "b" / "history.csv");
  bool volumes_same = true;
  for (const char* f : {"warped.vol", "displacement.vol", "difference.vol"}) {
    volumes_same = volumes_same && read_text(dir / "a" / f) == read_text(dir / "b" / f);
  }

  const Volume v = read_volume(dir / "a" / "warped.vol");
  write_volume(dir / "copy.vol", v);
  const Volume back = read_volume(dir / "copy.vol");
  const bool round_trip = back.dims == v.dims && back.values.size() == v.values.size() &&
                          std::memcmp(back.values.data(), v.values.data(), v.values.size() * sizeof(float)) == 0 &&
                          read_text(dir / "copy.vol") == read_text(dir / "a" / "warped.vol");
  fs::remove_all(dir);
  verdict(10, csv_same && volumes_same && round_trip,
          fmt::format("determinism: identical CSV {}, identical volumes {}; volume write/read bit-exact {}",
                      csv_same ? "yes" : "no", volumes_same ? "yes" : "no", round_trip ? "yes" : "no"));
}

void mse_monotonicity() {
  int violations = 0;
  std::vector<std::string> where;
  for (const Run& r : runs) {
    const auto& h = r.out.report.history;
    int local = 0;
    for (std::size_t k = 1; k < h.size(); ++k)
      if (!(h[k].mse_rel < h[k - 1].mse_rel)) ++local;
    if (local > 0) where.push_back(fmt::format("{} ({})", r.name, local));
    violations += local;
  }
  std::string list;
  for (const auto& w : where) list += (list.empty() ? "" : ", ") + w;
  invariant("mse", violations == 0,
            fmt::format("MSE_rel strictly decreasing over accepted iterations: {} non-decreasing steps{}{}", violations,
                        list.empty() ? "" : " in ", list));
}

}  // namespace

int main() {
  const auto start = Clock::now();
  spectral_identities();
  gradient_correctness();
  hessian_correctness();
  // registrations first so criterion 4 can count their negative-curvature events
  incompressibility();
  convergence_behavior();
  variant_ordering();
  bandwidth_degradation();
  gauss_newton_definiteness();
  stopping_regime();
  determinism_and_io();
  mse_monotonicity();
  fmt::print("{} failing line(s), {:.1f} s total\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
