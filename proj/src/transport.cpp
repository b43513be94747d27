#include "blreg/transport.hpp"

#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "blreg/errors.hpp"

namespace blreg {

namespace {

constexpr double kB[4] = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};
// Stage time offsets in half steps, and the weight of the previous stage slope in the stage input.
constexpr int kHalf[4] = {0, 1, 1, 2};
constexpr double kC[4] = {0.0, 0.5, 0.5, 1.0};

int round_up(int steps, int multiple) { return ((steps + multiple - 1) / multiple) * multiple; }

// -V - (Da) ⋆ V
BLField displacement_rhs(const PaddedField& jac, const StageVelocities::Entry& vel) {
  BLField k = contract(jac, vel.padded);
  k += vel.bl;
  k *= -1.0;
  return k;
}

using State = std::vector<BLField>;
using Rhs = std::function<State(const State&, int half_step)>;

void add_scaled(State& y, double s, const State& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i].axpy(s, x[i]);
}

// One RK4 step starting at half-step index k0; `sign` = -1 integrates backward in time.
State rk4_step(const State& y, int k0, int sign, double dt, const Rhs& f) {
  const double h = sign * dt;
  State k1 = f(y, k0);
  State y2 = y;
  add_scaled(y2, 0.5 * h, k1);
  State k2 = f(y2, k0 + sign);
  State y3 = y;
  add_scaled(y3, 0.5 * h, k2);
  State k3 = f(y3, k0 + sign);
  State y4 = y;
  add_scaled(y4, h, k3);
  State k4 = f(y4, k0 + 2 * sign);
  State out = y;
  add_scaled(out, h / 6.0, k1);
  add_scaled(out, h / 3.0, k2);
  add_scaled(out, h / 3.0, k3);
  add_scaled(out, h / 6.0, k4);
  return out;
}

std::shared_ptr<const StageVelocities::Entry> make_entry(BLField v) {
  auto e = std::make_shared<StageVelocities::Entry>();
  e->padded = realize_padded(v);
  e->bl = std::move(v);
  return e;
}

}  // namespace

CflReport check_cfl(double max_speed, double min_spacing, int steps, double limit) {
  CflReport r;
  r.number = max_speed / steps / min_spacing;
  r.ok = r.number <= limit;
  r.proposed_steps = std::max(1, int(std::ceil(max_speed / (limit * min_spacing) - 1e-9)));
  return r;
}

CflReport check_cfl(const TimeFlow& v, int steps, double limit) {
  return check_cfl(max_speed(v), v.domain().min_spacing(), steps, limit);
}

int resolve_steps(const TimeFlow& v, const TransportOptions& opts) {
  const int nt = v.intervals();
  int steps = round_up(std::max(1, opts.steps), nt);
  if (opts.cfl == CflPolicy::ignore) return steps;
  const CflReport r = check_cfl(v, steps, opts.cfl_limit);
  if (r.ok) return steps;
  if (opts.cfl == CflPolicy::fail) {
    throw CflViolation(fmt::format("CFL number {:.4g} exceeds {:.4g} with {} steps; {} steps needed", r.number,
                                   opts.cfl_limit, steps, r.proposed_steps),
                       r.number, round_up(r.proposed_steps, nt));
  }
  return round_up(r.proposed_steps, nt);
}

// ---------------------------------------------------------------------------

StageVelocities::StageVelocities(const TimeFlow& v, int steps) : flow_(&v), steps_(steps) {}

std::shared_ptr<const StageVelocities::Entry> StageVelocities::at_half_step(int k) {
  const int key = flow_->is_stationary() ? 0 : k;
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  auto e = make_entry(flow_->at(0.5 * k / steps_));
  cache_.emplace(key, e);
  return e;
}

// ---------------------------------------------------------------------------

PhiTrajectory integrate_phi(const TimeFlow& v, const TransportOptions& opts) {
  const int steps = resolve_steps(v, opts);
  const BLDomain& dom = v.domain();
  StageVelocities vel(v, steps);
  PhiTrajectory out;
  out.steps = steps;
  const double dt = out.dt();
  out.u.reserve(std::size_t(steps) + 1);
  out.u.push_back(BLField::vector(dom));
  out.stages.resize(std::size_t(steps));
  for (int n = 0; n < steps; ++n) {
    const BLField& un = out.u.back();
    BLField next = un;
    BLField prev_k;
    for (int s = 0; s < 4; ++s) {
      RkStage& st = out.stages[std::size_t(n)][std::size_t(s)];
      st.half_step = 2 * n + kHalf[s];
      st.a = un;
      if (s > 0) st.a.axpy(kC[s] * dt, prev_k);
      st.velocity = vel.at_half_step(st.half_step);
      st.jacobian = realize_padded(spectral_jacobian(st.a));
      prev_k = displacement_rhs(st.jacobian, *st.velocity);
      next.axpy(kB[s] * dt, prev_k);
    }
    if (!next.all_finite()) throw NumericalError("integrate_phi: non-finite displacement");
    out.u.push_back(std::move(next));
  }
  return out;
}

PsiJTrajectory integrate_psi_J(const TimeFlow& v, const TransportOptions& opts) {
  return integrate_psi_J(v, resolve_steps(v, opts));
}

PsiJTrajectory integrate_psi_J(const TimeFlow& v, int steps) {
  const BLDomain& dom = v.domain();
  StageVelocities vel(v, steps);
  const Rhs rhs = [&](const State& y, int k) {
    const auto e = vel.at_half_step(k);
    State dy(2);
    dy[0] = displacement_rhs(realize_padded(spectral_jacobian(y[0])), *e);
    dy[1] = product_divergence(realize_padded(y[1]), e->padded);
    dy[1] *= -1.0;
    return dy;
  };
  PsiJTrajectory out;
  out.steps = steps;
  out.w.assign(std::size_t(steps) + 1, BLField());
  out.J.assign(std::size_t(steps) + 1, BLField());
  const double one = 1.0;
  State y{BLField::vector(dom), BLField::constant(dom, std::span<const double>(&one, 1))};
  out.w[std::size_t(steps)] = y[0];
  out.J[std::size_t(steps)] = y[1];
  for (int n = steps; n > 0; --n) {
    y = rk4_step(y, 2 * n, -1, 1.0 / steps, rhs);
    if (!y[0].all_finite() || !y[1].all_finite()) throw NumericalError("integrate_psi_J: non-finite trajectory");
    out.w[std::size_t(n) - 1] = y[0];
    out.J[std::size_t(n) - 1] = y[1];
  }
  return out;
}

// ---------------------------------------------------------------------------

PhiTangent integrate_incremental_phi(const PhiTrajectory& phi, const TimeFlow& dv) {
  const int steps = phi.steps;
  const double dt = phi.dt();
  StageVelocities dvel(dv, steps);
  PhiTangent out;
  out.du.reserve(std::size_t(steps) + 1);
  out.du.push_back(BLField::vector(dv.domain()));
  out.da.resize(std::size_t(steps));
  out.dvelocity.resize(std::size_t(steps));
  for (int n = 0; n < steps; ++n) {
    const BLField& dun = out.du.back();
    BLField next = dun;
    BLField prev_k;
    for (int s = 0; s < 4; ++s) {
      const RkStage& st = phi.stages[std::size_t(n)][std::size_t(s)];
      BLField& da = out.da[std::size_t(n)][std::size_t(s)];
      da = dun;
      if (s > 0) da.axpy(kC[s] * dt, prev_k);
      const auto dV = dvel.at_half_step(st.half_step);
      out.dvelocity[std::size_t(n)][std::size_t(s)] = dV;
      // δk = -(D̃δa) ⋆ V - δV - (D̃a) ⋆ δV
      prev_k = contract(realize_padded(spectral_jacobian(da)), st.velocity->padded);
      prev_k += contract(st.jacobian, dV->padded);
      prev_k += dV->bl;
      prev_k *= -1.0;
      next.axpy(kB[s] * dt, prev_k);
    }
    out.du.push_back(std::move(next));
  }
  return out;
}

IncrementalState integrate_incremental_state(const TimeFlow& v, const TimeFlow& dv, const PhiTrajectory& phi) {
  if (!(v.domain() == dv.domain()) || v.mode() != dv.mode() || v.node_count() != dv.node_count()) {
    throw StaleCache("integrate_incremental_state: direction does not match the velocity");
  }
  const int steps = phi.steps;
  const BLDomain& dom = v.domain();
  IncrementalState out;
  out.dphi = integrate_incremental_phi(phi, dv).du;

  StageVelocities vel(v, steps);
  StageVelocities dvel(dv, steps);
  // (w, J, δw, δJ) integrated together backward from t = 1.
  const Rhs rhs = [&](const State& y, int k) {
    const auto e = vel.at_half_step(k);
    const auto de = dvel.at_half_step(k);
    const PaddedField Dw = realize_padded(spectral_jacobian(y[0]));
    const PaddedField J = realize_padded(y[1]);
    State dy(4);
    dy[0] = displacement_rhs(Dw, *e);
    dy[1] = product_divergence(J, e->padded);
    dy[1] *= -1.0;
    dy[2] = contract(realize_padded(spectral_jacobian(y[2])), e->padded);
    dy[2] += contract(Dw, de->padded);
    dy[2] += de->bl;
    dy[2] *= -1.0;
    dy[3] = product_divergence(realize_padded(y[3]), e->padded);
    dy[3] += product_divergence(J, de->padded);
    dy[3] *= -1.0;
    return dy;
  };
  const double one = 1.0;
  State y{BLField::vector(dom), BLField::constant(dom, std::span<const double>(&one, 1)), BLField::vector(dom),
          BLField::scalar(dom)};
  out.dpsi.assign(std::size_t(steps) + 1, BLField());
  out.dJ.assign(std::size_t(steps) + 1, BLField());
  out.dpsi[std::size_t(steps)] = y[2];
  out.dJ[std::size_t(steps)] = y[3];
  for (int n = steps; n > 0; --n) {
    y = rk4_step(y, 2 * n, -1, 1.0 / steps, rhs);
    out.dpsi[std::size_t(n) - 1] = y[2];
    out.dJ[std::size_t(n) - 1] = y[3];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Adjoint sweeps. Internally ū = -ρ̃ is the cotangent of ũ and k̄_s that of the
// stage slope k_s. For k_s = F(a_s, V_s) = -V_s - D̃a_s ⋆ V_s:
//   J_u(V)^T r = ∇̃·(r ⋆ V),   J_V(a)^T r = -r - (D̃a)^T ⋆ r.

AdjointSweep integrate_rho(const PhiTrajectory& phi, const TimeFlow& v, const BLField& rho1, bool keep_stages) {
  const int steps = phi.steps;
  const double dt = phi.dt();
  AdjointSweep out;
  out.rho.assign(std::size_t(steps) + 1, BLField());
  out.velocity_cotangent = v;
  out.velocity_cotangent.set_zero();
  if (keep_stages) out.stage_rho.resize(std::size_t(steps));

  BLField ubar = rho1;
  ubar *= -1.0;
  out.rho[std::size_t(steps)] = rho1;
  for (int n = steps - 1; n >= 0; --n) {
    std::array<BLField, 4> kbar;
    for (int s = 0; s < 4; ++s) {
      kbar[std::size_t(s)] = ubar;
      kbar[std::size_t(s)] *= dt * kB[s];
    }
    BLField un = ubar;
    for (int s = 3; s >= 0; --s) {
      const RkStage& st = phi.stages[std::size_t(n)][std::size_t(s)];
      const PaddedField kp = realize_padded(kbar[std::size_t(s)]);
      BLField abar = product_divergence(kp, st.velocity->padded);
      BLField vbar = contract_transpose(st.jacobian, kp);
      vbar += kbar[std::size_t(s)];
      out.velocity_cotangent.accumulate(0.5 * st.half_step * dt, -1.0, vbar);
      un += abar;
      if (s > 0) kbar[std::size_t(s) - 1].axpy(kC[s] * dt, abar);
      if (keep_stages) out.stage_rho[std::size_t(n)][std::size_t(s)] = kp;
    }
    ubar = std::move(un);
    if (!ubar.all_finite()) throw NumericalError("integrate_rho: non-finite adjoint");
    out.rho[std::size_t(n)] = ubar;
    out.rho[std::size_t(n)] *= -1.0;
  }
  return out;
}

IncrementalAdjoint integrate_incremental_rho(const PhiTrajectory& phi, const AdjointSweep& base, const TimeFlow& v,
                                             const PhiTangent& tangent, const BLField& drho1, bool gauss_newton) {
  const int steps = phi.steps;
  if (int(tangent.da.size()) != steps || (!gauss_newton && int(base.stage_rho.size()) != steps)) {
    throw StaleCache("integrate_incremental_rho: trajectories come from different discretizations");
  }
  const double dt = phi.dt();
  IncrementalAdjoint out;
  out.drho.assign(std::size_t(steps) + 1, BLField());
  out.velocity_cotangent = v;
  out.velocity_cotangent.set_zero();

  BLField dubar = drho1;
  dubar *= -1.0;
  out.drho[std::size_t(steps)] = drho1;
  for (int n = steps - 1; n >= 0; --n) {
    std::array<BLField, 4> dkbar;
    for (int s = 0; s < 4; ++s) {
      dkbar[std::size_t(s)] = dubar;
      dkbar[std::size_t(s)] *= dt * kB[s];
    }
    BLField dun = dubar;
    for (int s = 3; s >= 0; --s) {
      const RkStage& st = phi.stages[std::size_t(n)][std::size_t(s)];
      const auto& dV = tangent.dvelocity[std::size_t(n)][std::size_t(s)];
      const PaddedField dkp = realize_padded(dkbar[std::size_t(s)]);
      BLField dabar = product_divergence(dkp, st.velocity->padded);
      BLField dvbar = contract_transpose(st.jacobian, dkp);
      dvbar += dkbar[std::size_t(s)];
      if (!gauss_newton) {
        const PaddedField& kp = base.stage_rho[std::size_t(n)][std::size_t(s)];
        dabar += product_divergence(kp, dV->padded);
        dvbar += contract_transpose(realize_padded(spectral_jacobian(tangent.da[std::size_t(n)][std::size_t(s)])), kp);
      }
      out.velocity_cotangent.accumulate(0.5 * st.half_step * dt, -1.0, dvbar);
      dun += dabar;
      if (s > 0) dkbar[std::size_t(s) - 1].axpy(kC[s] * dt, dabar);
    }
    dubar = std::move(dun);
    out.drho[std::size_t(n)] = dubar;
    out.drho[std::size_t(n)] *= -1.0;
  }
  return out;
}

}  // namespace blreg
