#include "wavepart/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "wavepart/error.hpp"
#include "wavepart/kernels.hpp"

namespace wp {

namespace {

const double kYoshidaW1 = 1.0 / (2.0 - std::cbrt(2.0));
const double kYoshidaW0 = -std::cbrt(2.0) / (2.0 - std::cbrt(2.0));

Vec3 velocity(const Vec3& p) { return p / std::sqrt(1.0 + p.squaredNorm()); }

void strang(PhaseState& y, const ChargeDensity& rho, double dt) {
  y.q += 0.5 * dt * velocity(y.p);
  kernels::ForcedSource src{rho.rho_hat, y.q, -1.0, Vec3::Zero()};
  y.p += kernels::omp::forced_flow(y.grid(), y.fields.psi_hat, y.fields.pi_hat, src,
                                   Vec3::Zero(), dt);
  y.q += 0.5 * dt * velocity(y.p);
}

// H1 = field + coupling + u.p exactly (comoving frame), H2 = sqrt(1+p^2) - u.p drift
void comoving_strang(PhaseState& y, const ChargeDensity& rho, double dt, const Vec3& u) {
  y.q += 0.5 * dt * (velocity(y.p) - u);
  const auto& g = y.grid();
  kernels::omp::shift_phase(g, y.fields.psi_hat, -y.q);
  kernels::omp::shift_phase(g, y.fields.pi_hat, -y.q);
  kernels::ForcedSource src{rho.rho_hat, Vec3::Zero(), -1.0, Vec3::Zero()};
  y.p += kernels::omp::forced_flow(g, y.fields.psi_hat, y.fields.pi_hat, src, u, dt);
  y.q += dt * u;
  kernels::omp::shift_phase(g, y.fields.psi_hat, y.q);
  kernels::omp::shift_phase(g, y.fields.pi_hat, y.q);
  y.q += 0.5 * dt * (velocity(y.p) - u);
}

template <typename Step>
void compose(Scheme scheme, double dt, Step&& s) {
  if (scheme == Scheme::Strang) {
    s(dt);
  } else {
    s(kYoshidaW1 * dt);
    s(kYoshidaW0 * dt);
    s(kYoshidaW1 * dt);
  }
}

double field_energy(const FieldPair& f) {
  const auto& g = f.grid;
  const int n = g.n();
  const double e = kernels::reduce_planes(g, 0.0, [&](int i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const std::size_t m = g.index(i, j, l);
        acc += std::norm(f.pi_hat[m]) + g.k2(i, j, l) * std::norm(f.psi_hat[m]);
      }
    return acc;
  });
  return 0.5 * e * g.mode_volume();
}

struct StepCount {
  long steps;
  double dt;
};

StepCount plan_steps(const SimConfig& cfg, const Grid3& grid) {
  if (!(cfg.t_end > 0.0)) throw Error(ErrorKind::Argument, "dynamics", "t_end must be positive");
  const double dt0 = cfg.dt > 0.0 ? cfg.dt : 0.25 * grid.spacing();
  const long steps = std::max(1L, std::lround(std::ceil(cfg.t_end / dt0 - 1e-9)));
  return {steps, cfg.t_end / steps};
}

double source_radius_of(const SimConfig& cfg) {
  return cfg.source_radius > 0.0 ? cfg.source_radius : cfg.rho->effective_radius;
}

// true while the configuration is still inside its wrap horizon at time t
bool inside_horizon(const SimConfig& cfg, double t, const Vec3& q, const Vec3& q0,
                    double max_abs_q) {
  const double L = cfg.rho->grid.box_length();
  const double R = cfg.rho->effective_radius;
  if (cfg.horizon_rule == HorizonRule::Boundary) return t < 0.5 * L - R - max_abs_q;
  return t + (q - q0).norm() < L - R - source_radius_of(cfg);
}

void check_config(const SimConfig& cfg) {
  if (!cfg.rho) throw Error(ErrorKind::Argument, "dynamics", "SimConfig without charge density");
  require_same_grid(cfg.rho->grid, cfg.initial.grid(), "dynamics");
  if (cfg.record_every < 1) throw Error(ErrorKind::Argument, "dynamics", "record_every < 1");
  if (cfg.dt > 0.5 * cfg.rho->grid.spacing())
    throw Error(ErrorKind::Argument, "dynamics", "dt above 0.5 h");
  // the forced k=0 mode grows quadratically unless rho^(0) = 0
  double peak = 0.0;
  for (const auto& z : cfg.rho->rho_hat) peak = std::max(peak, std::abs(z));
  if (!cfg.rho->rho_hat.empty() && std::abs(cfg.rho->rho_hat[0]) > 1e-12 * peak)
    throw Error(ErrorKind::Singularity, "dynamics", "rho^(0) != 0");
}

}  // namespace

double coulomb_self_energy(const ChargeDensity& rho) {
  const auto& g = rho.grid;
  const int n = g.n();
  const double s = kernels::reduce_planes(g, 0.0, [&](int i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const double k2 = g.k2(i, j, l);
        if (k2 > 0.0) acc += std::norm(rho.rho_hat[g.index(i, j, l)]) / k2;
      }
    return acc;
  });
  return -0.5 * s * g.mode_volume();
}

double hamiltonian(const PhaseState& y, const ChargeDensity& rho) {
  require_same_grid(y.grid(), rho.grid, "dynamics");
  SpectralData shifted = rho.rho_hat;
  kernels::omp::shift_phase(rho.grid, shifted, y.q);
  const double coupling = kernels::omp::inner(rho.grid, y.fields.psi_hat, shifted);
  return field_energy(y.fields) + coupling + std::sqrt(1.0 + y.p.squaredNorm());
}

void nonlinear_step(PhaseState& y, const ChargeDensity& rho, double dt, Scheme scheme,
                    const std::optional<Vec3>& comoving) {
  if (comoving)
    compose(scheme, dt, [&](double h) { comoving_strang(y, rho, h, *comoving); });
  else
    compose(scheme, dt, [&](double h) { strang(y, rho, h); });
}

double wrap_horizon(const SimConfig& cfg) {
  const double L = cfg.rho->grid.box_length();
  const double R = cfg.rho->effective_radius;
  const double speed = velocity(cfg.initial.p).norm();
  if (cfg.horizon_rule == HorizonRule::Boundary)
    return (0.5 * L - R - cfg.initial.q.norm()) / (1.0 + speed);
  return (L - R - source_radius_of(cfg)) / (1.0 + speed);
}

Trajectory run_nonlinear(const SimConfig& cfg, const SnapshotObserver& observer) {
  check_config(cfg);
  const auto& rho = *cfg.rho;
  const auto plan = plan_steps(cfg, rho.grid);
  PhaseState y = cfg.initial;
  const Vec3 q0 = y.q;
  double max_abs_q = y.q.norm();

  Trajectory tr;
  tr.horizon = wrap_horizon(cfg);
  const double h0 = hamiltonian(y, rho);
  auto record = [&](double t) {
    tr.times.push_back(t);
    const double h = hamiltonian(y, rho);
    tr.energies.push_back(h);
    const double drift = std::abs(h - h0) / std::abs(h0);
    tr.max_rel_drift = std::max(tr.max_rel_drift, drift);
    if (cfg.check_drift && drift > cfg.drift_tol) {
      std::ostringstream os;
      os << "relative energy drift " << drift << " at t=" << t << " exceeds " << cfg.drift_tol;
      throw Error(ErrorKind::Integrator, "dynamics", os.str());
    }
    if (cfg.keep_states) tr.states.push_back(y);
    if (observer) observer(t, y);
  };
  auto sample = [&](double t) { tr.particle.push_back({t, y.q, y.p, velocity(y.p)}); };

  std::optional<Vec3> u;
  if (cfg.frame == Frame::Comoving) {
    u = cfg.reference_velocity.value_or(velocity(y.p));
    require_subluminal(*u, "dynamics");
  }

  sample(0.0);
  record(0.0);
  for (long s = 1; s <= plan.steps; ++s) {
    nonlinear_step(y, rho, plan.dt, cfg.scheme, u);
    const double t = s * plan.dt;
    const Vec3 qdot = velocity(y.p);
    if (!(qdot.norm() < cfg.v_cap)) {
      std::ostringstream os;
      os << "|qdot| = " << qdot.norm() << " reached v_cap " << cfg.v_cap << " at t=" << t;
      throw Error(ErrorKind::BlowUp, "dynamics", os.str());
    }
    max_abs_q = std::max(max_abs_q, y.q.norm());
    if (cfg.enforce_horizon && !inside_horizon(cfg, t, y.q, q0, max_abs_q)) {
      std::ostringstream os;
      os << "wrap horizon exceeded at t=" << t << " (estimate " << tr.horizon << ")";
      throw Error(ErrorKind::Wrap, "dynamics", os.str());
    }
    sample(t);
    if (s % cfg.record_every == 0 || s == plan.steps) record(t);
  }
  return tr;
}

LinearizedSystem::LinearizedSystem(std::shared_ptr<const ChargeDensity> r, const Vec3& vel)
    : rho(std::move(r)), v(vel) {
  require_subluminal(v, "dynamics");
  B = SolitonParams{Vec3::Zero(), v}.B();
  const auto psi = soliton_field(*rho, v);
  const auto& g = rho->grid;
  const int n = g.n();
  M = kernels::reduce_planes(g, Mat3(Mat3::Zero()), [&](int i) {
    Mat3 acc = Mat3::Zero();
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const std::size_t m = g.index(i, j, l);
        const Vec3 kd = g.kd(i, j, l);
        acc += (psi.psi_hat[m] * std::conj(rho->rho_hat[m])).real() * kd * kd.transpose();
      }
    return acc;
  });
  M *= g.mode_volume();
}

void LinearizedSystem::step(LinState& x, double dt, Scheme scheme) const {
  compose(scheme, dt, [&](double h) {
    x.q += 0.5 * h * (B * x.p);
    kernels::ForcedSource src{rho->rho_hat, Vec3::Zero(), 0.0, x.q};
    x.p += kernels::omp::forced_flow(x.grid(), x.fields.psi_hat, x.fields.pi_hat, src, v, h);
    x.p += h * (M * x.q);
    x.q += 0.5 * h * (B * x.p);
  });
}

LinState LinearizedSystem::apply(const LinState& x) const {
  const auto& g = x.grid();
  const int n = g.n();
  LinState out = LinState::zero(g);
  const auto& f = x.fields;
  const Vec3 coupling = kernels::reduce_planes(g, Vec3(Vec3::Zero()), [&](int i) {
    Vec3 acc = Vec3::Zero();
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const std::size_t m = g.index(i, j, l);
        const Vec3 kd = g.kd(i, j, l);
        const cplx vg(0.0, -kd.dot(v));
        out.fields.psi_hat[m] = vg * f.psi_hat[m] + f.pi_hat[m];
        out.fields.pi_hat[m] = -g.k2(i, j, l) * f.psi_hat[m] + vg * f.pi_hat[m] +
                               cplx(0.0, -kd.dot(x.q)) * rho->rho_hat[m];
        // <Psi, grad rho>
        acc += (f.psi_hat[m] * std::conj(cplx(0.0, -1.0) * rho->rho_hat[m])).real() * kd;
      }
    return acc;
  });
  out.q = B * x.p;
  out.p = coupling * g.mode_volume() + M * x.q;
  return out;
}

double LinearizedSystem::energy(const LinState& x) const {
  const auto& g = x.grid();
  const int n = g.n();
  const auto& f = x.fields;
  const double s = kernels::reduce_planes(g, 0.0, [&](int i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const std::size_t m = g.index(i, j, l);
        const Vec3 kd = g.kd(i, j, l);
        const cplx vgrad = cplx(0.0, -kd.dot(v)) * f.psi_hat[m];
        const cplx qgrad = cplx(0.0, -kd.dot(x.q)) * rho->rho_hat[m];
        acc += 0.5 * (std::norm(f.pi_hat[m]) + g.k2(i, j, l) * std::norm(f.psi_hat[m]));
        acc += (f.pi_hat[m] * std::conj(vgrad)).real();
        acc -= (f.psi_hat[m] * std::conj(qgrad)).real();
      }
    return acc;
  });
  return s * g.mode_volume() - 0.5 * x.q.dot(M * x.q) + 0.5 * x.p.dot(B * x.p);
}

double LinearizedSystem::energy_positive_form(const LinState& x) const {
  const auto& g = x.grid();
  const int n = g.n();
  const auto& f = x.fields;
  const double s = kernels::reduce_planes(g, 0.0, [&](int i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const std::size_t m = g.index(i, j, l);
        const Vec3 kd = g.kd(i, j, l);
        const double kv = kd.dot(v);
        const double d0 = g.k2(i, j, l) - kv * kv;
        acc += std::norm(f.pi_hat[m] + cplx(0.0, -kv) * f.psi_hat[m]);
        if (d0 > 0.0) {
          const cplx qgrad = cplx(0.0, -kd.dot(x.q)) * rho->rho_hat[m];
          acc += std::norm(std::sqrt(d0) * f.psi_hat[m] - qgrad / std::sqrt(d0));
        }
      }
    return acc;
  });
  return 0.5 * s * g.mode_volume() + 0.5 * x.p.dot(B * x.p);
}

Trajectory run_linearized(const LinState& x0, const Vec3& v1, const SimConfig& cfg,
                          const SnapshotObserver& observer) {
  if (!cfg.rho) throw Error(ErrorKind::Argument, "dynamics", "SimConfig without charge density");
  require_same_grid(cfg.rho->grid, x0.grid(), "dynamics");
  if (cfg.dt > 0.5 * cfg.rho->grid.spacing())
    throw Error(ErrorKind::Argument, "dynamics", "dt above 0.5 h");
  const LinearizedSystem sys(cfg.rho, v1);
  const auto plan = plan_steps(cfg, cfg.rho->grid);
  LinState x = x0;

  Trajectory tr;
  tr.horizon = wrap_horizon(cfg);
  const double h0 = sys.energy(x);
  auto record = [&](double t) {
    tr.times.push_back(t);
    const double h = sys.energy(x);
    tr.energies.push_back(h);
    const double drift = h0 != 0.0 ? std::abs(h - h0) / std::abs(h0) : std::abs(h);
    tr.max_rel_drift = std::max(tr.max_rel_drift, drift);
    if (cfg.check_drift && drift > cfg.drift_tol) {
      std::ostringstream os;
      os << "relative drift of the frozen energy " << drift << " at t=" << t << " exceeds "
         << cfg.drift_tol;
      throw Error(ErrorKind::Integrator, "dynamics", os.str());
    }
    if (cfg.keep_states) tr.states.push_back(x);
    if (observer) observer(t, x);
  };
  tr.particle.push_back({0.0, x.q, x.p, sys.B * x.p});
  record(0.0);
  for (long s = 1; s <= plan.steps; ++s) {
    sys.step(x, plan.dt, cfg.scheme);
    const double t = s * plan.dt;
    tr.particle.push_back({t, x.q, x.p, sys.B * x.p});
    if (s % cfg.record_every == 0 || s == plan.steps) record(t);
  }
  return tr;
}

double support_radius(const FieldPair& f, double rel) {
  const auto& g = f.grid;
  const auto psi = f.psi();
  const auto pi = f.pi();
  double pk_psi = 0.0, pk_pi = 0.0;
  for (std::size_t m = 0; m < psi.size(); ++m) {
    pk_psi = std::max(pk_psi, std::abs(psi[m]));
    pk_pi = std::max(pk_pi, std::abs(pi[m]));
  }
  double r = 0.0;
  const int n = g.n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const std::size_t m = g.index(i, j, l);
        if (std::abs(psi[m]) > rel * pk_psi || std::abs(pi[m]) > rel * pk_pi)
          r = std::max(r, g.x(i, j, l).norm());
      }
  return r;
}

FieldPair wave_group(const FieldPair& f0, double t, const Vec3& v, double radius, bool enforce) {
  require_subluminal(v, "dynamics");
  if (enforce) {
    const double r0 = radius >= 0.0 ? radius : support_radius(f0);
    const double horizon = 0.5 * f0.grid.box_length() - r0;
    if (std::abs(t) > horizon) {
      std::ostringstream os;
      os << "|t| = " << std::abs(t) << " beyond wrap horizon " << horizon;
      throw Error(ErrorKind::Wrap, "dynamics", os.str());
    }
  }
  FieldPair out = f0;
  kernels::omp::forced_flow(out.grid, out.psi_hat, out.pi_hat, {}, v, t);
  return out;
}

}  // namespace wp
