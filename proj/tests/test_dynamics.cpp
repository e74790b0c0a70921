#include <cmath>

#include "common.hpp"
#include "wavepart/diagnostics.hpp"
#include "wavepart/dynamics.hpp"
#include "wavepart/error.hpp"
#include "wavepart/symplectic.hpp"
#include "wavepart/transform.hpp"

using namespace wp;

TEST_CASE("Hamiltonian") {
  const auto rho = wpt::rho64();
  const auto& g = rho->grid;
  CHECK(hamiltonian(PhaseState::zero(g), *rho) == 1.0);
  const double self = coulomb_self_energy(*rho);
  CHECK(self < 0.0);
  const PhaseState s = soliton_state(*rho, SolitonParams{}, g);
  CHECK(hamiltonian(s, *rho) == doctest::Approx(self + 1.0).epsilon(1e-8));
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    PhaseState y = wpt::random_state(g, seed, 0.01);
    CHECK(hamiltonian(y, *rho) >= self + std::sqrt(1.0 + y.p.squaredNorm()));
  }
}

TEST_CASE("static soliton is a fixed point") {
  const auto rho = wpt::rho64();
  const PhaseState s = soliton_state(*rho, SolitonParams{}, rho->grid);
  PhaseState y = s;
  const double dt = 0.25 * rho->grid.spacing();
  for (int k = 0; k < 4; ++k) nonlinear_step(y, *rho, dt);
  CHECK(state_norm(y - s) < 1e-13 * state_norm(s));
}

TEST_CASE("travelling soliton over a short run") {
  const auto rho = wpt::rho64();
  const SolitonParams s{Vec3(0.2, 0, 0), Vec3(0.3, 0, 0)};
  SimConfig c;
  c.rho = rho;
  c.initial = soliton_state(*rho, s, rho->grid);
  c.t_end = 2.0;
  c.record_every = 6;
  const auto tr = run_nonlinear(c);
  CHECK(tr.max_rel_drift < 1e-6);
  for (const auto& p : tr.particle) CHECK((p.q - s.b - p.t * s.v).norm() < 1e-5);
  CHECK(tr.times.back() == doctest::Approx(2.0));
  CHECK(tr.horizon > 2.0);
}

TEST_CASE("comoving splitting keeps a soliton at its reference velocity exactly") {
  const auto rho = wpt::rho64();
  const SolitonParams s{Vec3::Zero(), Vec3(0.3, 0, 0)};
  PhaseState y = soliton_state(*rho, s, rho->grid);
  const double dt = 0.25 * rho->grid.spacing();
  for (int k = 0; k < 12; ++k) nonlinear_step(y, *rho, dt, Scheme::Yoshida4, s.v);
  const double t = 12 * dt;
  const PhaseState ex = soliton_state(*rho, SolitonParams{t * s.v, s.v}, rho->grid);
  CHECK(state_norm(y - ex) < 1e-12 * state_norm(ex));
}

TEST_CASE("time reversal and splitting order") {
  const auto rho = wpt::rho64();
  const auto& g = rho->grid;
  PhaseState y = soliton_state(*rho, SolitonParams{Vec3::Zero(), Vec3(0.3, 0, 0)}, g);
  y.fields += make_perturbation(g, Vec3::Zero(), 1.0, 3, 1e-2, 0.0, 5);
  const PhaseState y0 = y;
  const double dt = 0.25 * g.spacing();
  for (Scheme sc : {Scheme::Strang, Scheme::Yoshida4}) {
    y = y0;
    for (int k = 0; k < 12; ++k) nonlinear_step(y, *rho, dt, sc);
    for (int k = 0; k < 12; ++k) nonlinear_step(y, *rho, -dt, sc);
    CHECK(state_norm(y - y0) < 1e-8 * state_norm(y0));
  }
  // Strang: halving dt divides the error at t = 1 by about 4
  auto run = [&](double step) {
    PhaseState z = y0;
    const int n = static_cast<int>(std::lround(1.0 / step));
    for (int k = 0; k < n; ++k) nonlinear_step(z, *rho, step, Scheme::Strang);
    return z;
  };
  const double h = g.spacing();
  const PhaseState ref = run(h / 32);
  const double e1 = state_norm(run(h / 4) - ref), e2 = state_norm(run(h / 8) - ref);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("run_nonlinear guards") {
  const auto rho = wpt::rho64();
  SimConfig c;
  c.rho = rho;
  c.initial = soliton_state(*rho, SolitonParams{Vec3::Zero(), Vec3(0.3, 0, 0)}, rho->grid);
  c.t_end = 100.0;
  CHECK_THROWS_AS(run_nonlinear(c), Error);  // wrap horizon
  c.t_end = 1.0;
  c.dt = rho->grid.spacing();
  CHECK_THROWS_AS(run_nonlinear(c), Error);  // dt above h/2
  c.dt = 0.0;
  c.v_cap = 0.2;
  CHECK_THROWS_AS(run_nonlinear(c), Error);  // blow-up rail
}

TEST_CASE("linearized flow") {
  const auto rho = wpt::rho64();
  const auto& g = rho->grid;
  const Vec3 v(0.3, 0, 0);
  const auto fr = tangent_frame(*rho, v, g);
  const LinearizedSystem sys(rho, v);
  for (int j = 0; j < 3; ++j) {
    CHECK(state_norm(sys.apply(fr.tau[j])) < 1e-10 * state_norm(fr.tau[j]));
    CHECK(state_norm(sys.apply(fr.tau[3 + j]) - fr.tau[j]) < 1e-10 * state_norm(fr.tau[j]));
  }
  SimConfig c;
  c.rho = rho;
  c.t_end = 2.0;
  c.record_every = 4;
  c.check_drift = false;
  double kernel = 0.0, secular = 0.0;
  run_linearized(fr.tau[0], v, c, [&](double, const PhaseState& x) {
    kernel = std::max(kernel, state_norm(x - fr.tau[0]) / state_norm(fr.tau[0]));
  });
  run_linearized(fr.tau[4], v, c, [&](double t, const PhaseState& x) {
    PhaseState ex = fr.tau[4];
    ex.axpy(t, fr.tau[1]);
    secular = std::max(secular, state_norm(x - ex) / state_norm(ex));
  });
  CHECK(kernel < 1e-6);
  CHECK(secular < 1e-4);

  // transversal random data: conserved nonnegative energy, invariant subspace
  const auto om = omega_matrix(fr);
  const LinState x0 = project_transversal(wpt::random_state(g, 3, 1.0, 0.1), fr, om);
  CHECK(sys.energy(x0) >= 0.0);
  CHECK(sys.energy(x0) == doctest::Approx(sys.energy_positive_form(x0)).epsilon(1e-10));
  c.dt = 0.125 * g.spacing();
  double omega_max = 0.0, h_min = INFINITY;
  const auto tr = run_linearized(x0, v, c, [&](double, const PhaseState& x) {
    h_min = std::min(h_min, sys.energy_positive_form(x));
    for (const auto& t : fr.tau) omega_max = std::max(omega_max, std::abs(symplectic_form(x, t)) / state_norm(x));
  });
  CHECK(tr.max_rel_drift < 1e-6);
  CHECK(h_min >= 0.0);
  CHECK(omega_max < 1e-6);
}

TEST_CASE("wave group") {
  const Grid3 g(96, 32.0);
  const int n = g.n();
  RealData psi(g.size()), pi(g.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const Vec3 x = g.x(i, j, l);
        const double e = std::exp(-x.squaredNorm());
        psi[g.index(i, j, l)] = x[0] * e;
        pi[g.index(i, j, l)] = (4.0 * x.squaredNorm() - 6.0) * e;
      }
  FieldPair f{g, forward(g, psi), forward(g, pi)};
  f.psi_hat[0] = f.pi_hat[0] = 0.0;
  const double r0 = support_radius(f);
  CHECK(r0 > 0.0);
  CHECK(r0 < 6.0);

  SUBCASE("energy preserved by W0") {
    // exact per mode: sum |k psi|^2 + |pi|^2
    auto energy = [&](const FieldPair& p) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int l = 0; l < n; ++l) {
            const auto m = g.index(i, j, l);
            s += g.k2(i, j, l) * std::norm(p.psi_hat[m]) + std::norm(p.pi_hat[m]);
          }
      return s;
    };
    CHECK(energy(wave_group(f, 3.0, Vec3::Zero(), r0)) == doctest::Approx(energy(f)).epsilon(1e-13));
  }
  SUBCASE("shift identity") {
    const Vec3 v(0.3, -0.1, 0.2);
    const double t = 2.5;
    const FieldPair w = wave_group(f, t, v, r0);
    const FieldPair w0 = translate(wave_group(f, t, Vec3::Zero(), r0), -t * v);
    CHECK(wpt::max_abs_diff(w.psi_hat, w0.psi_hat) < 1e-10 * wpt::max_abs(w.psi_hat));
    CHECK(wpt::max_abs_diff(w.pi_hat, w0.pi_hat) < 1e-10 * wpt::max_abs(w.pi_hat));
  }
  SUBCASE("strong Huygens principle") {
    const double t = 0.5 * g.box_length() - r0 - 0.5;
    const FieldPair w = wave_group(f, t, Vec3::Zero(), r0);
    const RealData a = w.psi();
    double peak = 0.0, inside = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          const double v = std::abs(a[g.index(i, j, l)]);
          peak = std::max(peak, v);
          if (g.x(i, j, l).norm() < t - r0) inside = std::max(inside, v);
        }
    CHECK(inside < 1e-8 * peak);
  }
  SUBCASE("wrap guard") { CHECK_THROWS_AS(wave_group(f, 0.5 * g.box_length(), Vec3::Zero(), r0), Error); }
}
