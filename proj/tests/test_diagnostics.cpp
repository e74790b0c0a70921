#include <algorithm>
#include <cmath>
#include <complex>

#include "common.hpp"
#include "wavepart/diagnostics.hpp"
#include "wavepart/error.hpp"

using namespace wp;

TEST_CASE("weighted norms") {
  const auto& g = wpt::grid64();
  const FieldPair f = make_perturbation(g, Vec3::Zero(), 1.0, 3, 1.0, 0.0, 9);
  // with pi = 0 and alpha = 0 the weight drops out: |psi|_2 + |grad psi|_2
  FieldPair f0 = f;
  std::fill(f0.pi_hat.begin(), f0.pi_hat.end(), std::complex<double>(0.0));
  CHECK(weighted_norm(f0, 0.0) == doctest::Approx(f_norm(f0) + [&] {
          double s = 0.0;
          for (double x : f0.psi()) s += x * x;
          return std::sqrt(s * std::pow(g.spacing(), 3));
        }()).epsilon(1e-10));
  double prev = 0.0;
  for (double a : {0.0, 0.5, 1.0, 2.0, 4.25}) {
    const double w = weighted_norm(f, a);
    CHECK(w >= prev);
    prev = w;
  }
  // make_perturbation scales to the requested size
  CHECK(weighted_norm(make_perturbation(g, Vec3::Zero(), 1.0, 3, 0.01, 4.25, 2), 4.25) ==
        doctest::Approx(0.01).epsilon(1e-12));
  PhaseState y = PhaseState::zero(g);
  y.fields = f;
  y.q = Vec3(3, 0, 0);
  y.p = Vec3(0, 4, 0);
  CHECK(weighted_norm(y, 1.0) == doctest::Approx(weighted_norm(f, 1.0) + 7.0));
}

TEST_CASE("soliton weighted norms grow with alpha") {
  const auto& rho = *wpt::rho64();
  const PhaseState s = soliton_state(rho, SolitonParams{Vec3::Zero(), Vec3(0.3, 0, 0)}, rho.grid);
  const double a1 = weighted_norm(s.fields, 1.0), a2 = weighted_norm(s.fields, 2.0),
               a4 = weighted_norm(s.fields, 4.25);
  CHECK(std::isfinite(a4));
  CHECK(a1 < a2);
  CHECK(a2 < a4);
}

TEST_CASE("fit_decay") {
  std::vector<double> t, a, c;
  for (int i = 1; i <= 40; ++i) {
    t.push_back(0.5 * i);
    a.push_back(3.0 * std::pow(0.5 * i, -1.5));
    c.push_back(2.0);
  }
  const auto f = fit_decay(t, a, 5.0, 20.0);
  CHECK(f.exponent == doctest::Approx(-1.5).epsilon(1e-6));
  CHECK(f.prefactor == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(f.samples == 31);
  CHECK(f.residual < 1e-10);
  CHECK(std::abs(fit_decay(t, c, 5.0, 20.0).exponent) < 1e-12);
  a[20] = 0.0;
  CHECK_THROWS_AS(fit_decay(t, a, 5.0, 20.0), Error);
  CHECK_THROWS_AS(fit_decay(t, c, 19.0, 20.0), Error);  // fewer than 10 samples
  CHECK_THROWS_AS(fit_decay(t, c, 5.0, 5.0), Error);
}

TEST_CASE("majorant and drift") {
  ModulationTrack tr;
  const SolitonParams s{Vec3::Zero(), Vec3(0.3, 0, 0)};
  for (int i = 0; i < 20; ++i) {
    tr.times.push_back(0.5 * i);
    tr.sigma.push_back(s);
    tr.c.push_back(Vec3::Zero());
    tr.Z_norms.push_back(0.0);
    tr.cdot.push_back(Vec3::Zero());
    tr.vdot.push_back(Vec3::Zero());
  }
  auto md = majorant_and_drift(tr, 0.25, tr.times.back());
  for (double m : md.m) CHECK(m == 0.0);
  for (const auto& d : md.d1) CHECK(d.norm() == 0.0);

  // running supremum on a noisy series
  for (int i = 0; i < 20; ++i) tr.Z_norms[i] = 1e-3 * (1.0 + 0.5 * std::sin(3.0 * i)) / (1.0 + tr.times[i]);
  md = majorant_and_drift(tr, 0.25, tr.times.back());
  for (std::size_t i = 1; i < md.m.size(); ++i) CHECK(md.m[i] >= md.m[i - 1]);
}

TEST_CASE("exact soliton run: modulation and scattering") {
  const auto rho = wpt::rho64();
  const SolitonParams s{Vec3(0.1, 0, 0), Vec3(0.3, 0, 0)};
  SimConfig c;
  c.rho = rho;
  c.initial = soliton_state(*rho, s, rho->grid);
  c.t_end = 1.0;
  c.record_every = 3;
  c.keep_states = true;
  const auto traj = run_nonlinear(c);
  const auto tr = extract_modulation(traj, rho, s);
  CHECK_FALSE(tr.failure_index.has_value());
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    CHECK(tr.Z_norms[i] < 1e-5);
    CHECK((tr.sigma[i].b - s.b - tr.times[i] * s.v).norm() < 1e-5);
    CHECK((tr.sigma[i].v - s.v).norm() < 1e-6);
  }
  const auto sc = scattering_state(traj, rho);
  CHECK(f_norm(sc.psi_plus) < 1e-5);
  for (double d : sc.cauchy) CHECK(d < 1e-5);
  CHECK((sc.v_plus - s.v).norm() < 1e-6);

  // streaming trackers reproduce the batch track
  ModulationTracker mt(rho, s);
  for (std::size_t i = 0; i < traj.times.size(); ++i) mt.observe(traj.times[i], traj.states[i]);
  const auto streamed = mt.finish();
  REQUIRE(streamed.times.size() == tr.times.size());
  for (std::size_t i = 0; i < tr.times.size(); ++i) CHECK(streamed.Z_norms[i] == tr.Z_norms[i]);
}

TEST_CASE("perturbed run: small modulation") {
  const auto rho = wpt::rho64();
  const auto& g = rho->grid;
  const SolitonParams s{Vec3::Zero(), Vec3(0.1, 0, 0)};
  SimConfig c;
  c.rho = rho;
  c.initial = soliton_state(*rho, s, g);
  c.initial.fields += make_perturbation(g, Vec3::Zero(), 1.0, 3, 1e-2, 4.25, 0);
  c.t_end = 1.0;
  c.record_every = 3;
  c.keep_states = true;
  const auto traj = run_nonlinear(c);
  const auto tr = extract_modulation(traj, rho, s);
  CHECK_FALSE(tr.failure_index.has_value());
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    CHECK(tr.Z_norms[i] > 0.0);
    CHECK(tr.residuals[i] < 1e-10);
    CHECK(tr.T_norms[i] >= 0.0);
  }
  CHECK(tr.beta == 4.25);
}
