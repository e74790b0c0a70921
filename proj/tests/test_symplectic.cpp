#include <cmath>

#include "common.hpp"
#include "wavepart/error.hpp"
#include "wavepart/symplectic.hpp"

using namespace wp;

TEST_CASE("symplectic form basics") {
  const auto& g = wpt::grid64();
  const PhaseState y = wpt::random_state(g, 1);
  const PhaseState z = wpt::random_state(g, 2);
  CHECK(std::abs(symplectic_form(y, y)) < 1e-14);
  CHECK(symplectic_form(y, z) == doctest::Approx(-symplectic_form(z, y)).epsilon(1e-12));
  PhaseState a = PhaseState::zero(g), b = PhaseState::zero(g);
  a.q = Vec3::UnitX();
  b.p = Vec3::UnitX();
  CHECK(symplectic_form(a, b) == 1.0);
  // bilinear
  const PhaseState w = wpt::random_state(g, 3);
  CHECK(symplectic_form(2.0 * y + w, z) ==
        doctest::Approx(2.0 * symplectic_form(y, z) + symplectic_form(w, z)).epsilon(1e-12));
  CHECK_THROWS_AS(symplectic_form(y, PhaseState::zero(Grid3(32, 8.0))), Error);
}

TEST_CASE("Omega(tau_1, tau_4) against direct Parseval") {
  const auto& rho = *wpt::rho64();
  const auto& g = rho.grid;
  const Vec3 v(0.3, 0, 0);
  const auto fr = tangent_frame(rho, v, g);
  // -<d1 psi, dv1 pi> + <d1 pi, dv1 psi> + e1 . B^{-1} e1
  const FieldPair f = soliton_field(rho, v);
  const auto d1psi = gradient(g, f.psi_hat, 0);
  const auto d1pi = gradient(g, f.pi_hat, 0);
  double s = 0.0;
  for (std::size_t m = 0; m < g.size(); ++m)
    s += (-d1psi[m] * std::conj(fr.tau[3].fields.pi_hat[m]) +
          d1pi[m] * std::conj(fr.tau[3].fields.psi_hat[m]))
             .real();
  s *= std::pow(g.dk(), 3);
  s += SolitonParams{Vec3::Zero(), v}.B_inv()(0, 0);
  CHECK(symplectic_form(fr.tau[0], fr.tau[3]) == doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("Omega matrix") {
  const auto& rho = *wpt::rho64();
  for (double speed : {0.0, 0.3, 0.6}) {
    CAPTURE(speed);
    const auto fr = tangent_frame(rho, Vec3(speed, 0, 0), rho.grid);
    const auto om = omega_matrix(fr);
    CHECK((om.entries + om.entries.transpose()).cwiseAbs().maxCoeff() <
          1e-10 * om.entries.cwiseAbs().maxCoeff());
    CHECK(std::abs(om.det) > 1e-3);
    if (speed == 0.0) CHECK(om.entries.block<3, 3>(0, 0).cwiseAbs().maxCoeff() < 1e-14);
  }
  // depends on v only
  const auto a = omega_matrix(tangent_frame(rho, SolitonParams{Vec3::Zero(), Vec3(0.3, 0.1, 0)}));
  const auto b = omega_matrix(tangent_frame(rho, SolitonParams{Vec3(1.3, -0.4, 0.2), Vec3(0.3, 0.1, 0)}));
  CHECK((a.entries - b.entries).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("transversal projector") {
  const auto& rho = *wpt::rho64();
  const auto fr = tangent_frame(rho, Vec3(0.3, 0.1, 0), rho.grid);
  const auto om = omega_matrix(fr);
  for (const auto& t : fr.tau)
    CHECK(state_norm(project_transversal(t, fr, om)) < 1e-10 * state_norm(t));
  const PhaseState z = wpt::random_state(rho.grid, 4);
  const PhaseState pz = project_transversal(z, fr, om);
  CHECK(state_norm(project_transversal(pz, fr, om) - pz) < 1e-10 * state_norm(pz));
  for (const auto& t : fr.tau) CHECK(std::abs(symplectic_form(pz, t)) < 1e-10 * state_norm(z));
  // Z = sum c_j tau_j + P Z
  const Vec6 c = tangent_coefficients(z, fr, om);
  PhaseState rebuilt = pz;
  for (int j = 0; j < 6; ++j) rebuilt.axpy(c[j], fr.tau[j]);
  CHECK(state_norm(rebuilt - z) < 1e-12 * state_norm(z));
}

TEST_CASE("projection onto the solitary manifold") {
  const auto& rho = *wpt::rho64();
  const auto& g = rho.grid;
  const SolitonParams sigma{Vec3(0.4, -0.2, 0.1), Vec3(0.3, 0.1, 0)};
  const PhaseState s = soliton_state(rho, sigma, g);
  auto dist = [](const SolitonParams& a, const SolitonParams& b) {
    return std::max((a.b - b.b).norm(), (a.v - b.v).norm());
  };

  SUBCASE("fixed point") {
    const auto r = project_to_manifold(s, rho, sigma);
    CHECK(dist(r.sigma, sigma) < 1e-8);
    CHECK(state_norm(r.transversal) < 1e-8 * state_norm(s));
  }
  SUBCASE("transversal kick") {
    const auto fr = tangent_frame(rho, sigma);
    PhaseState y = s;
    y.axpy(1.0, project_transversal(wpt::random_state(g, 7, 1e-3, 1e-3), fr, omega_matrix(fr)));
    const SolitonParams guess{sigma.b + Vec3(0.05, 0, 0), sigma.v + Vec3(0.02, 0, 0)};
    const auto r = project_to_manifold(y, rho, guess);
    CHECK(dist(r.sigma, sigma) < 1e-8);
    CHECK(r.residual < 1e-10 * r.y_norm);
  }
  SUBCASE("equivariance") {
    PhaseState y = s;
    y.axpy(1.0, wpt::random_state(g, 8, 1e-3, 1e-3));
    const Vec3 a(0.7, -0.4, 0.2);
    const auto p0 = project_to_manifold(y, rho, sigma).sigma;
    const auto p1 = project_to_manifold(translate(y, a), rho, SolitonParams{sigma.b + a, sigma.v}).sigma;
    CHECK(dist(p1, SolitonParams{p0.b + a, p0.v}) < 1e-8);
  }
  SUBCASE("errors") {
    ProjectionOptions opt;
    opt.v_cap = 0.2;
    CHECK_THROWS_AS(project_to_manifold(s, rho, sigma, opt), Error);
  }
}
