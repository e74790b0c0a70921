#include <cmath>
#include <numbers>

#include "common.hpp"
#include "wavepart/error.hpp"
#include "wavepart/spectral.hpp"
#include "wavepart/symplectic.hpp"

using namespace wp;

TEST_CASE("fundamental solution") {
  const Vec3 y(0.7, 0.4, -0.3);
  const cplx lam(1.0, 0.5);
  const double r = y.norm();
  CHECK(std::abs(g_lambda(lam, y, Vec3::Zero()) - std::exp(-lam * r) / (4 * std::numbers::pi * r)) < 1e-15);

  const auto gp = green_params(1.0, Vec3(0.6, 0, 0));
  CHECK(gp.kappa.real() == doctest::Approx(1.25));
  CHECK(gp.kappa1.real() == doctest::Approx(0.75));
  CHECK(gp.kappa1.real() < gp.kappa.real());

  // (-Lap + (-v.grad + lambda)^2) g = 0 away from the origin
  const Vec3 v(0.6, 0.0, 0.0);
  const double h = 1e-3;
  auto g = [&](const Vec3& x) { return g_lambda(lam, x, v); };
  cplx lap = 0.0, dv = 0.0, dvv = 0.0;
  for (int a = 0; a < 3; ++a) {
    const Vec3 e = h * Vec3::Unit(a);
    lap += (g(y + e) - 2.0 * g(y) + g(y - e)) / (h * h);
  }
  const Vec3 ev = h * v / v.norm();
  const double s = v.norm();
  dv = s * (g(y + ev) - g(y - ev)) / (2 * h);
  dvv = s * s * (g(y + ev) - 2.0 * g(y) + g(y - ev)) / (h * h);
  const cplx residual = -lap + dvv - 2.0 * lam * dv + lam * lam * g(y);
  CHECK(std::abs(residual) < 1e-5 * std::abs(lam * lam * g(y)));

  CHECK_THROWS_AS(g_lambda(lam, Vec3::Zero(), v), Error);
  CHECK_THROWS_AS(g_lambda(cplx(-1.0, 0.0), y, v), Error);
}

TEST_CASE("K and H matrices") {
  const auto& rho = *wpt::rho64();
  for (double speed : {0.0, 0.3}) {
    const Vec3 v(speed, 0, 0);
    for (double lam : {0.5, 1.0, 2.0}) {
      CAPTURE(speed);
      CAPTURE(lam);
      const auto se = kh_matrices(rho, v, {lam, 0.0});
      CHECK(se.offdiag_rel < 1e-10);
      for (int j = 0; j < 3; ++j) CHECK(se.K(j, j) > 0.0);
      const Vec3c h = h_convolution(rho, v, {lam, 0.0});
      for (int j = 0; j < 3; ++j) CHECK(std::abs(se.H(j, j) - h[j]) < 1e-4 * std::abs(se.H(j, j)));
    }
  }
  // |F| stays bounded over the right half plane
  const Vec3 v(0.3, 0, 0);
  double sup = 0.0;
  for (cplx lam : {cplx(0.05, 0), cplx(0.5, 2.0), cplx(1, -3), cplx(5, 0), cplx(0.1, 10)})
    sup = std::max(sup, kh_matrices(rho, v, lam).F.cwiseAbs().maxCoeff());
  CHECK(sup < 2.0 * kh_matrices(rho, v, {1e-3, 0.0}).K.cwiseAbs().maxCoeff());
  CHECK_THROWS_AS(kh_matrices(rho, v, {0.0, 1.0}), Error);
}

TEST_CASE("F vanishes to second order at 0") {
  const auto& rho = *wpt::rho64();
  const Vec3 v(0.3, 0, 0);
  const double ls[5] = {0.005, 0.01, 0.02, 0.04, 0.08};
  Eigen::Matrix<double, 5, 5> V;
  Eigen::Matrix<double, 5, 3> F;
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 5; ++c) V(r, c) = std::pow(ls[r], c);
    const auto se = kh_matrices(rho, v, {ls[r], 0.0});
    for (int j = 0; j < 3; ++j) F(r, j) = se.F(j, j).real();
  }
  const Eigen::Matrix<double, 5, 3> c = V.lu().solve(F);
  CHECK(c.row(0).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(c.row(1).cwiseAbs().maxCoeff() < 1e-6);
  // F / lambda^2 -> r(0)
  const Vec3 r0 = r_at_zero(rho, v);
  for (int j = 0; j < 3; ++j) CHECK(c(2, j) == doctest::Approx(r0[j]).epsilon(1e-6));
}

TEST_CASE("boundary values on the imaginary axis") {
  const auto& rho = *wpt::rho64();
  const Vec3 v(0.3, 0, 0);
  const SolitonParams sp{Vec3::Zero(), v};
  for (double w : {-3.0, -1.0, -0.5, 0.5, 1.0, 3.0}) {
    CAPTURE(w);
    const auto se = on_axis(rho, v, w);
    for (int j = 0; j < 3; ++j) CHECK(std::copysign(1.0, w) * se.F(j, j).imag() < 0.0);
    CHECK(std::abs(se.detM) > 1e-8);
    CHECK(std::abs(se.detM - se.detM_closed) < 1e-8 * std::abs(se.detM));
    // surface quadrature of Im H agrees with the assembled value
    for (int j = 0; j < 3; ++j) CHECK(se.imH_surface[j] == doctest::Approx(se.H(j, j).imag()).epsilon(1e-6));

    const auto ib = inverse_blocks(se, w);
    CHECK((ib.Linv * se.M - Mat6c::Identity()).cwiseAbs().maxCoeff() < 1e-8);
    const Mat3c rhs = cplx(0, 1) * ib.L12 * sp.B_inv().cast<cplx>();
    CHECK((ib.L11 - rhs).cwiseAbs().maxCoeff() < 1e-10);
  }
  // epsilon-limit from the right half plane
  for (double w : {-1.0, 1.0}) {
    const auto s = on_axis(rho, v, w);
    const auto a = kh_matrices(rho, v, {1e-3, w});
    const auto b = kh_matrices(rho, v, {1e-2, w});
    const Mat3c rich = (10.0 * a.H - b.H) / 9.0;
    CHECK((rich - s.H).cwiseAbs().maxCoeff() < 1e-3 * s.H.cwiseAbs().maxCoeff());
  }
  CHECK_THROWS_AS(on_axis(rho, v, 0.0), Error);
}

TEST_CASE("embedded eigenvalue at 0 and large-omega limit") {
  const auto& rho = *wpt::rho64();
  const Vec3 v(0.3, 0, 0);
  const SolitonParams sp{Vec3::Zero(), v};
  const Vec3 r0 = r_at_zero(rho, v);
  CHECK((r0.array() < 0.0).all());
  const double nu = sp.nu();
  CHECK(1.0 - nu * nu * nu * r0[0] > 0.0);
  CHECK(1.0 - nu * r0[1] > 0.0);
  const double d_small = std::abs(on_axis(rho, v, 0.02).detM);
  const double d_mid = std::abs(on_axis(rho, v, 0.2).detM);
  CHECK(d_small < 1e-3 * d_mid);

  Mat6c lim = Mat6c::Zero();
  lim.diagonal().setConstant(cplx(0, -1));
  const double e20 = (20.0 * inverse_blocks(on_axis(rho, v, 20.0), 20.0).Linv - lim).cwiseAbs().maxCoeff();
  const double e40 = (40.0 * inverse_blocks(on_axis(rho, v, 40.0), 40.0).Linv - lim).cwiseAbs().maxCoeff();
  CHECK(e40 / e20 == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("H is analytic: mean-value property") {
  const auto& rho = *wpt::rho64();
  const Vec3 v(0.3, 0, 0);
  const cplx c(1.0, 0.5);
  const double r = 0.5;
  const int m = 24;
  Mat3c mean = Mat3c::Zero();
  for (int k = 0; k < m; ++k)
    mean += kh_matrices(rho, v, c + r * std::polar(1.0, 2 * std::numbers::pi * k / m)).H / double(m);
  const Mat3c centre = kh_matrices(rho, v, c).H;
  CHECK((mean - centre).cwiseAbs().maxCoeff() < 1e-6 * centre.cwiseAbs().maxCoeff());
}

TEST_CASE("Phi") {
  const auto& rho = *wpt::rho64();
  const auto& g = rho.grid;
  SUBCASE("zero data") {
    const SpectralData z(g.size(), 0.0);
    const auto pe = phi_eval(rho, Vec3(0.3, 0, 0), z, z, {{0.5, 0.0}});
    CHECK(pe.phi0.norm() == 0.0);
    CHECK(pe.phi_prime0.norm() == 0.0);
    CHECK(pe.phi_at[0].norm() == 0.0);
  }
  SUBCASE("symplectic orthogonality identities") {
    const Vec3 v(0.3, 0.03, 0);
    const auto fr = tangent_frame(rho, v, g);
    const Mat3 binv = SolitonParams{Vec3::Zero(), v}.B_inv();
    for (std::uint64_t seed : {21u, 22u, 23u}) {
      const PhaseState x = wpt::random_state(g, seed);
      const auto pe = phi_eval(rho, v, x.fields.psi_hat, x.fields.pi_hat);
      const Vec3 bq = binv * x.q;
      for (int j = 0; j < 3; ++j) {
        const double a = symplectic_form(x, fr.tau[j]);
        const double b = symplectic_form(x, fr.tau[3 + j]);
        CHECK(a == doctest::Approx(-pe.phi0[j] - x.p[j]).epsilon(1e-6));
        CHECK(b == doctest::Approx(pe.phi_prime0[j] + bq[j]).epsilon(1e-6));
      }
    }
  }
  SUBCASE("time-domain route at lambda = 0.5") {
    // the time integral is cut where periodic images arrive: needs the larger box
    const Grid3 g96(96, 32.0);
    const auto rho96 = make_admissible_density(1.0, 0.01, g96);
    const PhaseState x = wpt::random_state(g96, 31);
    const Vec3 v = Vec3::Zero();
    const auto pe = phi_eval(rho96, v, x.fields.psi_hat, x.fields.pi_hat, {{0.5, 0.0}});
    const Vec3c td = phi_time_domain(rho96, v, x.fields.psi_hat, x.fields.pi_hat, {0.5, 0.0});
    CHECK((td - pe.phi_at[0]).norm() < 1e-3 * pe.phi_at[0].norm());
  }
}
