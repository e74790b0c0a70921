#include <cmath>

#include "common.hpp"
#include "wavepart/kernels.hpp"

using namespace wp;
namespace K = wp::kernels;

namespace {

struct Fixture {
  const Grid3& g = wpt::grid64();
  SpectralData psi, pi;
  RealData f;
  Fixture() {
    const PhaseState y = wpt::random_state(g, 17);
    psi = y.fields.psi_hat;
    pi = y.fields.pi_hat;
    f = y.fields.psi();
  }
};

}  // namespace

TEST_CASE("omp kernels agree with the serial reference") {
  Fixture fx;
  const auto& g = fx.g;
  const auto& rho = *wpt::rho64();

  CHECK(K::omp::inner(g, fx.psi, fx.pi) == doctest::Approx(K::ref::inner(g, fx.psi, fx.pi)).epsilon(1e-13));
  const Vec3 c(0.3, -0.2, 0.1);
  CHECK(K::omp::weighted_sq(g, fx.f, c, 4.25) ==
        doctest::Approx(K::ref::weighted_sq(g, fx.f, c, 4.25)).epsilon(1e-13));

  auto a = fx.psi, b = fx.psi;
  K::omp::shift_phase(g, a, c);
  K::ref::shift_phase(g, b, c);
  CHECK(wpt::max_abs_diff(a, b) < 1e-15 * wpt::max_abs(a) + 1e-300);

  const auto ma = K::omp::moments(g, fx.f, 4), mb = K::ref::moments(g, fx.f, 4);
  REQUIRE(ma.size() == mb.size());
  REQUIRE(ma.size() == K::multi_indices(4).size());
  for (std::size_t i = 0; i < ma.size(); ++i) CHECK(std::abs(ma[i] - mb[i]) < 1e-12);

  const std::vector<Vec3> ks = {Vec3(0.3, 0.1, 0), Vec3(1.7, -2, 0.5), Vec3(0, 0, 4)};
  const auto da = K::omp::dtft(g, fx.f, ks), db = K::ref::dtft(g, fx.f, ks);
  for (std::size_t i = 0; i < ks.size(); ++i) CHECK(std::abs(da[i] - db[i]) < 1e-12);

  for (int mode = 0; mode < 2; ++mode) {
    CAPTURE(mode);
    K::ForcedSource src;
    src.rho_hat = rho.rho_hat;
    if (mode == 0) {
      src.shift = Vec3(0.2, 0.1, -0.3);
      src.scale = -1.0;
    } else {
      src.direction = Vec3(0.01, -0.02, 0.03);
    }
    const Vec3 drift(0.3, 0, 0.1);
    auto p1 = fx.psi, q1 = fx.pi, p2 = fx.psi, q2 = fx.pi;
    const Vec3 fa = K::omp::forced_flow(g, p1, q1, src, drift, 0.1);
    const Vec3 fb = K::ref::forced_flow(g, p2, q2, src, drift, 0.1);
    CHECK((fa - fb).norm() < 1e-12 * (fb.norm() + 1e-12));
    CHECK(wpt::max_abs_diff(p1, p2) < 1e-14 * wpt::max_abs(p2));
    CHECK(wpt::max_abs_diff(q1, q2) < 1e-14 * wpt::max_abs(q2));
  }
}

TEST_CASE("omp results do not depend on the thread count") {
  Fixture fx;
  const auto& g = fx.g;
  const int saved = K::max_threads();
  K::set_threads(1);
  const double i1 = K::omp::inner(g, fx.psi, fx.pi);
  const double w1 = K::omp::weighted_sq(g, fx.f, Vec3::Zero(), 2.25);
  const auto m1 = K::omp::moments(g, fx.f, 2);
  K::set_threads(4);
  const double i4 = K::omp::inner(g, fx.psi, fx.pi);
  const double w4 = K::omp::weighted_sq(g, fx.f, Vec3::Zero(), 2.25);
  const auto m4 = K::omp::moments(g, fx.f, 2);
  K::set_threads(saved);
  CHECK(i1 == i4);
  CHECK(w1 == w4);
  CHECK(m1 == m4);
}

TEST_CASE("free flow is a per-mode rotation") {
  Fixture fx;
  const auto& g = fx.g;
  auto p = fx.psi, q = fx.pi;
  const K::ForcedSource none;
  K::omp::forced_flow(g, p, q, none, Vec3::Zero(), 0.7);
  K::omp::forced_flow(g, p, q, none, Vec3::Zero(), -0.7);
  CHECK(wpt::max_abs_diff(p, fx.psi) < 1e-13 * wpt::max_abs(fx.psi));
  CHECK(wpt::max_abs_diff(q, fx.pi) < 1e-13 * wpt::max_abs(fx.pi));
}
