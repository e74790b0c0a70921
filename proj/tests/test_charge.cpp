#include <cmath>

#include "common.hpp"
#include "wavepart/charge.hpp"
#include "wavepart/error.hpp"
#include "wavepart/transform.hpp"

using namespace wp;

TEST_CASE("admissible density vanishes at k = 0") {
  const auto& rho = *wpt::rho64();
  CHECK(rho.rho_hat[0] == cplx(0.0));
  double total = 0.0;
  for (double s : rho.samples) total += s;
  total *= std::pow(rho.grid.spacing(), 3);
  double l1 = 0.0;
  for (double s : rho.samples) l1 += std::abs(s);
  l1 *= std::pow(rho.grid.spacing(), 3);
  CHECK(std::abs(total) < 1e-8 * l1);
}

TEST_CASE("closed-form transform agrees with the discrete transform") {
  const auto& rho = *wpt::rho64();
  const auto& g = rho.grid;
  const auto fh = forward(g, rho.samples);
  double err = 0.0, ref = wpt::max_abs(rho.rho_hat);
  for (std::size_t m = 0; m < fh.size(); ++m) err = std::max(err, std::abs(fh[m] - rho.rho_hat[m]));
  CHECK(err / ref < 1e-6);
  // -|k|^6 exp(-|k|^2/2) shape
  const double k = 1.3;
  CHECK(rho.profile_hat(k) == doctest::Approx(-0.01 * std::pow(k, 6) * std::exp(-0.5 * k * k)));
}

TEST_CASE("radial transform") {
  const auto& rho = *wpt::rho64();
  const auto& g = rho.grid;
  // permutations of a mode index share |k|
  const cplx a = rho.rho_hat[g.index(3, 5, 7)];
  for (auto idx : {g.index(5, 3, 7), g.index(7, 5, 3), g.index(64 - 3, 5, 64 - 7)})
    CHECK(std::abs(rho.rho_hat[idx] - a) < 1e-10 * std::abs(a));
}

TEST_CASE("Wiener check") {
  const auto& rho = *wpt::rho64();
  SUBCASE("admissible density passes on the resolved band") {
    const auto rep = check_wiener(rho, band_shells(rho));
    CHECK(rep.pass);
    CHECK(rep.min_abs > 0.0);
    // strictly positive up to the grid cutoff too
    CHECK(check_wiener(rho, default_shells(rho.grid), 0.0).min_abs > 0.0);
  }
  SUBCASE("transform vanishing on the unit sphere fails there") {
    // rho^ = (|k|^2 - 1) e^{-|k|^2/2}: coefficients of (-k^2)^n are (-1, -1)
    const auto bad = make_density({-1.0, -1.0}, 1.0, 1.0, rho.grid);
    const std::vector<double> shells = {0.5, 1.0, 1.5, 2.0};
    const auto rep = check_wiener(bad, shells);
    CHECK_FALSE(rep.pass);
    CHECK(rep.worst_k.norm() == doctest::Approx(1.0));
  }
  SUBCASE("zero density fails") {
    const auto zero = make_admissible_density(1.0, 0.0, rho.grid);
    const std::vector<double> shells = {1.0};
    const auto rep = check_wiener(zero, shells);
    CHECK_FALSE(rep.pass);
    CHECK(rep.min_abs == 0.0);
  }
  SUBCASE("argument errors") {
    CHECK_THROWS_AS(check_wiener(rho, std::vector<double>{}), Error);
    CHECK_THROWS_AS(check_wiener(rho, std::vector<double>{-1.0}), Error);
  }
}

TEST_CASE("moments") {
  const auto& rho = *wpt::rho64();
  const auto rep = check_moments(rho, 4);
  CHECK(rep.pass);
  CHECK(rep.indices.size() == 35);
  CHECK(rho.moments_vanish);

  const auto gauss = make_density({1.0}, 1.0, 1.0, rho.grid);
  CHECK_FALSE(check_moments(gauss, 0).pass);
  CHECK_FALSE(gauss.moments_vanish);
  // odd moments of a radial function vanish
  const auto m = check_moments(gauss, 3);
  for (std::size_t i = 0; i < m.indices.size(); ++i) {
    const auto& a = m.indices[i];
    if ((a[0] + a[1] + a[2]) % 2 == 1) CHECK(std::abs(m.values[i]) < 1e-12 * m.l1_norm);
  }
  CHECK_THROWS_AS(check_moments(rho, -1), Error);
}

TEST_CASE("spectral derivatives at 0 vanish iff moments vanish") {
  // rho^ ~ |k|^6 near 0 for the admissible profile, ~ k^0 for the Gaussian
  const auto& rho = *wpt::rho64();
  const double eps = 1e-2;
  CHECK(std::abs(rho.profile_hat(eps)) < 1e-8 * rho.amplitude);
  const auto gauss = make_density({1.0}, 1.0, 1.0, rho.grid);
  CHECK(std::abs(gauss.profile_hat(eps)) > 0.5);
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(make_admissible_density(1.0, 0.01, Grid3(16, 64.0 / 3.0)), Error);  // aliasing
  CHECK_THROWS_AS(make_admissible_density(4.0, 0.01, Grid3(64, 16.0)), Error);        // > L/8
  CHECK_THROWS_AS(make_admissible_density(0.0, 0.01, Grid3(64, 16.0)), Error);
}
