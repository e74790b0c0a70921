#pragma once

#include <memory>
#include <random>

#include "doctest.h"
#include "wavepart/experiment.hpp"

namespace wpt {

// Smallest box on which the admissible density keeps its moments at 1e-8.
inline const wp::Grid3& grid64() {
  static const wp::Grid3 g(64, 64.0 / 3.0);
  return g;
}

inline std::shared_ptr<const wp::ChargeDensity> rho64() {
  static auto rho =
      std::make_shared<const wp::ChargeDensity>(wp::make_admissible_density(1.0, 0.01, grid64()));
  return rho;
}

inline wp::PhaseState random_state(const wp::Grid3& g, std::uint64_t seed, double field = 1.0,
                                   double qp = 0.3) {
  wp::PhaseState z = wp::PhaseState::zero(g);
  z.fields = wp::make_perturbation(g, wp::Vec3::Zero(), 1.0, 3, field, 0.0, seed);
  std::mt19937_64 rng(seed + 1000);
  std::normal_distribution<double> normal;
  for (int a = 0; a < 3; ++a) z.q[a] = qp * normal(rng);
  for (int a = 0; a < 3; ++a) z.p[a] = qp * normal(rng);
  return z;
}

inline double max_abs_diff(const wp::SpectralData& a, const wp::SpectralData& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const wp::SpectralData& a) {
  double m = 0.0;
  for (const auto& x : a) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace wpt
