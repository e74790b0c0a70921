#pragma once

#include <array>
#include <span>
#include <vector>

#include "wavepart/grid.hpp"

namespace wp {

/// Radial coupling function rho(x) = rho1(|x|) sampled on a grid.
///
/// Profiles are Laplacian polynomials of a Gaussian,
///   rho = A sum_n c_n Lap^n G_w,   G_w(x) = exp(-|x|^2 / (2 w^2)),
/// so that rho^(k) = A w^3 exp(-w^2 k^2 / 2) sum_n c_n (-k^2)^n in closed form.
struct ChargeDensity {
  Grid3 grid;
  double base_width = 1.0;
  double amplitude = 1.0;
  std::vector<double> laplacian_coeffs;  // c_n
  RealData samples;                      // rho(x) on the grid
  SpectralData rho_hat;                  // closed form on the grid modes
  double effective_radius = 0.0;         // |rho| < negligible * max beyond this
  bool moments_vanish = false;           // check_moments(4) at construction

  double profile(double r) const;
  double profile_derivative(double r) const;
  double profile_hat(double k) const;

  // polynomial Q(u), u = r/w, with rho1 = A Q(u) exp(-u^2/2)
  std::vector<double> radial_poly;
};

struct DensityOptions {
  double negligible = 1e-10;     // relative threshold defining effective_radius
  double aliasing_tol = 1e-12;   // max allowed |rho^| at Nyquist / max |rho^|
};

ChargeDensity make_density(std::vector<double> laplacian_coeffs, double base_width,
                           double amplitude, const Grid3& grid,
                           const DensityOptions& opt = {});

/// rho = A Lap^3 G_w, so rho^ = -A w^3 |k|^6 exp(-w^2 k^2 / 2).
ChargeDensity make_admissible_density(double base_width, double amplitude, const Grid3& grid,
                                      const DensityOptions& opt = {});

struct WienerReport {
  double min_abs = 0.0;
  Vec3 worst_k = Vec3::Zero();
  double floor = 0.0;
  double max_abs = 0.0;
  bool pass = false;
};

/// min |rho^(k)| over sampled points on the given shells, evaluated by the
/// off-grid transform of the samples.
WienerReport check_wiener(const ChargeDensity& rho, std::span<const double> shells,
                          double floor_rel = 1e-12, int directions_per_shell = 64);

/// Evenly spaced shells in (0, k_max] used when the caller gives none.
std::vector<double> default_shells(const Grid3& grid, int count = 24);
/// Evenly spaced shells in (0, k_band], k_band = min(k_max, sqrt(2 ln(1/floor_rel)) / w):
/// beyond k_band the Gaussian envelope exp(-w^2 k^2 / 2) of the base is below
/// the floor, so |rho^| there is not resolvable in double precision.
std::vector<double> band_shells(const ChargeDensity& rho, int count = 24, double floor_rel = 1e-12);

struct MomentsReport {
  std::vector<std::array<int, 3>> indices;
  std::vector<double> values;
  double l1_norm = 0.0;
  double max_rel = 0.0;
  double tol = 1e-8;
  bool pass = false;
};

MomentsReport check_moments(const ChargeDensity& rho, int max_order, double moment_tol = 1e-8);

/// Fibonacci-lattice unit vectors.
std::vector<Vec3> sphere_directions(int count);

}  // namespace wp
