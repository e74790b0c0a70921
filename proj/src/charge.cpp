#include "wavepart/charge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wavepart/error.hpp"
#include "wavepart/kernels.hpp"

namespace wp {

namespace {

using Poly = std::vector<double>;

double eval(const Poly& p, double u) {
  double s = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) s = s * u + *it;
  return s;
}

Poly derivative(const Poly& p) {
  Poly d(p.size() > 1 ? p.size() - 1 : 1, 0.0);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = i * p[i];
  return d;
}

// Lap_u (P e^{-u^2/2}) = (P'' + 2P'/u - 2uP' - 3P + u^2 P) e^{-u^2/2}, P even.
Poly laplacian_gaussian_step(const Poly& p) {
  Poly out(p.size() + 2, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double c = p[i];
    if (c == 0.0) continue;
    if (i >= 2) out[i - 2] += c * (i * (i - 1.0) + 2.0 * i);
    out[i] += c * (-2.0 * i - 3.0);
    out[i + 2] += c;
  }
  return out;
}

}  // namespace

double ChargeDensity::profile(double r) const {
  const double u = r / base_width;
  return amplitude * eval(radial_poly, u) * std::exp(-0.5 * u * u);
}

double ChargeDensity::profile_derivative(double r) const {
  const double u = r / base_width;
  const double q = eval(radial_poly, u);
  const double dq = eval(derivative(radial_poly), u);
  return amplitude / base_width * (dq - u * q) * std::exp(-0.5 * u * u);
}

double ChargeDensity::profile_hat(double k) const {
  const double k2 = k * k;
  double s = 0.0, pw = 1.0;
  for (double c : laplacian_coeffs) {
    s += c * pw;
    pw *= -k2;
  }
  const double w = base_width;
  return amplitude * w * w * w * std::exp(-0.5 * w * w * k2) * s;
}

ChargeDensity make_density(std::vector<double> coeffs, double base_width, double amplitude,
                           const Grid3& grid, const DensityOptions& opt) {
  const double L = grid.box_length();
  if (!(base_width > 0.0) || !(base_width < L / 8.0)) {
    std::ostringstream os;
    os << "base_width=" << base_width << " outside (0, L/8) for L=" << L;
    throw Error(ErrorKind::Argument, "charge", os.str());
  }
  if (coeffs.empty()) throw Error(ErrorKind::Argument, "charge", "empty profile");

  ChargeDensity rho{grid, base_width, amplitude, {}, {}, {}, 0.0, false, {}};
  rho.base_width = base_width;
  rho.amplitude = amplitude;
  rho.laplacian_coeffs = std::move(coeffs);

  Poly q(1, 0.0);
  Poly pn{1.0};
  double scale = 1.0;
  for (double c : rho.laplacian_coeffs) {
    if (q.size() < pn.size()) q.resize(pn.size(), 0.0);
    for (std::size_t i = 0; i < pn.size(); ++i) q[i] += c * scale * pn[i];
    pn = laplacian_gaussian_step(pn);
    scale /= base_width * base_width;
  }
  rho.radial_poly = q;

  // aliasing: analytic rho^ at the axis Nyquist wavenumber vs its maximum
  double peak_hat = 0.0;
  for (int s = 1; s <= 2000; ++s)
    peak_hat = std::max(peak_hat, std::abs(rho.profile_hat(s * 0.01 / base_width)));
  peak_hat = std::max(peak_hat, std::abs(rho.profile_hat(0.0)));
  const double nyq = std::abs(rho.profile_hat(grid.k_max()));
  if (peak_hat > 0.0 && nyq > opt.aliasing_tol * peak_hat) {
    std::ostringstream os;
    os << "|rho^| at Nyquist is " << nyq / peak_hat << " of its peak (tol "
       << opt.aliasing_tol << "); refine the grid";
    throw Error(ErrorKind::Resolution, "charge", os.str());
  }

  double peak = 0.0;
  const double dr = base_width / 100.0;
  for (int s = 0; s <= 5000; ++s) peak = std::max(peak, std::abs(rho.profile(s * dr)));
  rho.effective_radius = 0.0;
  for (int s = 5000; s >= 0 && peak > 0.0; --s)
    if (std::abs(rho.profile(s * dr)) >= opt.negligible * peak) {
      rho.effective_radius = (s + 1) * dr;
      break;
    }

  const int n = grid.n();
  rho.samples.resize(grid.size());
  rho.rho_hat.resize(grid.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const std::size_t idx = grid.index(i, j, l);
        rho.samples[idx] = rho.profile(grid.x(i, j, l).norm());
        rho.rho_hat[idx] = rho.profile_hat(std::sqrt(grid.k2(i, j, l)));
      }
  rho.moments_vanish = check_moments(rho, 4).pass;
  return rho;
}

ChargeDensity make_admissible_density(double base_width, double amplitude, const Grid3& grid,
                                      const DensityOptions& opt) {
  return make_density({0.0, 0.0, 0.0, 1.0}, base_width, amplitude, grid, opt);
}

std::vector<Vec3> sphere_directions(int count) {
  std::vector<Vec3> dirs;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(1.0 - z * z);
    dirs.emplace_back(r * std::cos(golden * i), r * std::sin(golden * i), z);
  }
  return dirs;
}

std::vector<double> default_shells(const Grid3& grid, int count) {
  std::vector<double> s;
  for (int i = 1; i <= count; ++i) s.push_back(grid.k_max() * i / count);
  return s;
}

std::vector<double> band_shells(const ChargeDensity& rho, int count, double floor_rel) {
  const double band = std::sqrt(2.0 * std::log(1.0 / floor_rel)) / rho.base_width;
  const double top = std::min(rho.grid.k_max(), band);
  std::vector<double> s;
  for (int i = 1; i <= count; ++i) s.push_back(top * i / count);
  return s;
}

WienerReport check_wiener(const ChargeDensity& rho, std::span<const double> shells,
                          double floor_rel, int directions_per_shell) {
  if (shells.empty()) throw Error(ErrorKind::Argument, "charge", "empty shell set");
  for (double s : shells)
    if (!(s > 0.0) || s > rho.grid.k_max() * (1.0 + 1e-12))
      throw Error(ErrorKind::Argument, "charge", "shell radius outside (0, k_max]");

  const auto dirs = sphere_directions(directions_per_shell);
  std::vector<Vec3> ks;
  for (double s : shells)
    for (const auto& d : dirs) ks.push_back(s * d);
  const auto vals = kernels::omp::dtft(rho.grid, rho.samples, ks);

  WienerReport rep;
  for (const auto& z : rho.rho_hat) rep.max_abs = std::max(rep.max_abs, std::abs(z));
  rep.floor = floor_rel * rep.max_abs;
  rep.min_abs = std::abs(vals[0]);
  rep.worst_k = ks[0];
  for (std::size_t p = 1; p < vals.size(); ++p)
    if (std::abs(vals[p]) < rep.min_abs) {
      rep.min_abs = std::abs(vals[p]);
      rep.worst_k = ks[p];
    }
  rep.pass = rep.min_abs > rep.floor;
  return rep;
}

MomentsReport check_moments(const ChargeDensity& rho, int max_order, double moment_tol) {
  if (max_order < 0) throw Error(ErrorKind::Argument, "charge", "max_order must be >= 0");
  MomentsReport rep;
  rep.tol = moment_tol;
  rep.indices = kernels::multi_indices(max_order);
  rep.values = kernels::omp::moments(rho.grid, rho.samples, max_order);
  double l1 = 0.0;
  for (double v : rho.samples) l1 += std::abs(v);
  rep.l1_norm = l1 * rho.grid.cell_volume();
  rep.max_rel = 0.0;
  for (double v : rep.values) rep.max_rel = std::max(rep.max_rel, std::abs(v));
  rep.max_rel = rep.l1_norm > 0.0 ? rep.max_rel / rep.l1_norm : 0.0;
  rep.pass = rep.l1_norm > 0.0 && rep.max_rel < moment_tol;
  return rep;
}

}  // namespace wp
