// Serial reference kernels. Deliberately naive: one accumulator, direct
// formulas, and for the forced flow a 4x4 matrix exponential per mode
// (Van Loan augmentation) instead of the closed-form rotation.

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>

#include "wavepart/kernels.hpp"

namespace wp::kernels::ref {

Vec3 forced_flow(const Grid3& grid, std::span<cplx> psi, std::span<cplx> pi,
                 const ForcedSource& src, const Vec3& drift, double tau) {
  const int n = grid.n();
  const bool forced = !src.rho_hat.empty();
  const cplx I(0.0, 1.0);
  Vec3 kick = Vec3::Zero();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const std::size_t idx = grid.index(i, j, l);
        const Vec3 kd = grid.kd(i, j, l);
        const double k2 = grid.k2(i, j, l);
        const double a = kd.dot(drift);
        cplx c = 0.0, g = 0.0;
        if (forced) {
          c = src.rho_hat[idx] * std::exp(I * kd.dot(src.shift));
          g = (src.scale - I * kd.dot(src.direction)) * c;
        }
        // state (psi, pi, int psi, 1)
        Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
        m(0, 0) = -I * a;
        m(0, 1) = 1.0;
        m(1, 0) = -k2;
        m(1, 1) = -I * a;
        m(1, 3) = g;
        m(2, 0) = 1.0;
        const Eigen::Matrix4cd e = (m * tau).exp();
        const Eigen::Vector4cd y0(psi[idx], pi[idx], 0.0, 1.0);
        const Eigen::Vector4cd y1 = e * y0;
        psi[idx] = y1(0);
        pi[idx] = y1(1);
        if (forced) kick += (y1(2) * I * std::conj(c)).real() * kd;
      }
  return kick * grid.mode_volume();
}

double inner(const Grid3& grid, std::span<const cplx> a, std::span<const cplx> b) {
  double s = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) s += (a[m] * std::conj(b[m])).real();
  return s * grid.mode_volume();
}

double weighted_sq(const Grid3& grid, std::span<const double> f, const Vec3& center,
                   double alpha) {
  const int n = grid.n();
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const double w = std::pow(1.0 + (grid.x(i, j, l) - center).norm(), alpha);
        const double v = f[grid.index(i, j, l)];
        s += w * w * v * v;
      }
  return s * grid.cell_volume();
}

void shift_phase(const Grid3& grid, std::span<cplx> data, const Vec3& b) {
  const int n = grid.n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l)
        data[grid.index(i, j, l)] *= std::exp(cplx(0.0, grid.kd(i, j, l).dot(b)));
}

std::vector<double> moments(const Grid3& grid, std::span<const double> f, int max_order) {
  const int n = grid.n();
  const auto idx = multi_indices(max_order);
  std::vector<double> out;
  for (const auto& a : idx) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          const Vec3 x = grid.x(i, j, l);
          s += std::pow(x[0], a[0]) * std::pow(x[1], a[1]) * std::pow(x[2], a[2]) *
               f[grid.index(i, j, l)];
        }
    out.push_back(s * grid.cell_volume());
  }
  return out;
}

std::vector<cplx> dtft(const Grid3& grid, std::span<const double> f,
                       std::span<const Vec3> ks) {
  const int n = grid.n();
  const double scale = grid.cell_volume() * std::pow(2.0 * std::numbers::pi, -1.5);
  std::vector<cplx> out;
  for (const auto& k : ks) {
    cplx s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
          s += std::exp(cplx(0.0, k.dot(grid.x(i, j, l)))) * f[grid.index(i, j, l)];
    out.push_back(s * scale);
  }
  return out;
}

}  // namespace wp::kernels::ref
