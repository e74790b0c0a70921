#include <omp.h>

#include <cmath>
#include <numbers>

#include "mode_step.hpp"
#include "wavepart/kernels.hpp"

namespace wp::kernels {

int max_threads() { return omp_get_max_threads(); }
void set_threads(int n) { omp_set_num_threads(n > 0 ? n : 1); }

std::array<std::vector<cplx>, 3> phase_tables(const Grid3& grid, const Vec3& shift) {
  std::array<std::vector<cplx>, 3> t;
  const auto kd = grid.kd_axis();
  for (int a = 0; a < 3; ++a) {
    t[a].resize(grid.n());
    for (int m = 0; m < grid.n(); ++m) t[a][m] = std::polar(1.0, kd[m] * shift[a]);
  }
  return t;
}

std::vector<std::array<int, 3>> multi_indices(int max_order) {
  std::vector<std::array<int, 3>> out;
  for (int d = 0; d <= max_order; ++d)
    for (int a = d; a >= 0; --a)
      for (int b = d - a; b >= 0; --b) out.push_back({a, b, d - a - b});
  return out;
}

namespace omp {

Vec3 forced_flow(const Grid3& grid, std::span<cplx> psi, std::span<cplx> pi,
                 const ForcedSource& src, const Vec3& drift, double tau) {
  const int n = grid.n();
  const auto k = grid.k_axis();
  const auto kd = grid.kd_axis();
  const bool forced = !src.rho_hat.empty();
  const auto ph = phase_tables(grid, src.shift);

  const Vec3 kick = reduce_planes(grid, Vec3(Vec3::Zero()), [&](int i) {
    Vec3 acc = Vec3::Zero();
    for (int j = 0; j < n; ++j) {
      const cplx pij = ph[0][i] * ph[1][j];
      for (int l = 0; l < n; ++l) {
        const std::size_t idx = grid.index(i, j, l);
        const double k2 = k[i] * k[i] + k[j] * k[j] + k[l] * k[l];
        const double a = kd[i] * drift[0] + kd[j] * drift[1] + kd[l] * drift[2];
        cplx c = 0.0, g = 0.0;
        if (forced) {
          c = src.rho_hat[idx] * pij * ph[2][l];
          const double kq = kd[i] * src.direction[0] + kd[j] * src.direction[1] +
                            kd[l] * src.direction[2];
          g = cplx(src.scale, -kq) * c;
        }
        const auto r = detail::mode_step(k2, a, psi[idx], pi[idx], g, tau);
        psi[idx] = r.psi;
        pi[idx] = r.pi;
        if (forced) {
          // Re[I * i kd * conj(c)] = -kd * Im[I conj(c)]
          const double w = -(r.psi_integral * std::conj(c)).imag();
          acc[0] += kd[i] * w;
          acc[1] += kd[j] * w;
          acc[2] += kd[l] * w;
        }
      }
    }
    return acc;
  });
  return kick * grid.mode_volume();
}

double inner(const Grid3& grid, std::span<const cplx> a, std::span<const cplx> b) {
  const std::size_t plane = static_cast<std::size_t>(grid.n()) * grid.n();
  const double s = reduce_planes(grid, 0.0, [&](int i) {
    double acc = 0.0;
    const std::size_t base = i * plane;
    for (std::size_t m = base; m < base + plane; ++m)
      acc += a[m].real() * b[m].real() + a[m].imag() * b[m].imag();
    return acc;
  });
  return s * grid.mode_volume();
}

double weighted_sq(const Grid3& grid, std::span<const double> f, const Vec3& center,
                   double alpha) {
  const int n = grid.n();
  const auto x = grid.x_axis();
  const double s = reduce_planes(grid, 0.0, [&](int i) {
    double acc = 0.0;
    const double dx = x[i] - center[0];
    for (int j = 0; j < n; ++j) {
      const double dy = x[j] - center[1];
      for (int l = 0; l < n; ++l) {
        const double dz = x[l] - center[2];
        const double v = f[grid.index(i, j, l)];
        const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
        acc += std::pow(1.0 + r, 2.0 * alpha) * v * v;
      }
    }
    return acc;
  });
  return s * grid.cell_volume();
}

void shift_phase(const Grid3& grid, std::span<cplx> data, const Vec3& b) {
  const int n = grid.n();
  const auto ph = phase_tables(grid, b);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const cplx pij = ph[0][i] * ph[1][j];
      for (int l = 0; l < n; ++l) data[grid.index(i, j, l)] *= pij * ph[2][l];
    }
}

std::vector<double> moments(const Grid3& grid, std::span<const double> f, int max_order) {
  const int n = grid.n();
  const auto x = grid.x_axis();
  const auto idx = multi_indices(max_order);
  const std::size_t m = idx.size();
  std::vector<std::vector<double>> partial(n, std::vector<double>(m, 0.0));
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    std::vector<double> px(max_order + 1), py(max_order + 1), pz(max_order + 1);
    auto& acc = partial[i];
    for (int a = 0; a <= max_order; ++a) px[a] = std::pow(x[i], a);
    for (int j = 0; j < n; ++j) {
      for (int a = 0; a <= max_order; ++a) py[a] = std::pow(x[j], a);
      for (int l = 0; l < n; ++l) {
        const double v = f[grid.index(i, j, l)];
        if (v == 0.0) continue;
        for (int a = 0; a <= max_order; ++a) pz[a] = std::pow(x[l], a);
        for (std::size_t t = 0; t < m; ++t)
          acc[t] += px[idx[t][0]] * py[idx[t][1]] * pz[idx[t][2]] * v;
      }
    }
  }
  std::vector<double> out(m, 0.0);
  for (int i = 0; i < n; ++i)
    for (std::size_t t = 0; t < m; ++t) out[t] += partial[i][t];
  for (auto& v : out) v *= grid.cell_volume();
  return out;
}

std::vector<cplx> dtft(const Grid3& grid, std::span<const double> f,
                       std::span<const Vec3> ks) {
  const int n = grid.n();
  const auto x = grid.x_axis();
  const double scale = grid.cell_volume() * std::pow(2.0 * std::numbers::pi, -1.5);
  std::vector<cplx> out(ks.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t p = 0; p < ks.size(); ++p) {
    std::vector<cplx> ex(n), ey(n), ez(n);
    for (int m = 0; m < n; ++m) {
      ex[m] = std::polar(1.0, ks[p][0] * x[m]);
      ey[m] = std::polar(1.0, ks[p][1] * x[m]);
      ez[m] = std::polar(1.0, ks[p][2] * x[m]);
    }
    cplx total = 0.0;
    for (int i = 0; i < n; ++i) {
      cplx si = 0.0;
      for (int j = 0; j < n; ++j) {
        cplx sj = 0.0;
        const double* row = f.data() + grid.index(i, j, 0);
        for (int l = 0; l < n; ++l) sj += ez[l] * row[l];
        si += ey[j] * sj;
      }
      total += ex[i] * si;
    }
    out[p] = total * scale;
  }
  return out;
}

}  // namespace omp
}  // namespace wp::kernels
