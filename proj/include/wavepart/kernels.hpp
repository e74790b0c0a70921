#pragma once

// Per-mode and per-point loops shared by every module.
//
// Two implementations with identical signatures:
//   wp::kernels::omp  OpenMP, reductions blocked per x-plane and summed in a
//                     fixed order, so results do not depend on thread count;
//   wp::kernels::ref  plain serial loops, kept as the testing reference.
// The library calls the omp variants; tests compare the two.

#include <array>
#include <span>
#include <vector>

#include "wavepart/grid.hpp"

namespace wp::kernels {

/// Source specification for the frozen-position forced wave flow
///
///   psi' = -i(kd.drift) psi + pi
///   pi'  = -k^2 psi - i(kd.drift) pi + g_k,   g_k = s_k c_k,
///
/// with c_k = rho^_k e^{i kd.shift} and s_k = scale - i (kd.direction).
/// The nonlinear field step uses scale = -1, direction = 0; the linearized
/// step uses scale = 0, direction = Q, shift = 0.
struct ForcedSource {
  std::span<const cplx> rho_hat;  // empty: free flow
  Vec3 shift = Vec3::Zero();
  double scale = 0.0;
  Vec3 direction = Vec3::Zero();
};

int max_threads();
void set_threads(int n);

// Fixed-partition reduction: one partial per x-plane, summed serially.
template <typename T, typename F>
T reduce_planes(const Grid3& grid, T zero, F&& per_plane) {
  const int n = grid.n();
  std::vector<T> partial(n, zero);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) partial[i] = per_plane(i);
  T total = zero;
  for (int i = 0; i < n; ++i) total += partial[i];
  return total;
}

/// Per-axis phase tables e^{i kd_m s_a}, so e^{i kd.s} is a product of three.
std::array<std::vector<cplx>, 3> phase_tables(const Grid3& grid, const Vec3& shift);

namespace omp {

/// Advance (psi, pi) by tau under the forced flow; returns the time-integrated
/// coupling  Re sum_k (int_0^tau psi^ dt) (i kd) conj(c_k) dk^3,
/// i.e. <int psi dt, grad rho(. - shift)>.
Vec3 forced_flow(const Grid3& grid, std::span<cplx> psi, std::span<cplx> pi,
                 const ForcedSource& src, const Vec3& drift, double tau);

/// Re sum a conj(b) dk^3  (= int f g dx for real fields).
double inner(const Grid3& grid, std::span<const cplx> a, std::span<const cplx> b);

/// sum (1 + |x - c|)^{2 alpha} f(x)^2 h^3
double weighted_sq(const Grid3& grid, std::span<const double> f, const Vec3& center,
                   double alpha);

/// data *= e^{i kd.b}  (translation by b in x-space)
void shift_phase(const Grid3& grid, std::span<cplx> data, const Vec3& b);

/// Grid moments  sum h^3 x^a y^b z^c f  for all a+b+c <= max_order, ordered
/// by total degree then lexicographically descending (x^2 before xy ...).
std::vector<double> moments(const Grid3& grid, std::span<const double> f, int max_order);

/// Off-grid transform  h^3 (2pi)^{-3/2} sum_x e^{i k.x} f(x)  at each k.
std::vector<cplx> dtft(const Grid3& grid, std::span<const double> f,
                       std::span<const Vec3> ks);

}  // namespace omp

namespace ref {

Vec3 forced_flow(const Grid3& grid, std::span<cplx> psi, std::span<cplx> pi,
                 const ForcedSource& src, const Vec3& drift, double tau);
double inner(const Grid3& grid, std::span<const cplx> a, std::span<const cplx> b);
double weighted_sq(const Grid3& grid, std::span<const double> f, const Vec3& center,
                   double alpha);
void shift_phase(const Grid3& grid, std::span<cplx> data, const Vec3& b);
std::vector<double> moments(const Grid3& grid, std::span<const double> f, int max_order);
std::vector<cplx> dtft(const Grid3& grid, std::span<const double> f,
                       std::span<const Vec3> ks);

}  // namespace ref

/// Multi-indices (a,b,c) with a+b+c <= max_order, in the order used by moments().
std::vector<std::array<int, 3>> multi_indices(int max_order);

}  // namespace wp::kernels
