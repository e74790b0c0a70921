#pragma once

#include <Eigen/Dense>
#include <vector>

#include "wavepart/charge.hpp"

namespace wp {

using Mat3c = Eigen::Matrix3cd;
using Vec3c = Eigen::Vector3cd;
using Mat6c = Eigen::Matrix<cplx, 6, 6>;

/// Quadrature controls for the Laplace-domain integrals. All integrals are
/// taken over R^3 in spherical coordinates around v with the closed-form rho^.
struct SpectralOptions {
  int c_panels = 4;           // 20-point panels in cos(theta)
  double k_panel = 0.25;      // panel width in |k| (units of 1/base_width)
  double k_cut = 12.0;        // |k| cutoff in units of 1/base_width
  int phi_points = 32;        // trapezoid points in the azimuth
  double refine = 1.5;        // node factor of the refined evaluation
  double conv_tol = 1e-3;     // max relative change between the two evaluations
  double diag_tol = 1e-10;    // off-diagonal / diagonal
};

/// Laplace-domain objects at one frequency. Coordinates are rotated so that
/// v = (|v|, 0, 0); `rotation` maps rotated coordinates to the caller's.
struct SpectralEval {
  Vec3 v = Vec3::Zero();
  double speed = 0.0;
  Mat3 rotation = Mat3::Identity();
  cplx lambda = 0.0;
  double omega = 0.0;       // on-axis evaluations: lambda = i omega + 0
  bool on_axis = false;

  Mat3 K = Mat3::Zero();
  Mat3c H = Mat3c::Zero();
  Mat3c F = Mat3c::Zero();
  Mat6c M = Mat6c::Zero();  // ((lambda I, -B), (-F, lambda I))
  cplx detM = 0.0;          // determinant of the assembled M
  cplx detM_closed = 0.0;   // (lambda^2 + nu^3 f1)(lambda^2 + nu f)^2 form
  Vec3 imH_surface = Vec3::Zero();  // on-axis: Im H_jj by surface quadrature
  double offdiag_rel = 0.0;
  double refine_change = 0.0;

  // inverse blocks (inverse_blocks)
  Vec3 b = Vec3::Zero();    // diag B_v = (nu^3, nu, nu)
  Vec3c r = Vec3c::Zero();  // r_j(omega) = -F_jj(i omega) / omega^2
  Vec3 r0 = Vec3::Zero();   // r_j(0)
  Mat3c L11 = Mat3c::Zero(), L12 = Mat3c::Zero(), L21 = Mat3c::Zero(), L22 = Mat3c::Zero();
  Mat6c Linv = Mat6c::Zero();  // L(omega) = M(i omega)^{-1}

  cplx f1() const { return F(0, 0); }
  cplx f() const { return F(1, 1); }
};

struct GreenParams {
  cplx kappa;   // gamma lambda
  cplx kappa1;  // gamma |v| lambda
};

GreenParams green_params(cplx lambda, const Vec3& v);

/// Fundamental solution of -Lap + (-v.grad + lambda)^2:
///   g = gamma exp(-kappa |y~| - kappa1 y~_1) / (4 pi |y~|),  y~ = (gamma y_1, y_2, y_3)
/// with y_1 the component along v.
cplx g_lambda(cplx lambda, const Vec3& y, const Vec3& v);

/// Orthonormal matrix whose first column is v/|v| (identity for v = 0).
Mat3 velocity_frame(const Vec3& v);

/// K, H(lambda), F = H - K and M(lambda) for Re lambda > 0.
SpectralEval kh_matrices(const ChargeDensity& rho, const Vec3& v, cplx lambda,
                         const SpectralOptions& opt = {});

/// Boundary values at lambda = i omega + 0 (Sokhotsky-Plemelj).
SpectralEval on_axis(const ChargeDensity& rho, const Vec3& v, double omega,
                     const SpectralOptions& opt = {});

/// r_j(0) = -int k_j^2 |rho^|^2 (k^2 + 3 (v k_1)^2) / (k^2 - (v k_1)^2)^3 dk
Vec3 r_at_zero(const ChargeDensity& rho, const Vec3& v, const SpectralOptions& opt = {});

/// Fill the blocks of M(i omega)^{-1}; omega = 0 uses se.r0.
SpectralEval inverse_blocks(SpectralEval se, double omega);

/// H_jj(lambda) = <g_lambda * d_j rho, d_j rho> by real-space quadrature
/// (rotated coordinates, as in SpectralEval).
Vec3c h_convolution(const ChargeDensity& rho, const Vec3& v, cplx lambda, int r_panels = 48,
                    int c_panels = 4);

struct PhiEval {
  std::vector<cplx> lambdas;
  std::vector<Vec3c> phi_at;
  Vec3 phi0 = Vec3::Zero();
  Vec3 phi_prime0 = Vec3::Zero();
  double imag_residual = 0.0;  // largest |Im| dropped from phi0 / phi_prime0
};

/// Phi(lambda) = i <((i k.v + lambda) Psi0^ + Pi0^) / D^(lambda), k rho^> on the grid
/// of rho, together with Phi(0) and Phi'(0). Lab coordinates.
PhiEval phi_eval(const ChargeDensity& rho, const Vec3& v, const SpectralData& psi0_hat,
                 const SpectralData& pi0_hat, const std::vector<cplx>& lambdas = {});

/// Time-domain route: int_0^T e^{-lambda t} <W^1(t)(Psi0, Pi0), grad rho> dt with the
/// grid wave group; T is the first time periodic images can reach the support.
Vec3c phi_time_domain(const ChargeDensity& rho, const Vec3& v, const SpectralData& psi0_hat,
                      const SpectralData& pi0_hat, cplx lambda, int t_panels = 24);

}  // namespace wp
