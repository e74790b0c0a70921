#pragma once

#include <Eigen/Dense>

#include "wavepart/soliton.hpp"

namespace wp {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Omega(Y1, Y2) = int (psi1 pi2 - pi1 psi2) + q1.p2 - p1.q2
double symplectic_form(const PhaseState& y1, const PhaseState& y2);

/// Field part of Omega only (translation invariant).
double symplectic_form_fields(const FieldPair& a, const FieldPair& b);

struct OmegaMatrix {
  Vec3 v = Vec3::Zero();
  Mat6 entries = Mat6::Zero();  // entries(l, j) = Omega(tau_l, tau_j)
  double det = 0.0;
};

OmegaMatrix omega_matrix(const TangentFrame& frame, double degeneracy_floor = 1e-12);

/// P_v Z = Z - sum_j c_j tau_j with Omega(P_v Z, tau_l) = 0 for all l.
PhaseState project_transversal(const PhaseState& z, const TangentFrame& frame,
                               const OmegaMatrix& omega);

/// Coefficients c of the symplectic decomposition Z = sum c_j tau_j + P_v Z.
Vec6 tangent_coefficients(const PhaseState& z, const TangentFrame& frame,
                          const OmegaMatrix& omega);

struct ProjectionOptions {
  double tol = 1e-10;     // relative to ||Y||
  int max_iters = 50;
  double v_cap = 0.95;
  double fd_step = 1e-5;  // velocity step for frame derivatives in the Jacobian
};

struct ProjectionResult {
  SolitonParams sigma;
  PhaseState transversal;  // Z = Y - S(sigma)
  int newton_iters = 0;
  double residual = 0.0;   // max_j |Omega(Z, tau_j(sigma))|
  double y_norm = 0.0;
};

ProjectionResult project_to_manifold(const PhaseState& y, const ChargeDensity& rho,
                                     const SolitonParams& sigma_guess,
                                     const ProjectionOptions& opt = {});

}  // namespace wp
