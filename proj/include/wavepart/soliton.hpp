#pragma once

#include <vector>

#include "wavepart/charge.hpp"
#include "wavepart/grid.hpp"

namespace wp {

/// Field pair (psi, pi) stored by its spectral coefficients; real-space
/// samples are produced on demand.
struct FieldPair {
  Grid3 grid;
  SpectralData psi_hat;
  SpectralData pi_hat;

  static FieldPair zero(const Grid3& grid);
  RealData psi() const;
  RealData pi() const;

  FieldPair& operator+=(const FieldPair& o);
  FieldPair& operator-=(const FieldPair& o);
  FieldPair& operator*=(double s);
};

/// Y = (psi, pi, q, p); also used for linearized states X = (Psi, Pi, Q, P).
struct PhaseState {
  FieldPair fields;
  Vec3 q = Vec3::Zero();
  Vec3 p = Vec3::Zero();

  static PhaseState zero(const Grid3& grid);
  const Grid3& grid() const { return fields.grid; }

  PhaseState& operator+=(const PhaseState& o);
  PhaseState& operator-=(const PhaseState& o);
  PhaseState& operator*=(double s);
  /// this += s * o
  PhaseState& axpy(double s, const PhaseState& o);
};

PhaseState operator+(PhaseState a, const PhaseState& b);
PhaseState operator-(PhaseState a, const PhaseState& b);
PhaseState operator*(double s, PhaseState a);

using LinState = PhaseState;

struct SolitonParams {
  Vec3 b = Vec3::Zero();
  Vec3 v = Vec3::Zero();

  double gamma() const;
  double nu() const;
  Vec3 p() const;      // p_v = gamma v
  Mat3 B() const;      // nu (I - v v^T)
  Mat3 B_inv() const;  // gamma (I + gamma^2 v v^T)
};

struct TangentFrame {
  Vec3 v = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  std::vector<PhaseState> tau;  // six entries
};

/// psi^_v = -rho^ / D0,  pi^_v = i (kd.v) psi^_v,  D0 = k^2 - (kd.v)^2.
FieldPair soliton_field(const ChargeDensity& rho, const Vec3& v, const Grid3& grid);
FieldPair soliton_field(const ChargeDensity& rho, const Vec3& v);

/// S(sigma) = (psi_v(x - b), pi_v(x - b), b, p_v)
PhaseState soliton_state(const ChargeDensity& rho, const SolitonParams& sigma,
                         const Grid3& grid);
PhaseState soliton_state(const ChargeDensity& rho, const SolitonParams& sigma);

/// tau_j = (-d_j psi_v, -d_j pi_v, e_j, 0),
/// tau_{3+j} = (d_{v_j} psi_v, d_{v_j} pi_v, 0, B_v^{-1} e_j); frame centered at b.
TangentFrame tangent_frame(const ChargeDensity& rho, const Vec3& v, const Grid3& grid);
TangentFrame tangent_frame(const ChargeDensity& rho, const SolitonParams& sigma);

/// Translation T_a: fields shifted by a, q += a.
PhaseState translate(const PhaseState& y, const Vec3& a);
FieldPair translate(const FieldPair& f, const Vec3& a);

/// Spectral gradient component d_j (multiply by -i kd_j).
SpectralData gradient(const Grid3& grid, const SpectralData& f, int j);

/// ||grad psi|| + ||pi||
double f_norm(const FieldPair& f);
/// ||psi|| + ||grad psi|| + ||pi|| + |q| + |p|  (unweighted energy-type size)
double state_norm(const PhaseState& y);

/// Throws unless |v| < 1.
void require_subluminal(const Vec3& v, const char* module);

}  // namespace wp
