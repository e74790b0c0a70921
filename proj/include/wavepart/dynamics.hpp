#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "wavepart/soliton.hpp"

namespace wp {

/// H(Y) = 1/2 int (pi^2 + |grad psi|^2) + int psi rho(. - q) + sqrt(1 + p^2)
double hamiltonian(const PhaseState& y, const ChargeDensity& rho);

/// 1/2 <rho, Lap^{-1} rho> = -1/2 sum_{k != 0} |rho^|^2 / k^2 dk^3
double coulomb_self_energy(const ChargeDensity& rho);

enum class Scheme { Strang, Yoshida4 };

/// Lab: field step with the particle frozen at q.
/// Comoving: sqrt(1+p^2) split as [sqrt(1+p^2) - u.p] + u.p with a fixed
/// reference velocity u; the field step is solved exactly in the frame moving
/// with u, so a soliton travelling at u is an exact fixed point.
enum class Frame { Lab, Comoving };

/// How the wrap-around horizon is computed.
///  Boundary: t + max|q - q0| < L/2 - R_rho (front of the coupling region
///            reaches the cell boundary);
///  Return:   t + |q(t) - q0| < L - R_rho - r_src (radiation emitted by the
///            periodic image can reach the particle's coupling region).
enum class HorizonRule { Boundary, Return };

struct SimConfig {
  std::shared_ptr<const ChargeDensity> rho;
  PhaseState initial;
  double dt = 0.0;           // 0: 0.25 h
  double t_end = 0.0;
  int record_every = 1;      // steps between snapshots / energy samples
  bool keep_states = false;  // store snapshots in the trajectory
  double v_cap = 0.95;
  double drift_tol = 1e-6;
  bool check_drift = true;
  bool enforce_horizon = true;
  HorizonRule horizon_rule = HorizonRule::Return;
  double source_radius = 0.0;  // radius of the initial disturbance around q0; 0: R_rho
  Scheme scheme = Scheme::Yoshida4;
  Frame frame = Frame::Lab;
  std::optional<Vec3> reference_velocity;  // Comoving only; default qdot(0)
};

struct ParticleSample {
  double t = 0.0;
  Vec3 q = Vec3::Zero();
  Vec3 p = Vec3::Zero();
  Vec3 qdot = Vec3::Zero();
};

struct Trajectory {
  std::vector<double> times;          // snapshot times
  std::vector<PhaseState> states;     // only when keep_states
  std::vector<double> energies;       // H at snapshot times
  std::vector<ParticleSample> particle;  // every step
  double horizon = 0.0;
  double max_rel_drift = 0.0;
};

using SnapshotObserver = std::function<void(double t, const PhaseState& y)>;

/// One symmetric splitting step (dt may be negative).
/// `comoving`: reference velocity u of the comoving splitting (Lab when empty).
void nonlinear_step(PhaseState& y, const ChargeDensity& rho, double dt,
                    Scheme scheme = Scheme::Yoshida4, const std::optional<Vec3>& comoving = {});

Trajectory run_nonlinear(const SimConfig& cfg, const SnapshotObserver& observer = {});

/// Frozen linearized operator A_{v,v} in the comoving frame.
struct LinearizedSystem {
  std::shared_ptr<const ChargeDensity> rho;
  Vec3 v = Vec3::Zero();
  Mat3 B = Mat3::Identity();
  Mat3 M = Mat3::Zero();  // <grad psi_v, Q.grad rho> = M Q  (M = -K)

  LinearizedSystem(std::shared_ptr<const ChargeDensity> rho, const Vec3& v);
  void step(LinState& x, double dt, Scheme scheme = Scheme::Yoshida4) const;
  /// A_{v,v} X
  LinState apply(const LinState& x) const;
  /// 1/2 int(Pi^2 + |grad Psi|^2) + int Pi v.grad Psi - int Psi Q.grad rho - 1/2 Q.MQ + 1/2 P.BP
  double energy(const LinState& x) const;
  /// 1/2 int(|Pi + v.grad Psi|^2 + |L^{1/2} Psi - L^{-1/2} Q.grad rho|^2) + 1/2 P.BP
  double energy_positive_form(const LinState& x) const;
};

Trajectory run_linearized(const LinState& x0, const Vec3& v1, const SimConfig& cfg,
                          const SnapshotObserver& observer = {});

/// W(t) for psi' = v.grad psi + pi, pi' = Lap psi + v.grad pi (v = 0: W0).
/// support_radius < 0: estimated from the samples of f0. enforce: throw a
/// wrap error past L/2 - support_radius.
FieldPair wave_group(const FieldPair& f0, double t, const Vec3& v, double support_radius = -1.0,
                     bool enforce = true);

/// Radius beyond which both components are below rel * their peak.
double support_radius(const FieldPair& f, double rel = 1e-10);

/// Static horizon for a run from the given configuration (Boundary rule uses
/// the velocity cap for max|q - q0|).
double wrap_horizon(const SimConfig& cfg);

}  // namespace wp
