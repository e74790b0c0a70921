#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "wavepart/dynamics.hpp"
#include "wavepart/symplectic.hpp"

namespace wp {

/// ||psi||_a + ||grad psi||_a + ||pi||_{a+1} with ||f||_a = ||(1 + |x - center|)^a f||.
double weighted_norm(const FieldPair& f, double alpha, const Vec3& center = Vec3::Zero());
/// Field part plus |q| + |p|.
double weighted_norm(const PhaseState& y, double alpha, const Vec3& center = Vec3::Zero());

struct ModulationOptions {
  double delta = 0.25;  // beta = 4 + delta
  ProjectionOptions projection;
};

struct ModulationTrack {
  double beta = 4.25;
  std::vector<double> times;
  std::vector<SolitonParams> sigma;
  std::vector<Vec3> c;           // b(t) - int_0^t v
  std::vector<double> Z_norms;   // ||Z(t)||_{-beta}, weights centered at b(t)
  std::vector<double> residuals; // projection residual / ||Y||
  std::vector<int> newton_iters;
  std::vector<Vec3> cdot, vdot;  // centered differences (filled by finish)
  std::vector<double> T_norms;   // ||T(t)||_beta (filled by finish)
  std::optional<std::size_t> failure_index;
  std::string failure;

  // Gram matrices of the frame under the beta weights: psi, grad psi, pi parts
  std::vector<std::array<Mat6, 3>> gram;
  std::vector<Mat3> b_inv;  // B_{v(t)}^{-1}, for the p part of T
};

/// Streaming projection of snapshots onto the solitary manifold.
class ModulationTracker {
 public:
  ModulationTracker(std::shared_ptr<const ChargeDensity> rho, const SolitonParams& guess,
                    ModulationOptions opt = {});
  /// Project one snapshot; returns false once the basin was lost.
  bool observe(double t, const PhaseState& y);
  /// Differences, c(t) and T norms; call once after the last snapshot.
  ModulationTrack finish();
  const ModulationTrack& track() const { return track_; }

 private:
  std::shared_ptr<const ChargeDensity> rho_;
  SolitonParams sigma_;
  ModulationOptions opt_;
  ModulationTrack track_;
};

ModulationTrack extract_modulation(const Trajectory& traj, std::shared_ptr<const ChargeDensity> rho,
                                   const SolitonParams& guess, ModulationOptions opt = {});

struct DecayFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double t0 = 0.0, t1 = 0.0;
  double residual = 0.0;  // rms of the log-log fit
  int samples = 0;
};

/// Least-squares slope of log(value) against log(t) for t in [t0, t1].
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& value, double t0,
                   double t1);

struct MajorantDrift {
  std::vector<double> m;   // sup_{s<=t} (1+s)^{1+delta} ||Z(s)||
  std::vector<double> t_d1;
  std::vector<Vec3> d1;    // int_{t1}^{t} (w(s) - v(t1)) ds for t <= t1
  double ratio = 0.0;      // max |d1| / m(t1)^2
};

MajorantDrift majorant_and_drift(const ModulationTrack& track, double delta, double t1);

struct ScatteringReport {
  FieldPair psi_plus;           // W0(-t) Z(t) at the last snapshot
  std::vector<double> times;    // snapshot times
  std::vector<double> z_norms;  // ||Z(t)||_F
  std::vector<double> cauchy;   // ||Psi(t_{i+1}) - Psi(t_i)||_F, i >= 1
  Vec3 v_plus = Vec3::Zero();
  Vec3 a_plus = Vec3::Zero();
  bool settled = true;          // qdot variation in the last quarter <= 10%
  double qdot_variation = 0.0;
  std::string note;
};

/// Streaming W0(-t) applied to the field minus the accompanying soliton.
class ScatteringTracker {
 public:
  explicit ScatteringTracker(std::shared_ptr<const ChargeDensity> rho);
  void observe(double t, const PhaseState& y);
  /// v_plus / a_plus from the particle record (mean of qdot over the last quarter).
  ScatteringReport finish(const std::vector<ParticleSample>& particle);

 private:
  std::shared_ptr<const ChargeDensity> rho_;
  ScatteringReport rep_;
  bool have_prev_ = false;
};

ScatteringReport scattering_state(const Trajectory& traj, std::shared_ptr<const ChargeDensity> rho);

/// |qdot(t) - v_plus| series from the particle record.
std::vector<double> qdot_deviation(const std::vector<ParticleSample>& particle, const Vec3& v_plus);

}  // namespace wp
