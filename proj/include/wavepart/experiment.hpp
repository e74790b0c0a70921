#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wavepart/diagnostics.hpp"
#include "wavepart/io.hpp"
#include "wavepart/spectral.hpp"

namespace wp {

enum class InitialRecipe { Soliton, PerturbedSoliton, CustomFile };

/// One reproducible experiment. Every field maps to a config key
/// (section.key) listed next to it; `to_json` writes them back out.
struct ExperimentPreset {
  std::string name = "custom";
  // [grid]
  int n = 64;                    // n
  double box = 64.0 / 3.0;       // box
  // [charge]
  double base_width = 1.0;       // base_width
  double amplitude = 0.01;       // amplitude
  // [soliton]
  Vec3 b0 = Vec3::Zero();        // b
  Vec3 v0 = Vec3(0.3, 0, 0);     // v
  // [initial]
  InitialRecipe initial = InitialRecipe::Soliton;  // recipe = soliton | perturbed | file
  double d_beta = 0.0;           // perturbation size ||Z0||_beta (0: none)
  double pert_width = 1.0;       // width
  int pert_components = 3;       // components
  std::string custom_file;       // file: "field.bin" written by `simulate`
  // [run]
  double dt = 0.0;               // 0: h / 4
  double t_end = 0.0;            // 0: 0.999 * wrap horizon
  int record_every = 6;
  Scheme scheme = Scheme::Yoshida4;
  Frame frame = Frame::Comoving;
  bool enforce_horizon = true;
  double drift_tol = 1e-6;
  double v_cap = 0.95;
  bool slices = true;            // snapshots/ field slices
  // [analysis]
  bool analyze = true;
  double delta = 0.25;
  // [spectrum]
  bool spectrum = false;
  Vec3 spectrum_v = Vec3(0.3, 0, 0);
  std::vector<double> omegas;
  std::vector<double> lambdas;

  std::uint64_t seed = 0;

  static ExperimentPreset named(const std::string& name);
  static std::vector<std::string> names();
  /// Overlay config keys; unknown keys are an argument error.
  void apply(const io::Config& cfg);
  /// Throws wp::Error{Argument} on the first invalid parameter.
  void validate() const;
  io::json to_json() const;
  /// Inverse of to_json (used to replay a run from its meta.json).
  static ExperimentPreset from_json(const io::json& j);
};

/// Seeded smooth zero-mean perturbation (odd dipoles in psi, Laplacian-of-
/// Gaussian bumps in pi) around `center`, scaled to ||.||_beta = size.
FieldPair make_perturbation(const Grid3& grid, const Vec3& center, double width, int components,
                            double size, double beta, std::uint64_t seed);

struct RunReport {
  int exit_code = 0;
  std::string message;
};

/// charge -> soliton -> simulate -> analyze, artifacts in out_dir. On error a
/// FAILED file with "module: kind error: message" is written next to the partial
/// outputs and exit_code is 1.
RunReport run_preset(const ExperimentPreset& preset, const std::filesystem::path& out_dir);

/// Pieces shared with the command line tool.
io::json check_rho_report(const ChargeDensity& rho);
void write_spectrum(const ChargeDensity& rho, const Vec3& v, const std::vector<double>& omegas,
                    const std::filesystem::path& csv);
void write_kh(const ChargeDensity& rho, const Vec3& v, const std::vector<double>& lambdas,
              const std::filesystem::path& csv);

/// Summary of a perturbed run used by `analyze` and the acceptance check.
struct AnalysisSummary {
  ModulationTrack track;
  ScatteringReport scattering;
  double horizon = 0.0;
  double cv_ratio = 0.0;     // max (|cdot| + |vdot|) / ||Z||^2
  double t_ratio = 0.0;      // max ||T||_beta / ||Z||^2
  double drift_ratio = 0.0;  // max |d1| / m(t1)^2
  DecayFit z_fit;
  DecayFit qdot_fit;
  bool z_fit_ok = false, qdot_fit_ok = false;
  std::string z_fit_error, qdot_fit_error;
  bool cauchy_monotone = false;  // within 10% noise
};

AnalysisSummary summarize(ModulationTrack track, ScatteringReport sc,
                          const std::vector<ParticleSample>& particle, double horizon,
                          double delta);
io::json summary_json(const AnalysisSummary& s);
void write_modulation_csv(const ModulationTrack& track, const std::filesystem::path& csv);
io::json scattering_json(const ScatteringReport& sc);

}  // namespace wp
