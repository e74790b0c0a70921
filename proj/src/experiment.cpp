#include "wavepart/experiment.hpp"

#include <fftw3.h>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <cmath>
#include <random>
#include <sstream>

#include "wavepart/error.hpp"
#include "wavepart/transform.hpp"

namespace wp {

namespace fs = std::filesystem;
using io::json;

namespace {

const char* kVersion = "wavepart 1.0.0";

std::string recipe_name(InitialRecipe r) {
  switch (r) {
    case InitialRecipe::Soliton: return "soliton";
    case InitialRecipe::PerturbedSoliton: return "perturbed";
    case InitialRecipe::CustomFile: return "file";
  }
  return "?";
}

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorKind::Argument, "cli", what);
}

}  // namespace

// ---------------------------------------------------------------- presets

std::vector<std::string> ExperimentPreset::names() {
  return {"soliton-persistence", "perturbed-soliton", "spectrum-scan"};
}

ExperimentPreset ExperimentPreset::named(const std::string& name) {
  ExperimentPreset p;
  p.name = name;
  // Both simulation presets share one setup so that a zero perturbation
  // reproduces the pure soliton run bit for bit.
  p.n = 96;
  p.box = 32.0;
  p.v0 = Vec3(0.1, 0, 0);
  p.record_every = 6;
  p.frame = Frame::Comoving;
  if (name == "soliton-persistence") {
    p.initial = InitialRecipe::Soliton;
  } else if (name == "perturbed-soliton") {
    p.initial = InitialRecipe::PerturbedSoliton;
    p.d_beta = 1e-2;
  } else if (name == "spectrum-scan") {
    p.n = 64;
    p.box = 64.0 / 3.0;
    p.spectrum = true;
    p.analyze = false;
    p.spectrum_v = Vec3(0.3, 0, 0);
    p.omegas = {-3.0, -1.0, -0.5, 0.5, 1.0, 3.0, 20.0, 40.0};
    p.lambdas = {0.5, 1.0, 2.0};
  } else {
    std::string known;
    for (const auto& n : names()) known += " " + n;
    invalid("unknown preset '" + name + "' (known:" + known + ")");
  }
  return p;
}

void ExperimentPreset::apply(const io::Config& cfg) {
  n = cfg.get_int("grid.n", n);
  box = cfg.get_double("grid.box", box);
  base_width = cfg.get_double("charge.base_width", base_width);
  amplitude = cfg.get_double("charge.amplitude", amplitude);
  b0 = cfg.get_vec3("soliton.b", b0);
  v0 = cfg.get_vec3("soliton.v", v0);

  const std::string recipe = cfg.get("initial.recipe", recipe_name(initial));
  if (recipe == "soliton") initial = InitialRecipe::Soliton;
  else if (recipe == "perturbed") initial = InitialRecipe::PerturbedSoliton;
  else if (recipe == "file") initial = InitialRecipe::CustomFile;
  else invalid("initial.recipe must be soliton, perturbed or file");
  d_beta = cfg.get_double("initial.amplitude", d_beta);
  pert_width = cfg.get_double("initial.width", pert_width);
  pert_components = cfg.get_int("initial.components", pert_components);
  custom_file = cfg.get("initial.file", custom_file);

  dt = cfg.get_double("run.dt", dt);
  t_end = cfg.get_double("run.t_end", t_end);
  record_every = cfg.get_int("run.record_every", record_every);
  const std::string sch = cfg.get("run.scheme", scheme == Scheme::Strang ? "strang" : "yoshida4");
  if (sch == "strang") scheme = Scheme::Strang;
  else if (sch == "yoshida4") scheme = Scheme::Yoshida4;
  else invalid("run.scheme must be strang or yoshida4");
  const std::string fr = cfg.get("run.frame", frame == Frame::Lab ? "lab" : "comoving");
  if (fr == "lab") frame = Frame::Lab;
  else if (fr == "comoving") frame = Frame::Comoving;
  else invalid("run.frame must be lab or comoving");
  enforce_horizon = cfg.get_bool("run.enforce_horizon", enforce_horizon);
  drift_tol = cfg.get_double("run.drift_tol", drift_tol);
  v_cap = cfg.get_double("run.v_cap", v_cap);
  slices = cfg.get_bool("run.slices", slices);

  analyze = cfg.get_bool("analysis.enabled", analyze);
  delta = cfg.get_double("analysis.delta", delta);

  spectrum = cfg.get_bool("spectrum.enabled", spectrum);
  spectrum_v = cfg.get_vec3("spectrum.v", spectrum_v);
  omegas = cfg.get_list("spectrum.omegas", omegas);
  lambdas = cfg.get_list("spectrum.lambdas", lambdas);
  seed = static_cast<std::uint64_t>(cfg.get_double("seed", static_cast<double>(seed)));

  const auto extra = cfg.unused();
  if (!extra.empty()) {
    std::string keys;
    for (const auto& k : extra) keys += " " + k;
    invalid("unknown config keys:" + keys);
  }
}

void ExperimentPreset::validate() const {
  if (n < 16 || n % 2) invalid("grid.n must be even and >= 16");
  if (!(box > 0.0)) invalid("grid.box must be positive");
  if (!(base_width > 0.0) || !(base_width < box / 8.0)) invalid("charge.base_width outside (0, box/8)");
  if (!(box / n <= base_width / 3.0 + 1e-12)) invalid("grid too coarse: need box/n <= base_width/3");
  if (!(v0.norm() < 1.0)) invalid("soliton.v must satisfy |v| < 1");
  if (!(spectrum_v.norm() < 1.0)) invalid("spectrum.v must satisfy |v| < 1");
  if (d_beta < 0.0) invalid("initial.amplitude must be >= 0");
  if (!(pert_width > 0.0)) invalid("initial.width must be positive");
  if (pert_components < 1) invalid("initial.components must be >= 1");
  if (initial == InitialRecipe::CustomFile && custom_file.empty()) invalid("initial.file is empty");
  if (dt < 0.0 || dt > 0.5 * box / n) invalid("run.dt must lie in [0, h/2]");
  if (t_end < 0.0) invalid("run.t_end must be >= 0");
  if (record_every < 1) invalid("run.record_every must be >= 1");
  if (!(v_cap > 0.0 && v_cap < 1.0)) invalid("run.v_cap must lie in (0, 1)");
  if (!(drift_tol > 0.0)) invalid("run.drift_tol must be positive");
  if (!(delta > 0.0 && delta < 0.5)) invalid("analysis.delta must lie in (0, 1/2)");
  if (spectrum) {
    if (omegas.empty() && lambdas.empty()) invalid("spectrum needs omegas or lambdas");
    for (double w : omegas)
      if (w == 0.0) invalid("spectrum.omegas must be nonzero");
    for (double l : lambdas)
      if (!(l > 0.0)) invalid("spectrum.lambdas must be positive");
  }
}

json ExperimentPreset::to_json() const {
  json j;
  j["name"] = name;
  j["grid"] = {{"n", n}, {"box", box}};
  j["charge"] = {{"base_width", base_width}, {"amplitude", amplitude}};
  j["soliton"] = {{"b", io::to_json(b0)}, {"v", io::to_json(v0)}};
  j["initial"] = {{"recipe", recipe_name(initial)},
                  {"amplitude", d_beta},
                  {"width", pert_width},
                  {"components", pert_components},
                  {"file", custom_file}};
  j["run"] = {{"dt", dt},
              {"t_end", t_end},
              {"record_every", record_every},
              {"scheme", scheme == Scheme::Strang ? "strang" : "yoshida4"},
              {"frame", frame == Frame::Lab ? "lab" : "comoving"},
              {"enforce_horizon", enforce_horizon},
              {"drift_tol", drift_tol},
              {"v_cap", v_cap},
              {"slices", slices}};
  j["analysis"] = {{"enabled", analyze}, {"delta", delta}};
  j["spectrum"] = {{"enabled", spectrum},
                   {"v", io::to_json(spectrum_v)},
                   {"omegas", omegas},
                   {"lambdas", lambdas}};
  j["seed"] = seed;
  return j;
}

ExperimentPreset ExperimentPreset::from_json(const json& j) {
  io::Config cfg;
  for (const auto& [section, body] : j.items()) {
    if (!body.is_object()) continue;
    for (const auto& [key, value] : body.items()) {
      std::string text;
      if (value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i)
          text += (i ? ", " : "") + io::format_double(value[i].get<double>());
      } else if (value.is_number_float()) {
        text = io::format_double(value.get<double>());
      } else if (value.is_string()) {
        text = value.get<std::string>();
      } else {
        text = value.dump();
      }
      cfg.set(section + "." + key, text);
    }
  }
  ExperimentPreset p;
  p.apply(cfg);
  p.name = j.value("name", std::string("custom"));
  p.seed = j.value("seed", std::uint64_t{0});
  return p;
}

// ---------------------------------------------------------------- perturbation

FieldPair make_perturbation(const Grid3& grid, const Vec3& center, double width, int components,
                            double size, double beta, std::uint64_t seed) {
  FieldPair f = FieldPair::zero(grid);
  if (size == 0.0) return f;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  RealData psi(grid.size(), 0.0), pi(grid.size(), 0.0);
  const int n = grid.n();
  for (int c = 0; c < components; ++c) {
    Vec3 off, dir;
    for (int a = 0; a < 3; ++a) off[a] = 0.5 * width * normal(rng);
    for (int a = 0; a < 3; ++a) dir[a] = normal(rng);
    dir.normalize();
    const double a_psi = normal(rng), a_pi = normal(rng);
    const Vec3 cc = center + off;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          const Vec3 y = (grid.x(i, j, l) - cc) / width;
          const double e = std::exp(-0.5 * y.squaredNorm());
          const std::size_t m = grid.index(i, j, l);
          psi[m] += a_psi * dir.dot(y) * e;          // odd: zero mean
          pi[m] += a_pi * (y.squaredNorm() - 3.0) * e;  // Laplacian of a Gaussian: zero mean
        }
  }
  f.psi_hat = forward(grid, psi);
  f.pi_hat = forward(grid, pi);
  // the k = 0 mode never disperses on the torus
  f.psi_hat[0] = 0.0;
  f.pi_hat[0] = 0.0;
  const double norm = weighted_norm(f, beta, center);
  f *= size / norm;
  return f;
}

// ---------------------------------------------------------------- analysis

AnalysisSummary summarize(ModulationTrack track, ScatteringReport sc,
                          const std::vector<ParticleSample>& particle, double horizon,
                          double delta) {
  AnalysisSummary s;
  s.horizon = horizon;
  auto ratio = [](double num, double z) {
    if (z > 0.0) return num / (z * z);
    return num > 0.0 ? INFINITY : 0.0;
  };
  for (std::size_t i = 0; i < track.times.size(); ++i) {
    const double z = track.Z_norms[i];
    s.cv_ratio = std::max(s.cv_ratio, ratio(track.cdot[i].norm() + track.vdot[i].norm(), z));
    s.t_ratio = std::max(s.t_ratio, ratio(track.T_norms[i], z));
  }
  if (!track.times.empty())
    s.drift_ratio = majorant_and_drift(track, delta, track.times.back()).ratio;
  try {
    s.z_fit = fit_decay(track.times, track.Z_norms, 5.0, horizon);
    s.z_fit_ok = true;
  } catch (const Error& e) {
    s.z_fit_error = e.what();
  }
  try {
    std::vector<double> t;
    for (const auto& p : particle) t.push_back(p.t);
    s.qdot_fit = fit_decay(t, qdot_deviation(particle, sc.v_plus), 5.0, horizon);
    s.qdot_fit_ok = true;
  } catch (const Error& e) {
    s.qdot_fit_error = e.what();
  }
  s.cauchy_monotone = sc.cauchy.size() >= 2;
  for (std::size_t i = 1; i < sc.cauchy.size(); ++i)
    if (sc.cauchy[i] > 1.1 * sc.cauchy[i - 1]) s.cauchy_monotone = false;
  s.track = std::move(track);
  s.scattering = std::move(sc);
  return s;
}

json summary_json(const AnalysisSummary& s) {
  auto fit = [](const DecayFit& f, bool ok, const std::string& err) {
    if (!ok) return json{{"ok", false}, {"error", err}};
    return json{{"ok", true},
                {"exponent", f.exponent},
                {"prefactor", f.prefactor},
                {"window", {f.t0, f.t1}},
                {"residual", f.residual},
                {"samples", f.samples}};
  };
  json j;
  j["horizon"] = s.horizon;
  j["in_basin"] = !s.track.failure_index.has_value();
  if (s.track.failure_index) j["basin_failure"] = s.track.failure;
  j["z_decay"] = fit(s.z_fit, s.z_fit_ok, s.z_fit_error);
  j["qdot_decay"] = fit(s.qdot_fit, s.qdot_fit_ok, s.qdot_fit_error);
  j["modulation_ratio"] = s.cv_ratio;
  j["T_ratio"] = s.t_ratio;
  j["drift_ratio"] = s.drift_ratio;
  j["cauchy_monotone"] = s.cauchy_monotone;
  return j;
}

void write_modulation_csv(const ModulationTrack& track, const fs::path& csv) {
  io::CsvWriter w(csv, {"t", "b1", "b2", "b3", "v1", "v2", "v3", "c1", "c2", "c3", "Z", "cdot",
                        "vdot", "T", "residual", "newton_iters"});
  for (std::size_t i = 0; i < track.times.size(); ++i) {
    const auto& s = track.sigma[i];
    const bool diff = track.cdot.size() == track.times.size();
    w.row({track.times[i], s.b[0], s.b[1], s.b[2], s.v[0], s.v[1], s.v[2], track.c[i][0],
           track.c[i][1], track.c[i][2], track.Z_norms[i], diff ? track.cdot[i].norm() : 0.0,
           diff ? track.vdot[i].norm() : 0.0, diff ? track.T_norms[i] : 0.0, track.residuals[i],
           static_cast<double>(track.newton_iters[i])});
  }
}

json scattering_json(const ScatteringReport& sc) {
  json j;
  j["v_plus"] = io::to_json(sc.v_plus);
  j["a_plus"] = io::to_json(sc.a_plus);
  j["settled"] = sc.settled;
  j["qdot_variation"] = sc.qdot_variation;
  j["psi_plus_F_norm"] = f_norm(sc.psi_plus);
  j["times"] = sc.times;
  j["z_F_norms"] = sc.z_norms;
  j["cauchy"] = sc.cauchy;
  if (!sc.note.empty()) j["note"] = sc.note;
  return j;
}

// ---------------------------------------------------------------- spectral output

json check_rho_report(const ChargeDensity& rho) {
  const auto shells = band_shells(rho);
  const auto w = check_wiener(rho, shells);
  const auto full = check_wiener(rho, default_shells(rho.grid));
  const auto m = check_moments(rho, 4);
  json j;
  j["wiener"] = {{"min_abs", w.min_abs},
                 {"worst_k", io::to_json(w.worst_k)},
                 {"floor", w.floor},
                 {"max_abs", w.max_abs},
                 {"band_k", shells.back()},
                 {"pass", w.pass},
                 {"full_range_min_abs", full.min_abs},
                 {"full_range_positive", full.min_abs > 0.0}};
  json values = json::object();
  for (std::size_t i = 0; i < m.indices.size(); ++i) {
    const auto& a = m.indices[i];
    values[std::to_string(a[0]) + std::to_string(a[1]) + std::to_string(a[2])] = m.values[i];
  }
  j["moments"] = {{"max_order", 4},
                  {"l1_norm", m.l1_norm},
                  {"max_rel", m.max_rel},
                  {"tol", m.tol},
                  {"values", values},
                  {"pass", m.pass}};
  j["effective_radius"] = rho.effective_radius;
  j["pass"] = w.pass && full.min_abs > 0.0 && m.pass;
  return j;
}

void write_spectrum(const ChargeDensity& rho, const Vec3& v, const std::vector<double>& omegas,
                    const fs::path& csv) {
  io::CsvWriter w(csv, {"omega", "f1_re", "f1_im", "f_re", "f_im", "detM_re", "detM_im",
                        "imF_sign_ok"});
  for (double om : omegas) {
    const auto se = on_axis(rho, v, om);
    bool ok = true;
    for (int j = 0; j < 3; ++j) ok = ok && (om > 0 ? 1.0 : -1.0) * se.F(j, j).imag() < 0.0;
    w.row({om, se.f1().real(), se.f1().imag(), se.f().real(), se.f().imag(), se.detM.real(),
           se.detM.imag(), ok ? 1.0 : 0.0});
  }
}

void write_kh(const ChargeDensity& rho, const Vec3& v, const std::vector<double>& lambdas,
              const fs::path& csv) {
  io::CsvWriter w(csv, {"lambda", "K11", "K22", "K33", "H11_re", "H11_im", "H22_re", "H22_im",
                        "H33_re", "H33_im", "offdiag_rel", "refine_change"});
  for (double l : lambdas) {
    const auto se = kh_matrices(rho, v, cplx(l, 0.0));
    w.row({l, se.K(0, 0), se.K(1, 1), se.K(2, 2), se.H(0, 0).real(), se.H(0, 0).imag(),
           se.H(1, 1).real(), se.H(1, 1).imag(), se.H(2, 2).real(), se.H(2, 2).imag(),
           se.offdiag_rel, se.refine_change});
  }
}

// ---------------------------------------------------------------- run_preset

namespace {

json versions() {
  return {{"wavepart", std::string(kVersion)},
          {"fftw", std::string(fftw_version)},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                        "." + std::to_string(EIGEN_MINOR_VERSION)},
          {"boost", BOOST_LIB_VERSION},
          {"compiler", __VERSION__}};
}

void run_pipeline(const ExperimentPreset& p, const fs::path& out) {
  const Grid3 grid(p.n, p.box);
  auto rho = std::make_shared<const ChargeDensity>(make_admissible_density(p.base_width, p.amplitude, grid));
  io::write_json(out / "rho.json", check_rho_report(*rho));

  json meta;
  meta["preset"] = p.to_json();
  meta["versions"] = versions();
  meta["generator"] = {{"name", "std::mt19937_64"}, {"seed", p.seed}};
  meta["tolerances"] = {{"drift_tol", p.drift_tol},
                        {"projection_tol", ProjectionOptions{}.tol},
                        {"wiener_floor_rel", 1e-12},
                        {"moment_tol", 1e-8},
                        {"v_cap", p.v_cap}};

  if (p.spectrum) {
    io::write_json(out / "meta.json", meta);
    if (!p.omegas.empty()) write_spectrum(*rho, p.spectrum_v, p.omegas, out / "spectrum.csv");
    if (!p.lambdas.empty()) write_kh(*rho, p.spectrum_v, p.lambdas, out / "kh.csv");
    return;
  }

  const SolitonParams s0{p.b0, p.v0};
  PhaseState y0;
  if (p.initial == InitialRecipe::CustomFile) {
    y0 = io::load_state(p.custom_file);
    require_same_grid(y0.grid(), grid, "initial.file");
  } else {
    y0 = soliton_state(*rho, s0, grid);
    if (p.initial == InitialRecipe::PerturbedSoliton && p.d_beta > 0.0)
      y0.fields += make_perturbation(grid, p.b0, p.pert_width, p.pert_components, p.d_beta,
                                     4.0 + p.delta, p.seed);
  }

  SimConfig cfg;
  cfg.rho = rho;
  cfg.initial = y0;
  cfg.dt = p.dt;
  cfg.record_every = p.record_every;
  cfg.scheme = p.scheme;
  cfg.frame = p.frame;
  cfg.enforce_horizon = p.enforce_horizon;
  cfg.drift_tol = p.drift_tol;
  cfg.v_cap = p.v_cap;
  const auto proj = project_to_manifold(y0, *rho, s0);
  if (p.frame == Frame::Comoving) cfg.reference_velocity = proj.sigma.v;
  const double horizon = wrap_horizon(cfg);
  cfg.t_end = p.t_end > 0.0 ? p.t_end : 0.999 * horizon;

  meta["run"] = {{"horizon", horizon},
                 {"t_end", cfg.t_end},
                 {"h", grid.spacing()},
                 {"initial_projection", {{"b", io::to_json(proj.sigma.b)},
                                         {"v", io::to_json(proj.sigma.v)},
                                         {"newton_iters", proj.newton_iters}}},
                 {"d_beta_measured", weighted_norm(proj.transversal, 4.0 + p.delta, proj.sigma.b)}};
  io::write_json(out / "meta.json", meta);

  if (p.slices) fs::create_directories(out / "snapshots");
  ModulationOptions mopt;
  mopt.delta = p.delta;
  ModulationTracker mt(rho, s0, mopt);
  ScatteringTracker st(rho);
  int snap = 0;
  auto observer = [&](double t, const PhaseState& y) {
    if (p.slices) {
      char name[32];
      std::snprintf(name, sizeof name, "%04d", snap);
      const int ix = grid.n() / 2;
      io::write_slice(out / "snapshots" / (std::string("psi_") + name + ".csv"), grid,
                      y.fields.psi(), ix);
      io::write_slice(out / "snapshots" / (std::string("pi_") + name + ".csv"), grid,
                      y.fields.pi(), ix);
    }
    ++snap;
    if (p.analyze) {
      mt.observe(t, y);
      st.observe(t, y);
    }
  };
  const Trajectory traj = run_nonlinear(cfg, observer);

  {
    io::CsvWriter w(out / "particle.csv",
                    {"t", "q1", "q2", "q3", "p1", "p2", "p3", "qdot1", "qdot2", "qdot3"});
    for (const auto& s : traj.particle)
      w.row({s.t, s.q[0], s.q[1], s.q[2], s.p[0], s.p[1], s.p[2], s.qdot[0], s.qdot[1], s.qdot[2]});
  }
  {
    io::CsvWriter w(out / "energy.csv", {"t", "H", "rel_drift"});
    const double h0 = traj.energies.front();
    for (std::size_t i = 0; i < traj.times.size(); ++i)
      w.row({traj.times[i], traj.energies[i], std::abs(traj.energies[i] - h0) / std::abs(h0)});
  }
  if (!p.analyze) return;
  auto track = mt.finish();
  auto sc = st.finish(traj.particle);
  write_modulation_csv(track, out / "modulation.csv");
  io::write_json(out / "scattering.json", scattering_json(sc));
  if (track.failure_index)
    throw Error(ErrorKind::Basin, "diagnostics", "projection left the basin at " + track.failure);
  if (p.initial != InitialRecipe::Soliton && p.d_beta > 0.0) {
    const auto s = summarize(std::move(track), std::move(sc), traj.particle, cfg.t_end, p.delta);
    io::write_json(out / "decay.json", summary_json(s));
  }
}

}  // namespace

RunReport run_preset(const ExperimentPreset& preset, const fs::path& out_dir) {
  RunReport rep;
  try {
    preset.validate();
    fs::create_directories(out_dir);
    fs::remove(out_dir / "FAILED");
    run_pipeline(preset, out_dir);
    rep.message = "ok";
  } catch (const Error& e) {
    rep.exit_code = 1;
    rep.message = e.what();
  } catch (const std::exception& e) {
    rep.exit_code = 1;
    rep.message = std::string("cli: internal: ") + e.what();
  }
  if (rep.exit_code != 0) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    std::ofstream(out_dir / "FAILED") << rep.message << '\n';
  }
  return rep;
}

}  // namespace wp
