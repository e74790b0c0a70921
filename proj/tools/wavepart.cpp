// wavepart: command line front end.
//
//   wavepart check-rho  [--n --box --base-width --amplitude] [--out DIR]
//   wavepart soliton    [--v X Y Z] [--b X Y Z] [--n --box] --out DIR
//   wavepart spectrum   [--v X Y Z] [--omega-grid A:B:N | a,b,..] [--lambda a,b,..] --out DIR
//   wavepart simulate   --config FILE --out DIR
//   wavepart linearize  --config FILE --out DIR
//   wavepart analyze    --in DIR [--delta D]
//   wavepart run-preset NAME [--config FILE] [--seed S] --out DIR
//
// Exit status: 0 success, 1 run failure (FAILED marker written), 2 usage error,
// 3 a check-rho report that does not pass.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>

#include "wavepart/error.hpp"
#include "wavepart/experiment.hpp"
#include "wavepart/transform.hpp"

namespace fs = std::filesystem;
using namespace wp;
using io::json;

namespace {

struct Common {
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  std::string config;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "seed of the named generator (std::mt19937_64)")
      ->each([&c](const std::string&) { c.seed_set = true; });
  app->add_option("--out", c.out, "output directory");
  app->add_option("--config", c.config, "key = value configuration file");
}

io::Config load_config(const Common& c) {
  return c.config.empty() ? io::Config{} : io::Config::load(c.config);
}

fs::path require_out(const Common& c) {
  if (c.out.empty()) throw Error(ErrorKind::Argument, "cli", "--out is required");
  fs::create_directories(c.out);
  return c.out;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double a = 0, b = 0;
    int n = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d", &a, &b, &n) != 3 || n < 1)
      throw Error(ErrorKind::Argument, "cli", "omega grid must be A:B:N");
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    return out;
  }
  io::Config c;
  c.set("g", text);
  return c.get_list("g", {});
}

Vec3 to_vec(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

// ------------------------------------------------------------------ commands

int cmd_check_rho(int n, double box, double width, double amp, const Common& c) {
  const Grid3 grid(n, box);
  const auto rho = make_admissible_density(width, amp, grid);
  const json rep = check_rho_report(rho);
  if (c.out.empty())
    std::cout << rep.dump(2) << '\n';
  else
    io::write_json(require_out(c) / "check_rho.json", rep);
  return rep["pass"].get<bool>() ? 0 : 3;
}

int cmd_soliton(const std::vector<double>& v, const std::vector<double>& b, int n, double box,
                double width, double amp, const std::string& save_state, const Common& c) {
  const fs::path out = require_out(c);
  const Grid3 grid(n, box);
  const auto rho = make_admissible_density(width, amp, grid);
  const SolitonParams s{to_vec(b), to_vec(v)};
  const PhaseState y = soliton_state(rho, s, grid);

  // slice through the plane x = b_1
  int ix = 0;
  const auto xs = grid.x_axis();
  for (int i = 0; i < n; ++i)
    if (std::abs(xs[i] - s.b[0]) < std::abs(xs[ix] - s.b[0])) ix = i;
  io::write_slice(out / "psi_slice.csv", grid, y.fields.psi(), ix);
  io::write_slice(out / "pi_slice.csv", grid, y.fields.pi(), ix);

  // stationary residual (-Lap + (v.grad)^2) psi_v + rho in discrete L2
  const FieldPair f = soliton_field(rho, s.v, grid);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const std::size_t m = grid.index(i, j, l);
        const double kv = grid.kd(i, j, l).dot(s.v);
        num += std::norm((grid.k2(i, j, l) - kv * kv) * f.psi_hat[m] + rho.rho_hat[m]);
        den += std::norm(rho.rho_hat[m]);
      }
  json norms;
  norms["sigma"] = {{"b", io::to_json(s.b)}, {"v", io::to_json(s.v)}};
  norms["gamma"] = s.gamma();
  norms["nu"] = s.nu();
  norms["p_v"] = io::to_json(s.p());
  norms["F_norm"] = f_norm(y.fields);
  for (double a : {1.0, 2.0, 4.25})
    norms["weighted_norm"][io::format_double(a)] = weighted_norm(y, a, s.b);
  norms["energy"] = hamiltonian(y, rho);
  norms["coulomb_self_energy"] = coulomb_self_energy(rho);
  norms["stationary_residual_rel"] = std::sqrt(num / den);
  io::write_json(out / "norms.json", norms);
  if (!save_state.empty()) io::save_state(save_state, y);
  return 0;
}

int cmd_spectrum(const std::vector<double>& v, const std::string& omega_grid,
                 const std::string& lambda, int n, double box, double width, double amp,
                 const Common& c) {
  const fs::path out = require_out(c);
  ExperimentPreset p = ExperimentPreset::named("spectrum-scan");
  p.n = n;
  p.box = box;
  p.base_width = width;
  p.amplitude = amp;
  p.spectrum_v = to_vec(v);
  if (!omega_grid.empty()) p.omegas = parse_grid(omega_grid);
  if (!lambda.empty()) p.lambdas = parse_grid(lambda);
  p.apply(load_config(c));
  if (c.seed_set) p.seed = c.seed;
  const auto rep = run_preset(p, out);
  if (rep.exit_code) std::cerr << "error: " << rep.message << '\n';
  return rep.exit_code;
}

int cmd_simulate(const Common& c) {
  const fs::path out = require_out(c);
  ExperimentPreset p;
  p.name = "simulate";
  p.analyze = false;
  p.apply(load_config(c));
  if (c.seed_set) p.seed = c.seed;
  const auto rep = run_preset(p, out);
  if (rep.exit_code) std::cerr << "error: " << rep.message << '\n';
  return rep.exit_code;
}

int cmd_analyze(const std::string& in, double delta) {
  const json meta = io::read_json(fs::path(in) / "meta.json");
  ExperimentPreset p = ExperimentPreset::from_json(meta.at("preset"));
  p.analyze = true;
  p.slices = false;
  if (delta > 0.0) p.delta = delta;
  // the run is deterministic: replaying it regenerates identical
  // particle/energy records and feeds the trackers snapshot by snapshot
  const auto rep = run_preset(p, in);
  if (rep.exit_code) std::cerr << "error: " << rep.message << '\n';
  return rep.exit_code;
}

int cmd_linearize(const Common& c) {
  const fs::path out = require_out(c);
  const io::Config cfg = load_config(c);
  const int n = cfg.get_int("grid.n", 64);
  const double box = cfg.get_double("grid.box", 64.0 / 3.0);
  const double width = cfg.get_double("charge.base_width", 1.0);
  const double amp = cfg.get_double("charge.amplitude", 0.01);
  const Vec3 v = cfg.get_vec3("linearize.v", Vec3(0.3, 0, 0));
  const std::string init = cfg.get("linearize.initial", "tau4");
  SimConfig sim;
  sim.t_end = cfg.get_double("linearize.t_end", 10.0);
  // h/8: the field-particle splitting error at h/4 is ~1e-6 of the frozen energy
  sim.dt = cfg.get_double("linearize.dt", box / n / 8.0);
  sim.drift_tol = cfg.get_double("linearize.drift_tol", sim.drift_tol);
  sim.record_every = cfg.get_int("linearize.record_every", 8);
  sim.enforce_horizon = cfg.get_bool("linearize.enforce_horizon", false);
  std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_double("seed", 0.0));
  if (c.seed_set) seed = c.seed;
  const auto extra = cfg.unused();
  if (!extra.empty()) throw Error(ErrorKind::Argument, "cli", "unknown config key " + extra.front());

  const Grid3 grid(n, box);
  auto rho = std::make_shared<const ChargeDensity>(make_admissible_density(width, amp, grid));
  sim.rho = rho;
  const auto frame = tangent_frame(*rho, v, grid);
  LinState x0;
  if (init.size() == 4 && init.rfind("tau", 0) == 0 && init[3] >= '1' && init[3] <= '6') {
    x0 = frame.tau[init[3] - '1'];
  } else if (init == "random") {
    x0 = PhaseState::zero(grid);
    x0.fields = make_perturbation(grid, Vec3::Zero(), 1.0, 3, 1.0, 0.0, seed);
    std::mt19937_64 rng(seed + 1);
    std::normal_distribution<double> normal;
    for (int a = 0; a < 3; ++a) x0.q[a] = normal(rng), x0.p[a] = normal(rng);
    x0 = project_transversal(x0, frame, omega_matrix(frame));
  } else {
    throw Error(ErrorKind::Argument, "cli", "linearize.initial must be tau1..tau6 or random");
  }

  LinearizedSystem sys(rho, v);
  io::CsvWriter energy(out / "energy.csv", {"t", "H", "H_positive_form"});
  io::CsvWriter state(out / "particle.csv",
                      {"t", "Q1", "Q2", "Q3", "P1", "P2", "P3", "omega_tau_max"});
  auto observer = [&](double t, const PhaseState& x) {
    energy.row({t, sys.energy(x), sys.energy_positive_form(x)});
    double om = 0.0;
    for (const auto& tau : frame.tau) om = std::max(om, std::abs(symplectic_form(x, tau)));
    state.row({t, x.q[0], x.q[1], x.q[2], x.p[0], x.p[1], x.p[2], om});
  };
  const auto traj = run_linearized(x0, v, sim, observer);
  json meta;
  meta["command"] = "linearize";
  meta["grid"] = {{"n", n}, {"box", box}};
  meta["charge"] = {{"base_width", width}, {"amplitude", amp}};
  meta["v"] = io::to_json(v);
  meta["initial"] = init;
  meta["generator"] = {{"name", "std::mt19937_64"}, {"seed", seed}};
  meta["t_end"] = sim.t_end;
  meta["max_rel_drift"] = traj.max_rel_drift;
  io::write_json(out / "meta.json", meta);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wave field coupled to a relativistic particle: solitons, spectra, simulations"};
  app.require_subcommand(1);

  Common common;
  int n = 64;
  double box = 64.0 / 3.0, width = 1.0, amp = 0.01;
  auto add_grid = [&](CLI::App* s) {
    s->add_option("--n", n, "grid points per axis");
    s->add_option("--box", box, "box length L");
    s->add_option("--base-width", width, "Gaussian base width w");
    s->add_option("--amplitude", amp, "charge amplitude A");
  };

  auto* rho_cmd = app.add_subcommand("check-rho", "Wiener condition and vanishing moments (JSON)");
  add_grid(rho_cmd);
  add_common(rho_cmd, common);

  std::vector<double> v{0.3, 0.0, 0.0}, b{0.0, 0.0, 0.0};
  std::string save_state;
  auto* sol_cmd = app.add_subcommand("soliton", "soliton field slices (CSV) and norms (JSON)");
  sol_cmd->add_option("--v", v, "velocity")->expected(3);
  sol_cmd->add_option("--b", b, "center")->expected(3);
  sol_cmd->add_option("--save-state", save_state, "write the state for initial.recipe = file");
  add_grid(sol_cmd);
  add_common(sol_cmd, common);

  std::string omega_grid, lambda;
  auto* spec_cmd = app.add_subcommand("spectrum", "F(i omega), det M on the axis; K, H at real lambda");
  spec_cmd->add_option("--v", v, "velocity")->expected(3);
  spec_cmd->add_option("--omega-grid", omega_grid, "A:B:N or comma list (omega != 0)");
  spec_cmd->add_option("--lambda", lambda, "comma list of real lambda > 0");
  add_grid(spec_cmd);
  add_common(spec_cmd, common);

  auto* sim_cmd = app.add_subcommand("simulate", "nonlinear run: particle.csv, energy.csv, snapshots/");
  add_common(sim_cmd, common);

  auto* lin_cmd = app.add_subcommand("linearize", "frozen linearized run");
  add_common(lin_cmd, common);

  std::string in_dir;
  double delta = 0.0;
  auto* an_cmd = app.add_subcommand("analyze", "modulation.csv, decay.json, scattering.json");
  an_cmd->add_option("--in", in_dir, "run directory")->required();
  an_cmd->add_option("--delta", delta, "decay parameter delta (beta = 4 + delta)");
  add_common(an_cmd, common);

  std::string preset_name;
  auto* pre_cmd = app.add_subcommand("run-preset", "named experiment pipeline");
  pre_cmd->add_option("name", preset_name, "soliton-persistence | perturbed-soliton | spectrum-scan")
      ->required();
  add_common(pre_cmd, common);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*rho_cmd) return cmd_check_rho(n, box, width, amp, common);
    if (*sol_cmd) return cmd_soliton(v, b, n, box, width, amp, save_state, common);
    if (*spec_cmd) return cmd_spectrum(v, omega_grid, lambda, n, box, width, amp, common);
    if (*sim_cmd) return cmd_simulate(common);
    if (*lin_cmd) return cmd_linearize(common);
    if (*an_cmd) return cmd_analyze(in_dir, delta);
    if (*pre_cmd) {
      ExperimentPreset p = ExperimentPreset::named(preset_name);
      p.apply(load_config(common));
      if (common.seed_set) p.seed = common.seed;
      const auto rep = run_preset(p, require_out(common));
      if (rep.exit_code) std::cerr << "error: " << rep.message << '\n';
      return rep.exit_code;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::Argument ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
