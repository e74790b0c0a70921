#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "common.hpp"
#include "wavepart/io.hpp"

using namespace wp;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "wavepart-test-cli";

// short run on the small box
const char* kSmall =
    "[grid]\nn = 64\nbox = 21.333333333333333\n"
    "[run]\nt_end = 0.5\nrecord_every = 3\nenforce_horizon = false\n";

ExperimentPreset small(const std::string& name) {
  auto p = ExperimentPreset::named(name);
  p.apply(io::Config::parse_string(kSmall));
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// every regular file under a, compared byte for byte with its twin under b
void require_identical_trees(const fs::path& a, const fs::path& b, bool skip_meta) {
  int files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), a);
    if (skip_meta && rel == "meta.json") continue;
    CAPTURE(rel.string());
    REQUIRE(fs::exists(b / rel));
    CHECK(slurp(e.path()) == slurp(b / rel));
    ++files;
  }
  CHECK(files > 5);
}

int run(const std::string& args) {
  const std::string cmd = std::string(WAVEPART_EXE) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("pipeline determinism and the zero-perturbation identity") {
  fs::remove_all(kRoot);
  auto pert = small("perturbed-soliton");
  REQUIRE(run_preset(pert, kRoot / "p1").exit_code == 0);
  REQUIRE(run_preset(pert, kRoot / "p2").exit_code == 0);
  require_identical_trees(kRoot / "p1", kRoot / "p2", false);
  for (const char* f : {"meta.json", "rho.json", "particle.csv", "energy.csv", "modulation.csv",
                        "scattering.json", "decay.json", "snapshots/psi_0000.csv"})
    CHECK(fs::exists(kRoot / "p1" / f));

  pert.d_beta = 0.0;
  REQUIRE(run_preset(pert, kRoot / "zero").exit_code == 0);
  REQUIRE(run_preset(small("soliton-persistence"), kRoot / "sol").exit_code == 0);
  CHECK_FALSE(fs::exists(kRoot / "sol" / "decay.json"));
  CHECK_FALSE(fs::exists(kRoot / "zero" / "decay.json"));
  // only the preset description in meta.json differs
  require_identical_trees(kRoot / "zero", kRoot / "sol", true);

  // meta.json is enough to replay the run
  const auto meta = io::read_json(kRoot / "p1" / "meta.json");
  CHECK(meta.contains("versions"));
  CHECK(meta["generator"]["name"] == "std::mt19937_64");
  const auto replay = ExperimentPreset::from_json(meta["preset"]);
  CHECK(replay.to_json() == meta["preset"]);
}

TEST_CASE("failed runs leave a marker") {
  auto p = small("perturbed-soliton");
  p.t_end = 0.0;
  p.enforce_horizon = true;
  p.v_cap = 0.05;  // the soliton travels at 0.1
  const auto rep = run_preset(p, kRoot / "failed");
  CHECK(rep.exit_code == 1);
  REQUIRE(fs::exists(kRoot / "failed" / "FAILED"));
  CHECK(slurp(kRoot / "failed" / "FAILED").find("error") != std::string::npos);
  CHECK(fs::exists(kRoot / "failed" / "meta.json"));

  p = small("perturbed-soliton");
  p.n = 30;
  CHECK(run_preset(p, kRoot / "invalid").exit_code == 1);
  CHECK(fs::exists(kRoot / "invalid" / "FAILED"));
}

TEST_CASE("spectrum-scan preset") {
  const auto rep = run_preset(ExperimentPreset::named("spectrum-scan"), kRoot / "spec");
  REQUIRE(rep.exit_code == 0);
  std::ifstream in(kRoot / "spec" / "spectrum.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("omega,", 0) == 0);
  int rows = 0;
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream is(line);
    double w, f1r, f1i, fr, fi, dr, di, ok;
    is >> w >> f1r >> f1i >> fr >> fi >> dr >> di >> ok;
    CHECK(std::hypot(dr, di) > 0.0);
    // above the charge band rho^ underflows and Im F is exactly zero
    if (std::abs(w) <= 3.0)
      CHECK(ok == 1.0);
    else
      CHECK(fi == 0.0);
    ++rows;
  }
  CHECK(rows == 8);
  CHECK(fs::exists(kRoot / "spec" / "kh.csv"));
}

TEST_CASE("command line") {
  fs::create_directories(kRoot);
  std::ofstream(kRoot / "small.cfg") << kSmall;
  const std::string cfg = " --config " + (kRoot / "small.cfg").string();

  CHECK(run("--help") == 0);
  CHECK(run("check-rho --n 64 --box 21.333333333333333 --out " + (kRoot / "rho").string()) == 0);
  CHECK(fs::exists(kRoot / "rho" / "check_rho.json"));
  CHECK(run("soliton --n 64 --box 21.333333333333333 --v 0.3 0 0 --out " + (kRoot / "sol").string()) == 0);
  CHECK(fs::exists(kRoot / "sol" / "norms.json"));
  CHECK(fs::exists(kRoot / "sol" / "psi_slice.csv"));
  CHECK(run("spectrum --omega-grid 0.5,1 --out " + (kRoot / "spec-cli").string()) == 0);

  // argument errors exit with 2
  CHECK(run("soliton --n 64 --box 21.333333333333333 --v 1.5 0 0 --out " + (kRoot / "x").string()) != 0);
  CHECK(run("run-preset nope --out " + (kRoot / "x").string()) == 2);
  std::ofstream(kRoot / "typo.cfg") << "[grid]\nnn = 3\n";
  CHECK(run("run-preset perturbed-soliton --config " + (kRoot / "typo.cfg").string() + " --out " +
            (kRoot / "x").string()) != 0);

  // simulate then analyze replays the same run
  CHECK(run("simulate" + cfg + " --out " + (kRoot / "sim").string()) == 0);
  CHECK(fs::exists(kRoot / "sim" / "particle.csv"));
  CHECK(run("analyze --in " + (kRoot / "sim").string()) == 0);
  CHECK(fs::exists(kRoot / "sim" / "modulation.csv"));
  CHECK(fs::exists(kRoot / "sim" / "scattering.json"));

  // the seed flag reaches the generator
  CHECK(run("run-preset perturbed-soliton --seed 3" + cfg + " --out " + (kRoot / "s3").string()) == 0);
  CHECK(io::read_json(kRoot / "s3" / "meta.json")["generator"]["seed"] == 3);
}
