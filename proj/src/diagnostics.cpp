#include "wavepart/diagnostics.hpp"

#include <cmath>
#include <sstream>

#include "wavepart/error.hpp"
#include "wavepart/kernels.hpp"
#include "wavepart/transform.hpp"

namespace wp {

namespace {

double wnorm(const Grid3& g, const SpectralData& f_hat, double alpha, const Vec3& center) {
  const RealData f = inverse_real(g, f_hat);
  return std::sqrt(kernels::omp::weighted_sq(g, f, center, alpha));
}

double grad_wnorm(const Grid3& g, const SpectralData& f_hat, double alpha, const Vec3& center) {
  double s = 0.0;
  for (int j = 0; j < 3; ++j) {
    const RealData d = inverse_real(g, gradient(g, f_hat, j));
    s += kernels::omp::weighted_sq(g, d, center, alpha);
  }
  return std::sqrt(s);
}

RealData weights(const Grid3& g, double alpha) {
  RealData w(g.size());
  const int n = g.n();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l)
        w[g.index(i, j, l)] = std::pow(1.0 + g.x(i, j, l).norm(), 2.0 * alpha) * g.cell_volume();
  return w;
}

// G_lm = sum w f_l f_m for the columns of `cols`
Mat6 gram(const std::vector<RealData>& cols, const RealData& w) {
  Mat6 G = Mat6::Zero();
  for (int l = 0; l < 6; ++l)
    for (int m = l; m < 6; ++m) {
      double s = 0.0;
      const std::size_t N = w.size();
#pragma omp parallel for reduction(+ : s) schedule(static)
      for (std::size_t p = 0; p < N; ++p) s += w[p] * cols[l][p] * cols[m][p];
      G(l, m) = G(m, l) = s;
    }
  return G;
}

std::array<Mat6, 3> frame_grams(const TangentFrame& fr, double beta) {
  const Grid3& g = fr.tau[0].grid();
  const RealData wb = weights(g, beta);
  const RealData wb1 = weights(g, beta + 1.0);
  std::array<Mat6, 3> out;
  std::vector<RealData> cols(6);
  for (int l = 0; l < 6; ++l) cols[l] = inverse_real(g, fr.tau[l].fields.psi_hat);
  out[0] = gram(cols, wb);
  out[1] = Mat6::Zero();
  for (int j = 0; j < 3; ++j) {
    for (int l = 0; l < 6; ++l) cols[l] = inverse_real(g, gradient(g, fr.tau[l].fields.psi_hat, j));
    out[1] += gram(cols, wb);
  }
  for (int l = 0; l < 6; ++l) cols[l] = inverse_real(g, fr.tau[l].fields.pi_hat);
  out[2] = gram(cols, wb1);
  return out;
}

Vec3 velocity_of(const Vec3& p) { return p / std::sqrt(1.0 + p.squaredNorm()); }

}  // namespace

double weighted_norm(const FieldPair& f, double alpha, const Vec3& center) {
  const Grid3& g = f.grid;
  return wnorm(g, f.psi_hat, alpha, center) + grad_wnorm(g, f.psi_hat, alpha, center) +
         wnorm(g, f.pi_hat, alpha + 1.0, center);
}

double weighted_norm(const PhaseState& y, double alpha, const Vec3& center) {
  return weighted_norm(y.fields, alpha, center) + y.q.norm() + y.p.norm();
}

ModulationTracker::ModulationTracker(std::shared_ptr<const ChargeDensity> rho,
                                     const SolitonParams& guess, ModulationOptions opt)
    : rho_(std::move(rho)), sigma_(guess), opt_(opt) {
  track_.beta = 4.0 + opt_.delta;
}

bool ModulationTracker::observe(double t, const PhaseState& y) {
  if (track_.failure_index) return false;
  try {
    const auto res = project_to_manifold(y, *rho_, sigma_, opt_.projection);
    sigma_ = res.sigma;
    track_.times.push_back(t);
    track_.sigma.push_back(res.sigma);
    track_.residuals.push_back(res.residual / res.y_norm);
    track_.newton_iters.push_back(res.newton_iters);
    track_.Z_norms.push_back(weighted_norm(res.transversal, -track_.beta, res.sigma.b));
    const auto fr = tangent_frame(*rho_, res.sigma.v, y.grid());
    track_.gram.push_back(frame_grams(fr, track_.beta));
    track_.b_inv.push_back(res.sigma.B_inv());
    return true;
  } catch (const Error& e) {
    track_.failure_index = track_.times.size();
    std::ostringstream os;
    os << "t=" << t << ": " << e.what();
    track_.failure = os.str();
    return false;
  }
}

ModulationTrack ModulationTracker::finish() {
  ModulationTrack& tr = track_;
  const std::size_t n = tr.times.size();
  tr.c.assign(n, Vec3::Zero());
  tr.cdot.assign(n, Vec3::Zero());
  tr.vdot.assign(n, Vec3::Zero());
  tr.T_norms.assign(n, 0.0);
  if (n == 0) return tr;
  Vec3 integral = Vec3::Zero();
  tr.c[0] = tr.sigma[0].b;
  for (std::size_t i = 1; i < n; ++i) {
    integral += 0.5 * (tr.times[i] - tr.times[i - 1]) * (tr.sigma[i].v + tr.sigma[i - 1].v);
    tr.c[i] = tr.sigma[i].b - integral;
  }
  if (n < 2) return tr;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1;
    const std::size_t b = i + 1 == n ? n - 1 : i + 1;
    const double dt = tr.times[b] - tr.times[a];
    tr.cdot[i] = (tr.c[b] - tr.c[a]) / dt;
    tr.vdot[i] = (tr.sigma[b].v - tr.sigma[a].v) / dt;
  }
  for (std::size_t i = 0; i < n; ++i) {
    Vec6 a;
    a << tr.cdot[i], tr.vdot[i];
    double s = 0.0;
    for (const auto& G : tr.gram[i]) s += std::sqrt(std::max(0.0, a.dot(G * a)));
    tr.T_norms[i] = s + tr.cdot[i].norm() + (tr.b_inv[i] * tr.vdot[i]).norm();
  }
  return tr;
}

ModulationTrack extract_modulation(const Trajectory& traj, std::shared_ptr<const ChargeDensity> rho,
                                   const SolitonParams& guess, ModulationOptions opt) {
  if (traj.states.size() != traj.times.size())
    throw Error(ErrorKind::Argument, "diagnostics", "trajectory without stored states");
  ModulationTracker tracker(std::move(rho), guess, opt);
  for (std::size_t i = 0; i < traj.states.size(); ++i)
    if (!tracker.observe(traj.times[i], traj.states[i])) break;
  return tracker.finish();
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& value, double t0,
                   double t1) {
  if (t.size() != value.size())
    throw Error(ErrorKind::Argument, "diagnostics", "series length mismatch");
  if (!(t0 > 0.0) || !(t1 > t0)) throw Error(ErrorKind::Argument, "diagnostics", "empty window");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t0 || t[i] > t1) continue;
    if (!(value[i] > 0.0)) {
      std::ostringstream os;
      os << "nonpositive value " << value[i] << " at t=" << t[i];
      throw Error(ErrorKind::Argument, "diagnostics", os.str());
    }
    lx.push_back(std::log(t[i]));
    ly.push_back(std::log(value[i]));
  }
  if (lx.size() < 10) throw Error(ErrorKind::Argument, "diagnostics", "fewer than 10 samples in window");
  Eigen::MatrixXd A(lx.size(), 2);
  Eigen::VectorXd y(lx.size());
  for (std::size_t i = 0; i < lx.size(); ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = lx[i];
    y[i] = ly[i];
  }
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(y);
  DecayFit f;
  f.exponent = c[1];
  f.prefactor = std::exp(c[0]);
  f.t0 = t0;
  f.t1 = t1;
  f.samples = static_cast<int>(lx.size());
  f.residual = std::sqrt((A * c - y).squaredNorm() / lx.size());
  return f;
}

MajorantDrift majorant_and_drift(const ModulationTrack& track, double delta, double t1) {
  MajorantDrift out;
  double m = 0.0;
  for (std::size_t i = 0; i < track.times.size(); ++i) {
    m = std::max(m, std::pow(1.0 + track.times[i], 1.0 + delta) * track.Z_norms[i]);
    out.m.push_back(m);
  }
  if (track.times.empty() || track.cdot.size() != track.times.size()) return out;
  std::size_t i1 = 0;
  while (i1 + 1 < track.times.size() && track.times[i1 + 1] <= t1) ++i1;
  const Vec3 v1 = track.sigma[i1].v;
  auto integrand = [&](std::size_t i) -> Vec3 { return track.cdot[i] + track.sigma[i].v - v1; };
  out.t_d1.assign(i1 + 1, 0.0);
  out.d1.assign(i1 + 1, Vec3::Zero());
  out.t_d1[i1] = track.times[i1];
  for (std::size_t k = i1; k-- > 0;) {
    out.t_d1[k] = track.times[k];
    out.d1[k] = out.d1[k + 1] -
                0.5 * (track.times[k + 1] - track.times[k]) * (integrand(k) + integrand(k + 1));
  }
  double dmax = 0.0;
  for (const auto& d : out.d1) dmax = std::max(dmax, d.norm());
  const double mt1 = out.m[i1];
  out.ratio = mt1 > 0.0 ? dmax / (mt1 * mt1) : 0.0;
  return out;
}

ScatteringTracker::ScatteringTracker(std::shared_ptr<const ChargeDensity> rho)
    : rho_(std::move(rho)) {
  rep_.psi_plus = FieldPair::zero(rho_->grid);
}

void ScatteringTracker::observe(double t, const PhaseState& y) {
  const Vec3 v = velocity_of(y.p);
  FieldPair z = y.fields;
  z -= translate(soliton_field(*rho_, v, y.grid()), y.q);
  rep_.times.push_back(t);
  rep_.z_norms.push_back(f_norm(z));
  FieldPair psi = wave_group(z, -t, Vec3::Zero(), 0.0, false);
  if (have_prev_) {
    FieldPair d = psi;
    d -= rep_.psi_plus;
    rep_.cauchy.push_back(f_norm(d));
  }
  rep_.psi_plus = std::move(psi);
  have_prev_ = true;
}

ScatteringReport ScatteringTracker::finish(const std::vector<ParticleSample>& particle) {
  if (particle.empty()) return rep_;
  const std::size_t start = particle.size() - std::max<std::size_t>(1, particle.size() / 4);
  Vec3 mean = Vec3::Zero();
  for (std::size_t i = start; i < particle.size(); ++i) mean += particle[i].qdot;
  const double cnt = static_cast<double>(particle.size() - start);
  rep_.v_plus = mean / cnt;
  double dev = 0.0;
  Vec3 a = Vec3::Zero();
  for (std::size_t i = start; i < particle.size(); ++i) {
    dev = std::max(dev, (particle[i].qdot - rep_.v_plus).norm());
    a += particle[i].q - rep_.v_plus * particle[i].t;
  }
  rep_.a_plus = a / cnt;
  const double scale = rep_.v_plus.norm();
  rep_.qdot_variation = scale > 0.0 ? dev / scale : dev;
  rep_.settled = rep_.qdot_variation <= 0.1;
  if (!rep_.settled) {
    std::ostringstream os;
    os << "qdot not settled: relative variation " << rep_.qdot_variation << " in the last quarter";
    rep_.note = os.str();
  }
  return rep_;
}

ScatteringReport scattering_state(const Trajectory& traj, std::shared_ptr<const ChargeDensity> rho) {
  if (traj.states.size() != traj.times.size())
    throw Error(ErrorKind::Argument, "diagnostics", "trajectory without stored states");
  ScatteringTracker tracker(std::move(rho));
  for (std::size_t i = 0; i < traj.states.size(); ++i) tracker.observe(traj.times[i], traj.states[i]);
  return tracker.finish(traj.particle);
}

std::vector<double> qdot_deviation(const std::vector<ParticleSample>& particle, const Vec3& v_plus) {
  std::vector<double> out;
  out.reserve(particle.size());
  for (const auto& s : particle) out.push_back((s.qdot - v_plus).norm());
  return out;
}

}  // namespace wp
