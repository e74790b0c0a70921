#include "wavepart/soliton.hpp"

#include <cmath>
#include <sstream>

#include "wavepart/error.hpp"
#include "wavepart/kernels.hpp"
#include "wavepart/transform.hpp"

namespace wp {

FieldPair FieldPair::zero(const Grid3& grid) {
  return {grid, SpectralData(grid.size()), SpectralData(grid.size())};
}

RealData FieldPair::psi() const { return inverse_real(grid, psi_hat); }
RealData FieldPair::pi() const { return inverse_real(grid, pi_hat); }

FieldPair& FieldPair::operator+=(const FieldPair& o) {
  require_same_grid(grid, o.grid, "soliton");
  for (std::size_t m = 0; m < psi_hat.size(); ++m) {
    psi_hat[m] += o.psi_hat[m];
    pi_hat[m] += o.pi_hat[m];
  }
  return *this;
}

FieldPair& FieldPair::operator-=(const FieldPair& o) {
  require_same_grid(grid, o.grid, "soliton");
  for (std::size_t m = 0; m < psi_hat.size(); ++m) {
    psi_hat[m] -= o.psi_hat[m];
    pi_hat[m] -= o.pi_hat[m];
  }
  return *this;
}

FieldPair& FieldPair::operator*=(double s) {
  for (auto& z : psi_hat) z *= s;
  for (auto& z : pi_hat) z *= s;
  return *this;
}

PhaseState PhaseState::zero(const Grid3& grid) { return {FieldPair::zero(grid)}; }

PhaseState& PhaseState::operator+=(const PhaseState& o) {
  fields += o.fields;
  q += o.q;
  p += o.p;
  return *this;
}

PhaseState& PhaseState::operator-=(const PhaseState& o) {
  fields -= o.fields;
  q -= o.q;
  p -= o.p;
  return *this;
}

PhaseState& PhaseState::operator*=(double s) {
  fields *= s;
  q *= s;
  p *= s;
  return *this;
}

PhaseState& PhaseState::axpy(double s, const PhaseState& o) {
  require_same_grid(grid(), o.grid(), "soliton");
  auto& a = fields;
  for (std::size_t m = 0; m < a.psi_hat.size(); ++m) {
    a.psi_hat[m] += s * o.fields.psi_hat[m];
    a.pi_hat[m] += s * o.fields.pi_hat[m];
  }
  q += s * o.q;
  p += s * o.p;
  return *this;
}

PhaseState operator+(PhaseState a, const PhaseState& b) { return a += b; }
PhaseState operator-(PhaseState a, const PhaseState& b) { return a -= b; }
PhaseState operator*(double s, PhaseState a) { return a *= s; }

double SolitonParams::gamma() const { return 1.0 / std::sqrt(1.0 - v.squaredNorm()); }
double SolitonParams::nu() const { return std::sqrt(1.0 - v.squaredNorm()); }
Vec3 SolitonParams::p() const { return gamma() * v; }
Mat3 SolitonParams::B() const { return nu() * (Mat3::Identity() - v * v.transpose()); }
Mat3 SolitonParams::B_inv() const {
  const double g = gamma();
  return g * (Mat3::Identity() + g * g * v * v.transpose());
}

void require_subluminal(const Vec3& v, const char* module) {
  if (!(v.norm() < 1.0)) {
    std::ostringstream os;
    os << "|v| = " << v.norm() << " must be < 1";
    throw Error(ErrorKind::Domain, module, os.str());
  }
}

namespace {

void require_admissible(const ChargeDensity& rho, const Grid3& grid) {
  require_same_grid(rho.grid, grid, "soliton");
  if (!rho.moments_vanish)
    throw Error(ErrorKind::Singularity, "soliton",
                "rho has non-vanishing moments of order <= 4; k=0 singularity is not removable");
  if (!(grid.box_length() > 2.0 * rho.effective_radius)) {
    std::ostringstream os;
    os << "box length " << grid.box_length() << " must exceed twice the effective radius "
       << rho.effective_radius;
    throw Error(ErrorKind::Argument, "soliton", os.str());
  }
}

template <typename F>
void for_modes(const Grid3& grid, F&& f) {
  const int n = grid.n();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) f(grid.index(i, j, l), grid.kd(i, j, l), grid.k2(i, j, l));
}

}  // namespace

FieldPair soliton_field(const ChargeDensity& rho, const Vec3& v, const Grid3& grid) {
  require_subluminal(v, "soliton");
  require_admissible(rho, grid);
  auto f = FieldPair::zero(grid);
  for_modes(grid, [&](std::size_t m, const Vec3& kd, double k2) {
    if (k2 == 0.0) return;
    const double kv = kd.dot(v);
    const cplx psi = -rho.rho_hat[m] / (k2 - kv * kv);
    f.psi_hat[m] = psi;
    f.pi_hat[m] = cplx(0.0, kv) * psi;
  });
  return f;
}

FieldPair soliton_field(const ChargeDensity& rho, const Vec3& v) {
  return soliton_field(rho, v, rho.grid);
}

FieldPair translate(const FieldPair& f, const Vec3& a) {
  FieldPair out = f;
  kernels::omp::shift_phase(out.grid, out.psi_hat, a);
  kernels::omp::shift_phase(out.grid, out.pi_hat, a);
  return out;
}

PhaseState translate(const PhaseState& y, const Vec3& a) {
  return {translate(y.fields, a), y.q + a, y.p};
}

PhaseState soliton_state(const ChargeDensity& rho, const SolitonParams& sigma,
                         const Grid3& grid) {
  if (sigma.b.norm() > grid.box_length() / 4.0) {
    std::ostringstream os;
    os << "shift |b| = " << sigma.b.norm() << " exceeds L/4; the periodic image is close";
    log_warning("soliton", os.str());
  }
  auto f = soliton_field(rho, sigma.v, grid);
  return {translate(f, sigma.b), sigma.b, sigma.p()};
}

PhaseState soliton_state(const ChargeDensity& rho, const SolitonParams& sigma) {
  return soliton_state(rho, sigma, rho.grid);
}

TangentFrame tangent_frame(const ChargeDensity& rho, const Vec3& v, const Grid3& grid) {
  require_subluminal(v, "soliton");
  require_admissible(rho, grid);
  TangentFrame fr;
  fr.v = v;
  fr.tau.assign(6, PhaseState::zero(grid));
  const cplx I(0.0, 1.0);
  for_modes(grid, [&](std::size_t m, const Vec3& kd, double k2) {
    if (k2 == 0.0) return;
    const double kv = kd.dot(v);
    const double d0 = k2 - kv * kv;
    const cplx r = rho.rho_hat[m];
    const cplx psi = -r / d0;
    const cplx pi = I * kv * psi;
    for (int j = 0; j < 3; ++j) {
      fr.tau[j].fields.psi_hat[m] = I * kd[j] * psi;
      fr.tau[j].fields.pi_hat[m] = I * kd[j] * pi;
      const cplx dpsi = -2.0 * r * kv * kd[j] / (d0 * d0);
      fr.tau[3 + j].fields.psi_hat[m] = dpsi;
      fr.tau[3 + j].fields.pi_hat[m] = I * kd[j] * psi + I * kv * dpsi;
    }
  });
  const Mat3 binv = SolitonParams{Vec3::Zero(), v}.B_inv();
  for (int j = 0; j < 3; ++j) {
    fr.tau[j].q = Vec3::Unit(j);
    fr.tau[3 + j].p = binv.col(j);
  }
  return fr;
}

TangentFrame tangent_frame(const ChargeDensity& rho, const SolitonParams& sigma) {
  auto fr = tangent_frame(rho, sigma.v, rho.grid);
  fr.b = sigma.b;
  if (sigma.b != Vec3::Zero())
    for (auto& t : fr.tau) t.fields = translate(t.fields, sigma.b);
  return fr;
}

SpectralData gradient(const Grid3& grid, const SpectralData& f, int j) {
  SpectralData out(f.size());
  for_modes(grid, [&](std::size_t m, const Vec3& kd, double) {
    out[m] = cplx(0.0, -kd[j]) * f[m];
  });
  return out;
}

double f_norm(const FieldPair& f) {
  const auto& g = f.grid;
  const int n = g.n();
  const double grad = kernels::reduce_planes(g, 0.0, [&](int i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const std::size_t m = g.index(i, j, l);
        acc += g.k2(i, j, l) * std::norm(f.psi_hat[m]);
      }
    return acc;
  });
  const double pi = kernels::omp::inner(g, f.pi_hat, f.pi_hat);
  return std::sqrt(grad * g.mode_volume()) + std::sqrt(pi);
}

double state_norm(const PhaseState& y) {
  const auto& f = y.fields;
  const double psi = kernels::omp::inner(f.grid, f.psi_hat, f.psi_hat);
  return std::sqrt(psi) + f_norm(f) + y.q.norm() + y.p.norm();
}

}  // namespace wp
