#include "wavepart/spectral.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "quadrature.hpp"
#include "wavepart/dynamics.hpp"
#include "wavepart/error.hpp"
#include "wavepart/kernels.hpp"

namespace wp {

namespace {

constexpr double kPi = std::numbers::pi;

void require_speed(const Vec3& v) { require_subluminal(v, "spectral"); }

// rho^ continued to complex |k|
cplx rho_hat_c(const ChargeDensity& rho, cplx k) {
  const cplx k2 = k * k;
  cplx s = 0.0, pw = 1.0;
  for (double c : rho.laplacian_coeffs) {
    s += c * pw;
    pw *= -k2;
  }
  const double w = rho.base_width;
  return rho.amplitude * w * w * w * std::exp(-0.5 * w * w * k2) * s;
}

// k^4 rho^(k)^2: the radial numerator shared by K, H and the residues
cplx numerator(const ChargeDensity& rho, cplx k) {
  const cplx r = rho_hat_c(rho, k);
  const cplx k2 = k * k;
  return k2 * k2 * r * r;
}

struct Nodes {
  detail::Rule c;
  detail::Rule k;
  double k_cut;
  std::vector<Mat3> ang;  // int dphi n n^T at each c node
};

Nodes make_nodes(const ChargeDensity& rho, int c_panels, double k_panel, int phi_points,
                 const SpectralOptions& opt) {
  Nodes nd;
  nd.c = detail::composite_gl(-1.0, 1.0, c_panels);
  nd.k_cut = opt.k_cut / rho.base_width;
  const int kp = static_cast<int>(std::ceil(opt.k_cut / k_panel));
  nd.k = detail::composite_gl(0.0, nd.k_cut, kp);
  for (double c : nd.c.x) {
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    Mat3 a = Mat3::Zero();
    for (int m = 0; m < phi_points; ++m) {
      const double phi = 2.0 * kPi * m / phi_points;
      const Vec3 n(c, s * std::cos(phi), s * std::sin(phi));
      a += (2.0 * kPi / phi_points) * n * n.transpose();
    }
    nd.ang.push_back(a);
  }
  return nd;
}

// int_0^kc N(k) / (k - z) dk; `side` is the sign of Im z in the on-axis limit
// (0: z genuinely off the real axis). Adds the Plemelj residue to *residue.
cplx cauchy(const ChargeDensity& rho, const Nodes& nd, cplx z, int side, bool subtract,
            cplx* residue) {
  cplx acc = 0.0;
  if (!subtract) {
    for (std::size_t i = 0; i < nd.k.x.size(); ++i)
      acc += nd.k.w[i] * numerator(rho, nd.k.x[i]) / (nd.k.x[i] - z);
    return acc;
  }
  const cplx nz = numerator(rho, z);
  for (std::size_t i = 0; i < nd.k.x.size(); ++i)
    acc += nd.k.w[i] * (numerator(rho, nd.k.x[i]) - nz) / (nd.k.x[i] - z);
  const double kc = nd.k_cut;
  if (side == 0) return acc + nz * (std::log(kc - z) - std::log(-z));
  const double x0 = z.real();
  cplx logs = std::log(std::abs(kc - x0)) - std::log(std::abs(x0));
  if (x0 > 0.0 && x0 < kc) {
    // 1/(k - x0 -+ i0) = PV +- i pi delta
    const cplx res = cplx(0.0, kPi * side) * nz;
    if (residue) *residue += res;
    logs += cplx(0.0, kPi * side);
  }
  return acc + nz * logs;
}

struct Radial {
  cplx value;    // int_0^kc k^4 rho^2 / (a k^2 + 2 i lambda v c k + lambda^2) dk
  cplx residue;  // part of value coming from the Plemelj delta terms
};

Radial radial(const ChargeDensity& rho, const Nodes& nd, double speed, double c, cplx lambda,
              bool axis) {
  const double a = 1.0 - speed * speed * c * c;
  Radial out{0.0, 0.0};
  if (lambda == 0.0) {
    for (std::size_t i = 0; i < nd.k.x.size(); ++i) {
      const double k = nd.k.x[i];
      out.value += nd.k.w[i] * numerator(rho, k) / (a * k * k);
    }
    return out;
  }
  const cplx zp = cplx(0.0, 1.0) * lambda * (1.0 - speed * c) / a;
  const cplx zm = cplx(0.0, 1.0) * lambda * (-1.0 - speed * c) / a;
  auto near = [&](cplx z) {
    return std::abs(z.imag()) < 0.5 && z.real() > -0.5 && z.real() < nd.k_cut + 0.5;
  };
  const bool split = axis || (std::abs(lambda) >= 0.05 && (near(zp) || near(zm)));
  if (!split) {
    for (std::size_t i = 0; i < nd.k.x.size(); ++i) {
      const double k = nd.k.x[i];
      const cplx lk = lambda + cplx(0.0, speed * c * k);
      out.value += nd.k.w[i] * numerator(rho, k) / (k * k + lk * lk);
    }
    return out;
  }
  // 1 / (a (k - z+)(k - z-)) = [1/(k - z+) - 1/(k - z-)] / (2 i lambda)
  const int sp = axis ? (1.0 - speed * c > 0 ? 1 : -1) : 0;
  const int sm = axis ? (-1.0 - speed * c > 0 ? 1 : -1) : 0;
  cplx rp = 0.0, rm = 0.0;
  const cplx jp = cauchy(rho, nd, zp, sp, axis || near(zp), &rp);
  const cplx jm = cauchy(rho, nd, zm, sm, axis || near(zm), &rm);
  const cplx pref = 1.0 / (2.0 * cplx(0.0, 1.0) * lambda);
  out.value = pref * (jp - jm);
  out.residue = pref * (rp - rm);
  return out;
}

struct Assembled {
  Mat3c H = Mat3c::Zero();
  Vec3 im_surface = Vec3::Zero();
};

Assembled assemble(const ChargeDensity& rho, const Nodes& nd, double speed, cplx lambda,
                   bool axis) {
  Assembled out;
  for (std::size_t i = 0; i < nd.c.x.size(); ++i) {
    const Radial r = radial(rho, nd, speed, nd.c.x[i], lambda, axis);
    out.H += (nd.c.w[i] * r.value) * nd.ang[i].cast<cplx>();
    const Vec3 d = nd.ang[i].diagonal();
    out.im_surface += nd.c.w[i] * r.residue.imag() * d;
  }
  return out;
}

double max_rel_diag_change(const Mat3c& a, const Mat3c& b) {
  double m = 0.0;
  for (int j = 0; j < 3; ++j) {
    const double s = std::max(std::abs(a(j, j)), std::abs(b(j, j)));
    if (s > 0.0) m = std::max(m, std::abs(a(j, j) - b(j, j)) / s);
  }
  return m;
}

double offdiag_ratio(const Mat3c& h) {
  double off = 0.0, diag = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j)
        diag = std::max(diag, std::abs(h(i, j)));
      else
        off = std::max(off, std::abs(h(i, j)));
    }
  return diag > 0.0 ? off / diag : 0.0;
}

// two evaluations (base and refined); returns the refined one
Assembled converged(const ChargeDensity& rho, double speed, cplx lambda, bool axis,
                    const SpectralOptions& opt, double* change) {
  const Nodes coarse = make_nodes(rho, opt.c_panels, opt.k_panel, opt.phi_points, opt);
  const Nodes fine = make_nodes(rho, static_cast<int>(std::ceil(opt.c_panels * opt.refine)),
                                opt.k_panel / opt.refine, opt.phi_points, opt);
  const Assembled a = assemble(rho, coarse, speed, lambda, axis);
  const Assembled b = assemble(rho, fine, speed, lambda, axis);
  *change = max_rel_diag_change(a.H, b.H);
  if (*change > opt.conv_tol) {
    std::ostringstream os;
    os << "quadrature not converged at lambda=" << lambda << ": relative change " << *change;
    throw Error(ErrorKind::Accuracy, "spectral", os.str());
  }
  return b;
}

Vec3 b_diag(double speed) {
  const double nu = std::sqrt(1.0 - speed * speed);
  return {nu * nu * nu, nu, nu};
}

void fill(SpectralEval& se, const ChargeDensity& rho, const Vec3& v, cplx lambda,
          const SpectralOptions& opt) {
  se.v = v;
  se.speed = v.norm();
  se.rotation = velocity_frame(v);
  se.lambda = lambda;
  se.b = b_diag(se.speed);
  double dummy = 0.0;
  se.K = converged(rho, se.speed, 0.0, false, opt, &dummy).H.real();
  se.F = se.H - se.K.cast<cplx>();
  se.offdiag_rel = std::max(offdiag_ratio(se.H), offdiag_ratio(se.K.cast<cplx>()));
  if (se.offdiag_rel > opt.diag_tol) {
    std::ostringstream os;
    os << "H/K not diagonal: off-diagonal ratio " << se.offdiag_rel;
    throw Error(ErrorKind::Accuracy, "spectral", os.str());
  }
  const Mat3c I = Mat3c::Identity();
  const Mat3c B = se.b.cast<cplx>().asDiagonal();
  se.M.setZero();
  se.M.block<3, 3>(0, 0) = lambda * I;
  se.M.block<3, 3>(0, 3) = -B;
  se.M.block<3, 3>(3, 0) = -se.F;
  se.M.block<3, 3>(3, 3) = lambda * I;
  se.detM = se.M.determinant();
  const cplx l2 = lambda * lambda;
  se.detM_closed = (l2 - se.b[0] * se.f1()) * (l2 - se.b[1] * se.f()) * (l2 - se.b[1] * se.f());
  se.r0 = r_at_zero(rho, v, opt);
}

}  // namespace

GreenParams green_params(cplx lambda, const Vec3& v) {
  require_speed(v);
  const double gamma = 1.0 / std::sqrt(1.0 - v.squaredNorm());
  return {gamma * lambda, gamma * v.norm() * lambda};
}

cplx g_lambda(cplx lambda, const Vec3& y, const Vec3& v) {
  if (!(lambda.real() > 0.0))
    throw Error(ErrorKind::Domain, "spectral", "g_lambda needs Re lambda > 0");
  if (y.norm() == 0.0) throw Error(ErrorKind::Singularity, "spectral", "g_lambda at y = 0");
  const auto gp = green_params(lambda, v);
  const double gamma = 1.0 / std::sqrt(1.0 - v.squaredNorm());
  const Vec3 e = velocity_frame(v).col(0);
  const double y1 = y.dot(e);
  const double perp2 = (y - y1 * e).squaredNorm();
  const double yt1 = gamma * y1;
  const double yt = std::sqrt(yt1 * yt1 + perp2);
  return gamma * std::exp(-gp.kappa * yt - gp.kappa1 * yt1) / (4.0 * kPi * yt);
}

Mat3 velocity_frame(const Vec3& v) {
  const double s = v.norm();
  if (s == 0.0) return Mat3::Identity();
  const Vec3 e1 = v / s;
  Vec3 t = std::abs(e1.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 e2 = (t - t.dot(e1) * e1).normalized();
  const Vec3 e3 = e1.cross(e2);
  Mat3 r;
  r.col(0) = e1;
  r.col(1) = e2;
  r.col(2) = e3;
  return r;
}

Vec3 r_at_zero(const ChargeDensity& rho, const Vec3& v, const SpectralOptions& opt) {
  require_speed(v);
  const double s = v.norm();
  const Nodes nd = make_nodes(rho, opt.c_panels, opt.k_panel, opt.phi_points, opt);
  double rad = 0.0;
  for (std::size_t i = 0; i < nd.k.x.size(); ++i) {
    const double r = rho_hat_c(rho, nd.k.x[i]).real();
    rad += nd.k.w[i] * r * r;
  }
  Vec3 out = Vec3::Zero();
  for (std::size_t i = 0; i < nd.c.x.size(); ++i) {
    const double c = nd.c.x[i];
    const double a = 1.0 - s * s * c * c;
    out += nd.c.w[i] * (1.0 + 3.0 * s * s * c * c) / (a * a * a) * nd.ang[i].diagonal();
  }
  return -rad * out;
}

SpectralEval kh_matrices(const ChargeDensity& rho, const Vec3& v, cplx lambda,
                         const SpectralOptions& opt) {
  require_speed(v);
  if (!(lambda.real() > 0.0))
    throw Error(ErrorKind::Domain, "spectral", "kh_matrices needs Re lambda > 0");
  SpectralEval se;
  se.H = converged(rho, v.norm(), lambda, false, opt, &se.refine_change).H;
  fill(se, rho, v, lambda, opt);
  return se;
}

SpectralEval on_axis(const ChargeDensity& rho, const Vec3& v, double omega,
                     const SpectralOptions& opt) {
  require_speed(v);
  if (omega == 0.0) throw Error(ErrorKind::Domain, "spectral", "on_axis needs omega != 0");
  SpectralEval se;
  const Assembled a = converged(rho, v.norm(), cplx(0.0, omega), true, opt, &se.refine_change);
  se.H = a.H;
  se.imH_surface = a.im_surface;
  se.on_axis = true;
  se.omega = omega;
  fill(se, rho, v, cplx(0.0, omega), opt);
  return se;
}

SpectralEval inverse_blocks(SpectralEval se, double omega) {
  const Vec3& b = se.b;
  se.omega = omega;
  for (int j = 0; j < 3; ++j)
    se.r[j] = omega == 0.0 ? cplx(se.r0[j]) : -se.F(j, j) / (omega * omega);
  se.L11.setZero();
  se.L12.setZero();
  se.L21.setZero();
  for (int j = 0; j < 3; ++j) {
    const cplx den = 1.0 - b[j] * se.r[j];
    if (std::abs(den) < 1e-14) {
      std::ostringstream os;
      os << "1 - b_" << j + 1 << " r_" << j + 1 << "(" << omega << ") vanishes";
      throw Error(ErrorKind::Pole, "spectral", os.str());
    }
    se.L11(j, j) = cplx(0.0, -1.0) / den;
    se.L12(j, j) = -b[j] / den;
    se.L21(j, j) = se.r[j] / den;
  }
  se.L22 = se.L11;
  se.Linv.setZero();
  if (omega != 0.0) {
    se.Linv.block<3, 3>(0, 0) = se.L11 / omega;
    se.Linv.block<3, 3>(0, 3) = se.L12 / (omega * omega);
    se.Linv.block<3, 3>(3, 0) = se.L21;
    se.Linv.block<3, 3>(3, 3) = se.L22 / omega;
  }
  return se;
}

namespace {

// U(t) = int_0^|t| s rho(s) ds in closed form (rho = A Q(s/w) e^{-s^2/2w^2}, Q even)
double u_primitive(const ChargeDensity& rho, double t) {
  const double w = rho.base_width;
  const double T = std::abs(t) / w;
  const double h = 0.5 * T * T;
  const double e = std::exp(-h);
  double acc = 0.0;
  for (std::size_t i = 0; i < rho.radial_poly.size(); i += 2) {
    const double c = rho.radial_poly[i];
    if (c == 0.0) continue;
    const int m = static_cast<int>(i / 2);
    // int_0^T u^{2m+1} e^{-u^2/2} du = 2^m m! (1 - e^{-h} sum_{l<=m} h^l / l!)
    double partial = 0.0, term = 1.0, fact = 1.0;
    for (int l = 0; l <= m; ++l) {
      if (l > 0) {
        term *= h / l;
        fact *= 2.0 * l;
      }
      partial += term;
    }
    acc += c * fact * (1.0 - e * partial);
  }
  return rho.amplitude * w * w * acc;
}

}  // namespace

Vec3c h_convolution(const ChargeDensity& rho, const Vec3& v, cplx lambda, int r_panels,
                    int c_panels) {
  require_speed(v);
  if (!(lambda.real() > 0.0))
    throw Error(ErrorKind::Domain, "spectral", "h_convolution needs Re lambda > 0");
  const double speed = v.norm();
  const double gamma = 1.0 / std::sqrt(1.0 - speed * speed);
  const auto gp = green_params(lambda, v);

  // support of rho at double precision
  double peak = 0.0, supp = 0.0;
  const double dr = rho.base_width / 50.0;
  for (int s = 0; s < 4000; ++s) peak = std::max(peak, std::abs(rho.profile(s * dr)));
  for (int s = 3999; s >= 0; --s)
    if (std::abs(rho.profile(s * dr)) > 1e-18 * peak) {
      supp = (s + 1) * dr;
      break;
    }
  const auto sr = detail::composite_gl(-supp, supp, 2 * r_panels);
  auto u = [&](double s) { return s * rho.profile(std::abs(s)); };
  auto du = [&](double s) {
    const double a = std::abs(s);
    return rho.profile(a) + a * rho.profile_derivative(a);
  };
  auto U = [&](double s) { return u_primitive(rho, s); };

  const double rmax = 2.0 * supp;
  const auto rr = detail::composite_gl(0.0, rmax, r_panels);
  const auto cc = detail::composite_gl(-1.0, 1.0, c_panels);
  Vec3c out = Vec3c::Zero();
  for (std::size_t ir = 0; ir < rr.x.size(); ++ir) {
    const double r = rr.x[ir];
    double J = 0.0, J1 = 0.0, J2 = 0.0;
    for (std::size_t is = 0; is < sr.x.size(); ++is) {
      const double s = sr.x[is];
      const double us = u(s);
      if (us == 0.0) continue;
      J += sr.w[is] * us * U(r + s);
      J1 += sr.w[is] * us * u(r + s);
      J2 += sr.w[is] * us * du(r + s);
    }
    const double R1 = 2.0 * kPi * (J1 / r - J / (r * r));
    const double R2 = 2.0 * kPi * (J2 / r - 2.0 * J1 / (r * r) + 2.0 * J / (r * r * r));
    for (std::size_t ic = 0; ic < cc.x.size(); ++ic) {
      const double c = cc.x[ic];
      const double yt1 = gamma * r * c;
      const double yt = r * std::sqrt(gamma * gamma * c * c + 1.0 - c * c);
      const cplx g = gamma * std::exp(-gp.kappa * yt - gp.kappa1 * yt1) / (4.0 * kPi * yt);
      // phi-integrated n_j^2 and 1 - n_j^2
      const double n1 = 2.0 * kPi * c * c, n2 = kPi * (1.0 - c * c);
      const double full = 2.0 * kPi;
      const double w = rr.w[ir] * cc.w[ic] * r * r;
      out[0] += -w * g * (R2 * n1 + R1 / r * (full - n1));
      out[1] += -w * g * (R2 * n2 + R1 / r * (full - n2));
    }
  }
  out[2] = out[1];
  return out;
}

namespace {

Vec3c phi_at(const ChargeDensity& rho, const Vec3& v, const SpectralData& psi0,
             const SpectralData& pi0, cplx lambda) {
  const auto& g = rho.grid;
  const int n = g.n();
  Vec3c acc = kernels::reduce_planes(g, Vec3c(Vec3c::Zero()), [&](int i) {
    Vec3c a = Vec3c::Zero();
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const double k2 = g.k2(i, j, l);
        if (k2 == 0.0) continue;
        const std::size_t m = g.index(i, j, l);
        const Vec3 kd = g.kd(i, j, l);
        const cplx ikv(0.0, kd.dot(v));
        const cplx d = k2 + (ikv + lambda) * (ikv + lambda);
        const cplx num = ((ikv + lambda) * psi0[m] + pi0[m]) * std::conj(rho.rho_hat[m]) / d;
        a += cplx(0.0, 1.0) * num * kd.cast<cplx>();
      }
    return a;
  });
  return acc * g.mode_volume();
}

}  // namespace

PhiEval phi_eval(const ChargeDensity& rho, const Vec3& v, const SpectralData& psi0_hat,
                 const SpectralData& pi0_hat, const std::vector<cplx>& lambdas) {
  require_speed(v);
  const auto& g = rho.grid;
  if (psi0_hat.size() != g.size() || pi0_hat.size() != g.size())
    throw Error(ErrorKind::Argument, "spectral", "perturbation size does not match the grid");
  PhiEval pe;
  pe.lambdas = lambdas;
  for (cplx l : lambdas) {
    if (!(l.real() > 0.0)) throw Error(ErrorKind::Domain, "spectral", "phi needs Re lambda > 0");
    pe.phi_at.push_back(phi_at(rho, v, psi0_hat, pi0_hat, l));
  }
  const int n = g.n();
  struct Acc {
    Vec3c a = Vec3c::Zero(), b = Vec3c::Zero();
    Acc& operator+=(const Acc& o) {
      a += o.a;
      b += o.b;
      return *this;
    }
  };
  const Acc s = kernels::reduce_planes(g, Acc{}, [&](int i) {
    Acc acc;
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const double k2 = g.k2(i, j, l);
        if (k2 == 0.0) continue;
        const std::size_t m = g.index(i, j, l);
        const Vec3 kd = g.kd(i, j, l);
        const double kv = kd.dot(v);
        const double d0 = k2 - kv * kv;
        const cplx r = std::conj(rho.rho_hat[m]);
        const cplx ikv(0.0, kv);
        acc.a += cplx(0.0, 1.0) * ((ikv * psi0_hat[m] + pi0_hat[m]) * r / d0) * kd.cast<cplx>();
        acc.b += (((k2 + kv * kv) * cplx(0.0, 1.0) * psi0_hat[m] + 2.0 * kv * pi0_hat[m]) * r /
                  (d0 * d0)) *
                 kd.cast<cplx>();
      }
    return acc;
  });
  const double dv = g.mode_volume();
  pe.phi0 = s.a.real() * dv;
  pe.phi_prime0 = s.b.real() * dv;
  pe.imag_residual = std::max(s.a.imag().cwiseAbs().maxCoeff(), s.b.imag().cwiseAbs().maxCoeff()) * dv;
  return pe;
}

Vec3c phi_time_domain(const ChargeDensity& rho, const Vec3& v, const SpectralData& psi0_hat,
                      const SpectralData& pi0_hat, cplx lambda, int t_panels) {
  require_speed(v);
  if (!(lambda.real() > 0.0)) throw Error(ErrorKind::Domain, "spectral", "phi needs Re lambda > 0");
  const auto& g = rho.grid;
  const FieldPair f0{g, psi0_hat, pi0_hat};
  const double r0 = support_radius(f0);
  const double t_wrap = (g.box_length() - r0 - rho.effective_radius) / (1.0 + v.norm());
  if (!(t_wrap > 0.0))
    throw Error(ErrorKind::Wrap, "spectral", "box too small for the time-domain route");
  const double T = std::min(t_wrap, 30.0 / lambda.real());
  const auto tr = detail::composite_gl(0.0, T, t_panels);
  const int n = g.n();
  Vec3c acc = Vec3c::Zero();
  for (std::size_t it = 0; it < tr.x.size(); ++it) {
    const FieldPair f = wave_group(f0, tr.x[it], v, r0, false);
    // <psi(t), grad rho> = sum psi^ conj(-i kd rho^)
    const Vec3 val = kernels::reduce_planes(g, Vec3(Vec3::Zero()), [&](int i) {
      Vec3 a = Vec3::Zero();
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          const std::size_t m = g.index(i, j, l);
          const cplx z = f.psi_hat[m] * std::conj(cplx(0.0, -1.0) * rho.rho_hat[m]);
          a += z.real() * g.kd(i, j, l);
        }
      return a;
    });
    acc += tr.w[it] * std::exp(-lambda * tr.x[it]) * (val * g.mode_volume()).cast<cplx>();
  }
  return acc;
}

}  // namespace wp
