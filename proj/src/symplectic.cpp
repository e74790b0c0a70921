#include "wavepart/symplectic.hpp"

#include <sstream>

#include "wavepart/error.hpp"
#include "wavepart/kernels.hpp"

namespace wp {

double symplectic_form_fields(const FieldPair& a, const FieldPair& b) {
  require_same_grid(a.grid, b.grid, "symplectic");
  return kernels::omp::inner(a.grid, a.psi_hat, b.pi_hat) -
         kernels::omp::inner(a.grid, a.pi_hat, b.psi_hat);
}

double symplectic_form(const PhaseState& y1, const PhaseState& y2) {
  return symplectic_form_fields(y1.fields, y2.fields) + y1.q.dot(y2.p) - y1.p.dot(y2.q);
}

OmegaMatrix omega_matrix(const TangentFrame& frame, double degeneracy_floor) {
  OmegaMatrix om;
  om.v = frame.v;
  for (int l = 0; l < 6; ++l)
    for (int j = 0; j < 6; ++j) om.entries(l, j) = symplectic_form(frame.tau[l], frame.tau[j]);
  const double scale = om.entries.cwiseAbs().maxCoeff();
  const double asym = (om.entries + om.entries.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    std::ostringstream os;
    os << "Omega(v) antisymmetry violated: " << asym / scale;
    throw Error(ErrorKind::Accuracy, "symplectic", os.str());
  }
  om.det = om.entries.determinant();
  if (!(std::abs(om.det) > degeneracy_floor)) {
    std::ostringstream os;
    os << "det Omega(v) = " << om.det << " below floor " << degeneracy_floor;
    throw Error(ErrorKind::Degeneracy, "symplectic", os.str());
  }
  return om;
}

Vec6 tangent_coefficients(const PhaseState& z, const TangentFrame& frame,
                          const OmegaMatrix& omega) {
  Vec6 rhs;
  for (int l = 0; l < 6; ++l) rhs[l] = symplectic_form(z, frame.tau[l]);
  // sum_j c_j Omega(tau_j, tau_l) = Omega(Z, tau_l)
  Eigen::FullPivLU<Mat6> lu(omega.entries.transpose());
  if (!lu.isInvertible())
    throw Error(ErrorKind::Degeneracy, "symplectic", "Omega(v) is singular");
  return lu.solve(rhs);
}

PhaseState project_transversal(const PhaseState& z, const TangentFrame& frame,
                               const OmegaMatrix& omega) {
  const Vec6 c = tangent_coefficients(z, frame, omega);
  PhaseState out = z;
  for (int j = 0; j < 6; ++j) out.axpy(-c[j], frame.tau[j]);
  return out;
}

namespace {

// Omega(Z, T_b tau_j(v)) for all j, evaluated with the fields of Z shifted
// back by b so the frame can stay centered at the origin.
Vec6 frame_pairing(const PhaseState& z_centered, const TangentFrame& frame) {
  Vec6 g;
  for (int j = 0; j < 6; ++j) g[j] = symplectic_form(z_centered, frame.tau[j]);
  return g;
}

PhaseState center_fields(const PhaseState& z, const Vec3& b) {
  return {translate(z.fields, -b), z.q, z.p};
}

}  // namespace

ProjectionResult project_to_manifold(const PhaseState& y, const ChargeDensity& rho,
                                     const SolitonParams& sigma_guess,
                                     const ProjectionOptions& opt) {
  require_subluminal(sigma_guess.v, "symplectic");
  if (sigma_guess.v.norm() >= opt.v_cap)
    throw Error(ErrorKind::Domain, "symplectic", "initial velocity at or above v_cap");

  ProjectionResult res{sigma_guess, PhaseState::zero(y.grid())};
  res.y_norm = state_norm(y);
  const double target = opt.tol * res.y_norm;

  for (int it = 0;; ++it) {
    const auto frame = tangent_frame(rho, res.sigma.v, y.grid());
    const auto s = soliton_state(rho, res.sigma, y.grid());
    PhaseState z = y - s;
    const PhaseState zc = center_fields(z, res.sigma.b);
    const Vec6 g = frame_pairing(zc, frame);
    res.residual = g.cwiseAbs().maxCoeff();
    res.newton_iters = it;
    if (res.residual <= target) {
      res.transversal = std::move(z);
      return res;
    }
    if (it >= opt.max_iters) {
      std::ostringstream os;
      os << "projection did not converge in " << opt.max_iters
         << " Newton steps (residual " << res.residual / res.y_norm << " relative)";
      throw Error(ErrorKind::Basin, "symplectic", os.str());
    }

    // J_jl = -Omega(tau_l, tau_j) + Omega(Z, d_l tau_j)
    Mat6 jac;
    for (int l = 0; l < 6; ++l)
      for (int j = 0; j < 6; ++j) jac(j, l) = -symplectic_form(frame.tau[l], frame.tau[j]);
    for (int l = 0; l < 3; ++l) {
      // d_{b_l} T_b tau_j = T_b (-d_l tau_j): shift derivative of the field part
      PhaseState zd = zc;
      zd.q.setZero();
      zd.p.setZero();
      zd.fields.psi_hat = gradient(zd.grid(), zc.fields.psi_hat, l);
      zd.fields.pi_hat = gradient(zd.grid(), zc.fields.pi_hat, l);
      // Omega(Z, -d_l tau) = Omega(d_l Z, tau) by parts
      const Vec6 gb = frame_pairing(zd, frame);
      for (int j = 0; j < 6; ++j) jac(j, l) += gb[j];
    }
    for (int l = 0; l < 3; ++l) {
      const Vec3 dv = opt.fd_step * Vec3::Unit(l);
      const Vec6 gp = frame_pairing(zc, tangent_frame(rho, res.sigma.v + dv, y.grid()));
      const Vec6 gm = frame_pairing(zc, tangent_frame(rho, res.sigma.v - dv, y.grid()));
      jac.col(3 + l) += (gp - gm) / (2.0 * opt.fd_step);
    }

    const Vec6 step = jac.fullPivLu().solve(-g);
    res.sigma.b += step.head<3>();
    res.sigma.v += step.tail<3>();
    if (!(res.sigma.v.norm() < opt.v_cap)) {
      std::ostringstream os;
      os << "Newton iterate reached |v| = " << res.sigma.v.norm() << " >= v_cap " << opt.v_cap;
      throw Error(ErrorKind::Domain, "symplectic", os.str());
    }
  }
}

}  // namespace wp
