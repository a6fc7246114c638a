#include "spinsens/geometry_model.hpp"

#include <cmath>

namespace spinsens {

RealMatrix io_operator(const RealVector& rf, const RealVector& r0) { return rf * r0.transpose(); }

Projection project(const RealMatrix& r, const RealMatrix& phi, const SensitivityOperator& k) {
  if (!(k.norm_K > 0.0)) throw NumericalError("sensitivity operator has zero norm");
  const double n2 = static_cast<double>(phi.rows());  // ||Phi||^2 = N^2 = dim of the Bloch space
  Projection p;
  p.Rs = (hs_inner(r, phi) / n2) * phi + (hs_inner(r, k.K) / (k.norm_K * k.norm_K)) * k.K;
  p.norm_Rs = p.Rs.norm();
  return p;
}

Angles angles(double F, double zeta, int n, double norm_Rs, double norm_K, double f_n,
              double t_f, double rk) {
  if (!(norm_Rs > 0.0)) throw ValidationError("angles undefined for a zero projection");
  Angles a;
  a.cos_phi = F / (n * norm_Rs);
  a.sin_phi = std::sqrt(std::max(0.0, 1.0 - a.cos_phi * a.cos_phi));
  if (f_n * t_f != 0.0) {
    a.cos_theta = -zeta / (t_f * f_n * norm_K * norm_Rs);
  } else {
    a.cos_theta = rk / (norm_K * norm_Rs);
  }
  // Phi and K are orthogonal, so (cos_phi, cos_theta) is a unit vector.
  if (std::abs(a.cos_phi * a.cos_phi + a.cos_theta * a.cos_theta - 1.0) > 1e-8)
    throw NumericalError("angles are inconsistent with an orthogonal Phi/K frame");
  return a;
}

double identity_residual(const GeometryRecord& rec) {
  const double rhs = rec.f_n * rec.t_f * rec.norm_K * rec.norm_Rs * std::abs(rec.sin_phi);
  return std::abs(std::abs(rec.zeta) - rhs);
}

GeometryRecord evaluate_geometry(const BlochSystem& sys, const RealMatrix& phi,
                                 const SensitivityOperator& k, double zeta, double f_n,
                                 double pst_tol) {
  const double n = static_cast<double>(sys.basis->dim);
  GeometryRecord rec;
  const Fidelity fid = fidelity(sys.rf, phi, sys.r0);
  rec.F = fid.fidelity;
  rec.e = fid.error;
  rec.zeta = zeta;
  rec.f_n = f_n;
  rec.t_f = sys.t_f;
  rec.norm_K = k.norm_K;
  rec.zero_fidelity = rec.F < 1e-12;
  rec.pst = pst_check(phi, sys.r0, sys.rf, pst_tol);

  const RealMatrix r = io_operator(sys.rf, sys.r0);
  const Projection p = project(r, phi, k);
  rec.norm_Rs = p.norm_Rs;
  if (!(p.norm_Rs > 0.0)) {
    rec.undefined_angles = true;
    rec.identity_residual = identity_residual(rec);
    return rec;
  }
  const double along_phi = hs_inner(p.Rs, phi) / (n * n);
  rec.cos_phi = along_phi * n / p.norm_Rs;
  rec.sin_phi = (p.Rs - along_phi * phi).norm() / p.norm_Rs;
  if (f_n * sys.t_f != 0.0) {
    rec.cos_theta = -zeta / (sys.t_f * f_n * k.norm_K * p.norm_Rs);
  } else {
    rec.cos_theta = hs_inner(p.Rs, k.K) / (k.norm_K * p.norm_Rs);
  }
  rec.identity_residual = identity_residual(rec);
  return rec;
}

bool pst_check(const RealMatrix& phi, const RealVector& r0, const RealVector& rf, double tol) {
  if (!(tol > 0.0)) throw ValidationError("PST tolerance must be positive");
  return (rf - phi * r0).norm() <= tol;
}

}  // namespace spinsens
