#pragma once

#include "spinsens/bloch_embedding.hpp"
#include "spinsens/sensitivity_engine.hpp"
#include "spinsens/types.hpp"

namespace spinsens {

// Geometric factors of one (controller, structure) pair. |zeta| should equal
// f_n * t_f * norm_K * norm_Rs * |sin_phi|.
struct GeometryRecord {
  int controller_index = 0;
  int structure_index = 0;
  double F = 0.0;
  double e = 1.0;
  double zeta = 0.0;
  double f_n = 0.0;
  double t_f = 0.0;
  double norm_K = 0.0;
  double norm_Rs = 0.0;
  double cos_phi = 0.0;
  double sin_phi = 0.0;
  double cos_theta = 0.0;
  double identity_residual = 0.0;
  bool pst = false;
  // F < 1e-12; angles are excluded from statistics.
  bool zero_fidelity = false;
  // R_S = 0 so the angles are undefined.
  bool undefined_angles = false;
};

// R = rf r0^T.
RealMatrix io_operator(const RealVector& rf, const RealVector& r0);

struct Projection {
  RealMatrix Rs;
  double norm_Rs = 0.0;
};

// Orthogonal projection of R onto span{Phi, K}. Throws if ||K|| = 0.
Projection project(const RealMatrix& r, const RealMatrix& phi, const SensitivityOperator& k);

struct Angles {
  double cos_phi = 0.0;
  double sin_phi = 0.0;
  double cos_theta = 0.0;
};

// Scalar form: cos_phi = F / (N ||R_S||), sin_phi = sqrt(1 - cos_phi^2),
// cos_theta = -zeta / (t_f f_n ||K|| ||R_S||). Throws ValidationError when
// norm_Rs is zero. When f_n t_f = 0, `rk` (= <R, K>) supplies cos_theta.
Angles angles(double F, double zeta, int n, double norm_Rs, double norm_K, double f_n,
              double t_f, double rk = 0.0);

double identity_residual(const GeometryRecord& rec);

// Builds the full record. zeta comes from the sensitivity engine; every other
// field is derived from Phi, K and R by matrix inner products, with sin_phi
// taken from the component of R_S orthogonal to Phi.
GeometryRecord evaluate_geometry(const BlochSystem& sys, const RealMatrix& phi,
                                 const SensitivityOperator& k, double zeta, double f_n,
                                 double pst_tol = 1e-12);

// ||rf - Phi r0|| <= tol.
bool pst_check(const RealMatrix& phi, const RealVector& r0, const RealVector& rf, double tol);

}  // namespace spinsens
