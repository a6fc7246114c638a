#pragma once

#include <vector>

#include "spinsens/bloch_embedding.hpp"
#include "spinsens/network_model.hpp"
#include "spinsens/spectral.hpp"
#include "spinsens/types.hpp"

namespace spinsens {

// Eigenvalues closer than this are treated as equal by hadamard_core.
double degeneracy_tolerance(const SpectralData& sd);

// Z (.) X in the eigenbasis of A. Off-diagonal entries use the divided
// difference of exp(i lambda t_f); the evaluation goes through
// exp(i(lk + ll)t/2) * sinc((lk - ll)t/2) so it stays accurate near the
// degeneracy threshold.
ComplexMatrix hadamard_core(const ComplexMatrix& z, const RealVector& lambda, double t_f,
                            double degeneracy_tol);

// K_n = M (Z (.) X) M^dagger, the averaged conjugation of S_n along the
// trajectory: int_0^1 exp(tA(1-s)) S exp(tAs) ds.
struct SensitivityOperator {
  RealMatrix K;
  ComplexMatrix Q;
  double norm_K = 0.0;  // sqrt(sum |q_kl|^2)

  // Phi^T K. Skew-symmetric for any admissible structure.
  RealMatrix w(const RealMatrix& phi) const { return phi.transpose() * K; }
};

SensitivityOperator sensitivity_operator(const SpectralData& sd, const RealMatrix& s_bloch,
                                         double t_f);

// zeta_n = de/d(delta_n) = -t_f f_n rf^T K r0.
double differential_sensitivity(const BlochSystem& sys, const SensitivityOperator& k, double f_n);

// Same derivative contracted in the eigenbasis, -t_f f_n u^dagger Q v with
// u = M^dagger rf, v = M^dagger r0. Never forms K.
double eigenbasis_sensitivity(const SpectralData& sd, const RealMatrix& s_bloch,
                              const RealVector& r0, const RealVector& rf, double t_f, double f_n);

// Gauss-Legendre nodes and weights mapped to [0, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_legendre_unit(int n);

// zeta_n from the integral form, with exp(tA s) from scaling-and-squaring.
// Independent of the spectral route. The propagated end-point vectors are
// cached so one instance serves every structure of a controller.
class QuadratureOracle {
 public:
  QuadratureOracle(const RealMatrix& a, double t_f, const RealVector& r0, const RealVector& rf,
                   int nodes = 64);

  double zeta(const RealMatrix& s_bloch, double f_n) const;

 private:
  double t_f_;
  std::vector<double> weights_;
  std::vector<RealVector> forward_;   // exp(t A s_i) r0
  std::vector<RealVector> backward_;  // exp(t A (1 - s_i))^T rf
};

double quadrature_oracle(const RealMatrix& a, const RealMatrix& s_bloch, double t_f,
                         const RealVector& r0, const RealVector& rf, double f_n, int nodes = 64);

// Central difference of the fidelity error, each side re-propagated in
// Hilbert space from the perturbed Hamiltonian H + delta f_n S_n.
double fd_oracle(const NetworkSpec& spec, const SESHamiltonian& h, const UncertaintyStructure& s,
                 double t_f, double step = 1e-5);

}  // namespace spinsens
