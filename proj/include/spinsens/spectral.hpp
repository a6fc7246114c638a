#pragma once

#include "spinsens/types.hpp"

namespace spinsens {

// Eigensystem of a real skew-symmetric A: A = M diag(i*lambda) M^dagger,
// lambda sorted ascending.
struct SpectralData {
  ComplexMatrix M;
  RealVector lambda;

  // ||M diag(i lambda) M^dagger - A||_F
  double reconstruction_residual(const RealMatrix& a) const;
  double max_abs_lambda() const;
};

SpectralData spectral_decompose(const RealMatrix& a);

// exp(A t) = M diag(exp(i lambda t)) M^dagger. Throws NumericalError if the
// imaginary residue exceeds 1e-9.
RealMatrix exp_from_spectral(const SpectralData& sd, double t);

}  // namespace spinsens
