#include "spinsens/spectral.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace spinsens {

namespace {

bool lexicographic_less(const ComplexVector& a, const ComplexVector& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a(i).real() != b(i).real()) return a(i).real() < b(i).real();
    if (a(i).imag() != b(i).imag()) return a(i).imag() < b(i).imag();
  }
  return false;
}

}  // namespace

double SpectralData::reconstruction_residual(const RealMatrix& a) const {
  const ComplexVector il = lambda.cast<Complex>() * Complex(0.0, 1.0);
  const ComplexMatrix rebuilt = M * il.asDiagonal() * M.adjoint();
  return (rebuilt - a.cast<Complex>()).norm();
}

double SpectralData::max_abs_lambda() const {
  return lambda.size() == 0 ? 0.0 : lambda.cwiseAbs().maxCoeff();
}

SpectralData spectral_decompose(const RealMatrix& a) {
  if (a.rows() != a.cols()) throw ValidationError("generator must be square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a + a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ValidationError("generator is not skew-symmetric");

  // iA is Hermitian; its eigenvalues mu give A's spectrum as i*lambda, lambda = -mu.
  const ComplexMatrix ia = a.cast<Complex>() * Complex(0.0, 1.0);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(ia);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on iA");

  const int d = static_cast<int>(a.rows());
  const RealVector lam = -es.eigenvalues();
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return lam(x) < lam(y); });

  // Within runs of numerically equal eigenvalues, order eigenvectors
  // lexicographically descending (A = 0 gives M = I).
  const double tol = 1e-10 * std::max(1.0, lam.cwiseAbs().maxCoeff());
  const ComplexMatrix& vecs = es.eigenvectors();
  for (int begin = 0; begin < d;) {
    int end = begin + 1;
    while (end < d && lam(order[end]) - lam(order[end - 1]) <= tol) ++end;
    std::sort(order.begin() + begin, order.begin() + end, [&](int x, int y) {
      return lexicographic_less(vecs.col(y), vecs.col(x));
    });
    begin = end;
  }

  SpectralData sd;
  sd.M.resize(d, d);
  sd.lambda.resize(d);
  for (int k = 0; k < d; ++k) {
    sd.M.col(k) = vecs.col(order[k]);
    sd.lambda(k) = lam(order[k]);
  }
  return sd;
}

RealMatrix exp_from_spectral(const SpectralData& sd, double t) {
  ComplexVector phases(sd.lambda.size());
  for (int k = 0; k < sd.lambda.size(); ++k) phases(k) = std::exp(Complex(0.0, sd.lambda(k) * t));
  const ComplexMatrix e = sd.M * phases.asDiagonal() * sd.M.adjoint();
  if (e.imag().cwiseAbs().maxCoeff() > 1e-9)
    throw NumericalError("spectral exponential has a non-negligible imaginary part");
  return e.real();
}

}  // namespace spinsens
