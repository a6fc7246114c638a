#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace spinsens {

using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Bad user input or a violated precondition. Maps to CLI exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical postcondition failed (eigensolver, convention residue...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File access or parse failure. Maps to CLI exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Hilbert-Schmidt inner product <A, B> = tr(A^T B).
inline double hs_inner(const RealMatrix& a, const RealMatrix& b) {
  return a.cwiseProduct(b).sum();
}

}  // namespace spinsens
