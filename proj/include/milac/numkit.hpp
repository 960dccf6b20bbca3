// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <complex>

#include "milac/errors.hpp"

namespace milac {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// A = left * singular_values.asDiagonal() * right.adjoint(),
// singular values sorted descending, all >= 0.
struct SvdFactors {
  ComplexMatrix left;
  RealVector singular_values;
  ComplexMatrix right;
};

// Thin SVD. Throws NumericFailure if the factorization does not converge,
// ContractViolation on empty or non-finite input.
SvdFactors svd(const ComplexMatrix& a);

// Largest singular value.
double spectral_norm(const ComplexMatrix& a);

// Square root / inverse square root of a Hermitian PSD matrix. Input is
// symmetrized before the eigendecomposition; eigenvalues are floored at
// `floor` (negative floor selects the default 1e-12 * ||A||_2) before the
// root is taken. Throws ContractViolation when A is not Hermitian within
// 1e-10 or has an eigenvalue below -1e-10 * ||A||_2.
ComplexMatrix hermitian_sqrt(const ComplexMatrix& a, double floor = -1.0);
ComplexMatrix hermitian_inv_sqrt(const ComplexMatrix& a, double floor = -1.0);

// Frobenius projection onto {B : ||B||_2 <= radius}: singular values are
// clipped at radius. Returns the input unchanged when already inside.
ComplexMatrix project_spectral_ball(const ComplexMatrix& a, double radius);

// Pi = H^H (H H^H)^{-1} H for a K x N channel with full row rank
// (smallest singular value > 1e-10 * largest, else ContractViolation).
ComplexMatrix orthogonal_projector(const ComplexMatrix& h);

}  // namespace milac
