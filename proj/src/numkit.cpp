// SPDX-License-Identifier: Apache-2.0
#include "milac/numkit.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace milac {

namespace {

void check_nonempty_finite(const ComplexMatrix& a, const char* who) {
  if (a.rows() < 1 || a.cols() < 1) {
    throw ContractViolation(std::string(who) + ": empty matrix");
  }
  if (!a.allFinite()) {
    throw ContractViolation(std::string(who) + ": non-finite entries");
  }
}

// Eigendecomposition of the symmetrized input with the PSD contract checks
// shared by both square-root modes.
Eigen::SelfAdjointEigenSolver<ComplexMatrix> psd_eig(const ComplexMatrix& a,
                                                     const char* who) {
  check_nonempty_finite(a, who);
  if (a.rows() != a.cols()) {
    throw ContractViolation(std::string(who) + ": matrix not square");
  }
  const double scale = std::max(1.0, a.norm());
  if ((a - a.adjoint()).norm() > 1e-10 * scale) {
    throw ContractViolation(std::string(who) + ": matrix not Hermitian");
  }
  ComplexMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw NumericFailure(std::string(who) + ": eigendecomposition failed");
  }
  const double lam_max = eig.eigenvalues().cwiseAbs().maxCoeff();
  if (eig.eigenvalues().minCoeff() < -1e-10 * lam_max) {
    throw ContractViolation(std::string(who) + ": negative eigenvalue");
  }
  return eig;
}

ComplexMatrix rooted(const Eigen::SelfAdjointEigenSolver<ComplexMatrix>& eig,
                     double floor, bool inverse, const char* who) {
  const double lam_max = eig.eigenvalues().cwiseMax(0.0).maxCoeff();
  if (floor < 0.0) floor = 1e-12 * lam_max;
  RealVector lam = eig.eigenvalues().cwiseMax(floor);
  RealVector root(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (inverse) {
      if (lam[i] <= 0.0) {
        throw NumericFailure(std::string(who) +
                             ": zero eigenvalue after floor, no inverse root");
      }
      root[i] = 1.0 / std::sqrt(lam[i]);
    } else {
      root[i] = std::sqrt(lam[i]);
    }
  }
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace

SvdFactors svd(const ComplexMatrix& a) {
  check_nonempty_finite(a, "svd");
  Eigen::JacobiSVD<ComplexMatrix> j(a,
                                    Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (j.info() != Eigen::Success) {
    throw NumericFailure("svd: factorization did not converge");
  }
  return SvdFactors{j.matrixU(), j.singularValues(), j.matrixV()};
}

double spectral_norm(const ComplexMatrix& a) {
  check_nonempty_finite(a, "spectral_norm");
  return Eigen::JacobiSVD<ComplexMatrix>(a).singularValues()(0);
}

ComplexMatrix hermitian_sqrt(const ComplexMatrix& a, double floor) {
  return rooted(psd_eig(a, "hermitian_sqrt"), floor, false, "hermitian_sqrt");
}

ComplexMatrix hermitian_inv_sqrt(const ComplexMatrix& a, double floor) {
  return rooted(psd_eig(a, "hermitian_inv_sqrt"), floor, true,
                "hermitian_inv_sqrt");
}

ComplexMatrix project_spectral_ball(const ComplexMatrix& a, double radius) {
  if (!(radius > 0.0)) {
    throw ContractViolation("project_spectral_ball: radius must be positive");
  }
  check_nonempty_finite(a, "project_spectral_ball");
  SvdFactors f = svd(a);
  if (f.singular_values(0) <= radius) return a;
  RealVector clipped = f.singular_values.cwiseMin(radius);
  return f.left * clipped.asDiagonal() * f.right.adjoint();
}

ComplexMatrix orthogonal_projector(const ComplexMatrix& h) {
  check_nonempty_finite(h, "orthogonal_projector");
  if (h.rows() > h.cols()) {
    throw ContractViolation("orthogonal_projector: expected K <= N");
  }
  SvdFactors f = svd(h);
  const double smax = f.singular_values(0);
  const double smin = f.singular_values(f.singular_values.size() - 1);
  if (!(smin > 1e-10 * smax)) {
    throw ContractViolation("orthogonal_projector: rank-deficient input");
  }
  // H = U S V^H with full row rank => H^H (H H^H)^{-1} H = V V^H.
  return f.right * f.right.adjoint();
}

}  // namespace milac
