#pragma once

#include <Eigen/Dense>
#include <random>

namespace socolab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Eigendecomposition of a symmetric matrix with a fixed convention:
// eigenvalues sorted descending, each eigenvector's largest-magnitude entry
// positive (ties broken toward the lowest index), so the form is reproducible.
struct SpectralForm {
  Matrix basis;        // columns are eigenvectors
  Vector eigenvalues;  // non-increasing

  Matrix reconstruct() const {
    return basis * eigenvalues.asDiagonal() * basis.transpose();
  }
};

struct MatrixNorms {
  double frobenius;
  double nuclear;
  double operator_norm;
};

// Throws std::invalid_argument with the max asymmetry when M is not symmetric
// within |M(i,j) - M(j,i)| <= 1e-12 * (1 + |M(i,j)|).
void require_symmetric(const Matrix& M, const char* where);

SpectralForm sym_eig(const Matrix& M);

// Frobenius-nearest PSD matrix: symmetrize, clip negative eigenvalues at 0.
Matrix psd_project(const Matrix& M);

// Haar-distributed orthonormal matrix (QR of a Gaussian matrix with the
// R-diagonal sign correction), then columns sign-normalized with the same
// convention as sym_eig.  d=1 always yields (+1).
Matrix random_orthonormal(int d, std::mt19937_64& rng);

MatrixNorms sym_norms(const Matrix& M);

// Largest singular value of a general (possibly rectangular) matrix.
double operator_norm(const Matrix& M);

// min over per-column sign flips s of ||P*diag(s) - Q||_op, so two bases that
// span the same ordered eigenvectors up to sign are at distance 0.
double subspace_alignment(const Matrix& P, const Matrix& Q);

// u' A u.  Shared by hitting costs and gradient residuals so that identical
// inputs round identically.
inline double quad_form(const Matrix& A, const Vector& u) {
  return u.dot(A * u);
}

}  // namespace socolab
