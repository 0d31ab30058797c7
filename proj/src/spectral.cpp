#include "socolab/spectral.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace socolab {

void require_symmetric(const Matrix& M, const char* where) {
  if (M.rows() != M.cols()) {
    std::ostringstream os;
    os << where << ": matrix is " << M.rows() << "x" << M.cols()
       << ", expected square";
    throw std::invalid_argument(os.str());
  }
  double worst = 0.0;
  for (int i = 0; i < M.rows(); ++i) {
    for (int j = i + 1; j < M.cols(); ++j) {
      const double gap = std::abs(M(i, j) - M(j, i));
      const double tol = 1e-12 * (1.0 + std::min(std::abs(M(i, j)), std::abs(M(j, i))));
      if (gap > tol) worst = std::max(worst, gap);
    }
  }
  if (worst > 0.0) {
    std::ostringstream os;
    os << where << ": matrix not symmetric, max |M(i,j)-M(j,i)| = " << worst;
    throw std::invalid_argument(os.str());
  }
}

namespace {

// Largest-magnitude entry positive; ties broken by lowest index.
void normalize_column_signs(Matrix& U) {
  for (int j = 0; j < U.cols(); ++j) {
    int arg = 0;
    double best = std::abs(U(0, j));
    for (int i = 1; i < U.rows(); ++i) {
      if (std::abs(U(i, j)) > best) {
        best = std::abs(U(i, j));
        arg = i;
      }
    }
    if (U(arg, j) < 0.0) U.col(j) = -U.col(j);
  }
}

}  // namespace

SpectralForm sym_eig(const Matrix& M) {
  require_symmetric(M, "sym_eig");
  const Matrix S = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("sym_eig: eigensolver failed to converge");
  const int d = static_cast<int>(S.rows());
  SpectralForm form;
  form.basis.resize(d, d);
  form.eigenvalues.resize(d);
  for (int k = 0; k < d; ++k) {  // Eigen sorts ascending; we want descending
    form.eigenvalues(k) = es.eigenvalues()(d - 1 - k);
    form.basis.col(k) = es.eigenvectors().col(d - 1 - k);
  }
  normalize_column_signs(form.basis);
  return form;
}

Matrix psd_project(const Matrix& M) {
  const Matrix S = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("psd_project: eigensolver failed to converge");
  Vector lam = es.eigenvalues().cwiseMax(0.0);
  Matrix R = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (R + R.transpose());
}

Matrix random_orthonormal(int d, std::mt19937_64& rng) {
  if (d < 1) throw std::invalid_argument("random_orthonormal: d must be >= 1");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix G(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) G(i, j) = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ();
  const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j)
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  normalize_column_signs(Q);
  return Q;
}

MatrixNorms sym_norms(const Matrix& M) {
  require_symmetric(M, "sym_norms");
  const SpectralForm f = sym_eig(M);
  MatrixNorms n;
  n.frobenius = std::sqrt(f.eigenvalues.array().square().sum());
  n.nuclear = f.eigenvalues.array().abs().sum();
  n.operator_norm = f.eigenvalues.size() > 0
                        ? f.eigenvalues.array().abs().maxCoeff()
                        : 0.0;
  return n;
}

double operator_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues()(0);
}

double subspace_alignment(const Matrix& P, const Matrix& Q) {
  if (P.rows() != Q.rows() || P.cols() != Q.cols())
    throw std::invalid_argument("subspace_alignment: dimension mismatch");
  const int k = static_cast<int>(P.cols());
  if (k > 20)
    throw std::invalid_argument("subspace_alignment: too many columns");
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < (1ULL << k); ++mask) {
    Matrix D = P;
    for (int j = 0; j < k; ++j)
      if (mask & (1ULL << j)) D.col(j) = -D.col(j);
    best = std::min(best, operator_norm(D - Q));
  }
  return best;
}

}  // namespace socolab
