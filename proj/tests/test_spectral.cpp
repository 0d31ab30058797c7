#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "socolab/random.hpp"
#include "socolab/spectral.hpp"

using namespace socolab;

namespace {

Matrix random_symmetric(int d, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix M(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) M(i, j) = g(rng);
  return 0.5 * (M + M.transpose());
}

Matrix random_psd(int d, std::mt19937_64& rng, double scale = 1.0) {
  const Matrix S = random_symmetric(d, rng, scale);
  return S * S.transpose() / scale;
}

}  // namespace

TEST_CASE("sym_eig identity and diagonal") {
  const SpectralForm f = sym_eig(Matrix::Identity(2, 2));
  CHECK(f.eigenvalues(0) == doctest::Approx(1.0));
  CHECK(f.eigenvalues(1) == doctest::Approx(1.0));
  CHECK((f.basis.transpose() * f.basis - Matrix::Identity(2, 2)).norm() <
        1e-10);

  Matrix D(2, 2);
  D << 3, 0, 0, 1;
  const SpectralForm fd = sym_eig(D);
  CHECK(fd.eigenvalues(0) == doctest::Approx(3.0));
  CHECK(fd.eigenvalues(1) == doctest::Approx(1.0));
  CHECK((fd.basis - Matrix::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("sym_eig hand-solved 2x2") {
  Matrix M(2, 2);
  M << 2, 1, 1, 2;
  const SpectralForm f = sym_eig(M);
  CHECK(f.eigenvalues(0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-12));
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(f.basis(0, 0) - s) < 1e-12);
  CHECK(std::abs(f.basis(1, 0) - s) < 1e-12);
  CHECK(std::abs(f.basis(0, 1) - s) < 1e-12);   // tie -> first entry positive
  CHECK(std::abs(f.basis(1, 1) + s) < 1e-12);
}

TEST_CASE("sym_eig rejects asymmetric input with diagnostic") {
  Matrix M(2, 2);
  M << 1, 2, 3, 1;
  CHECK_THROWS_WITH_AS(sym_eig(M),
                       doctest::Contains("max |M(i,j)-M(j,i)| = 1"),
                       std::invalid_argument);
}

TEST_CASE("sym_eig reconstruct round-trip and determinism") {
  auto rng = make_engine(11);
  for (int d : {1, 2, 3, 5, 8}) {
    const Matrix M = random_symmetric(d, rng);
    const SpectralForm f = sym_eig(M);
    CHECK((f.reconstruct() - M).norm() <= 1e-9 * (1.0 + M.norm()));
    for (int k = 0; k + 1 < d; ++k)
      CHECK(f.eigenvalues(k) >= f.eigenvalues(k + 1));
    const SpectralForm g = sym_eig(M);
    CHECK((f.basis - g.basis).norm() == 0.0);
    CHECK((f.eigenvalues - g.eigenvalues).norm() == 0.0);
  }
}

TEST_CASE("psd_project clips and is idempotent") {
  Matrix D(2, 2);
  D << 1, 0, 0, -1;
  const Matrix P = psd_project(D);
  CHECK(P(0, 0) == doctest::Approx(1.0));
  CHECK(P(1, 1) == doctest::Approx(0.0).epsilon(1e-12));

  Matrix offdiag(2, 2);
  offdiag << 0, 1, 1, 0;
  const Matrix Q = psd_project(offdiag);
  Matrix expected(2, 2);
  expected << 0.5, 0.5, 0.5, 0.5;  // keep only the +1 eigencomponent
  CHECK((Q - expected).norm() < 1e-12);

  auto rng = make_engine(7);
  for (int i = 0; i < 20; ++i) {
    const Matrix M = random_psd(4, rng);
    CHECK((psd_project(M) - M).norm() < 1e-10 * (1.0 + M.norm()));
    const Matrix S = random_symmetric(4, rng);
    const Matrix P1 = psd_project(S);
    CHECK((psd_project(P1) - P1).norm() < 1e-10 * (1.0 + P1.norm()));
    CHECK(sym_eig(P1).eigenvalues.minCoeff() >= -1e-10);
  }
}

TEST_CASE("psd_project is non-expansive in Frobenius norm") {
  auto rng = make_engine(13);
  for (int i = 0; i < 50; ++i) {
    const Matrix M = random_symmetric(5, rng);
    const Matrix N = random_symmetric(5, rng);
    CHECK((psd_project(M) - psd_project(N)).norm() <=
          (M - N).norm() + 1e-12);
  }
}

TEST_CASE("random_orthonormal") {
  auto rng = make_engine(3);
  const Matrix U1 = random_orthonormal(1, rng);
  CHECK(U1(0, 0) == doctest::Approx(1.0));

  auto rng_a = make_engine(42);
  auto rng_b = make_engine(42);
  const Matrix A = random_orthonormal(4, rng_a);
  const Matrix B = random_orthonormal(4, rng_b);
  CHECK((A - B).norm() == 0.0);
  CHECK((A.transpose() * A - Matrix::Identity(4, 4)).norm() < 1e-10);
  CHECK_THROWS_AS(random_orthonormal(0, rng), std::invalid_argument);
}

TEST_CASE("norms on known matrices") {
  const MatrixNorms z = sym_norms(Matrix::Zero(3, 3));
  CHECK(z.frobenius == 0.0);
  CHECK(z.nuclear == 0.0);
  CHECK(z.operator_norm == 0.0);

  const MatrixNorms id = sym_norms(Matrix::Identity(3, 3));
  CHECK(id.frobenius == doctest::Approx(std::sqrt(3.0)));
  CHECK(id.nuclear == doctest::Approx(3.0));
  CHECK(id.operator_norm == doctest::Approx(1.0));

  Matrix D(2, 2);
  D << 3, 0, 0, 4;
  const MatrixNorms nd = sym_norms(D);
  CHECK(nd.frobenius == doctest::Approx(5.0));
  CHECK(nd.nuclear == doctest::Approx(7.0));
  CHECK(nd.operator_norm == doctest::Approx(4.0));
}

TEST_CASE("norm ordering and PSD trace identity") {
  auto rng = make_engine(5);
  for (int i = 0; i < 20; ++i) {
    const Matrix S = random_symmetric(4, rng);
    const MatrixNorms n = sym_norms(S);
    CHECK(n.operator_norm <= n.frobenius + 1e-12);
    CHECK(n.frobenius <= n.nuclear + 1e-12);
    const Matrix P = random_psd(4, rng);
    CHECK(sym_norms(P).nuclear == doctest::Approx(P.trace()).epsilon(1e-10));
  }
}

TEST_CASE("subspace_alignment") {
  CHECK(subspace_alignment(Matrix::Identity(2, 2), Matrix::Identity(2, 2)) ==
        0.0);
  CHECK(subspace_alignment(-Matrix::Identity(2, 2), Matrix::Identity(2, 2)) ==
        doctest::Approx(0.0));

  const double th = 0.1;
  Matrix R(2, 2);
  R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  CHECK(subspace_alignment(R, Matrix::Identity(2, 2)) ==
        doctest::Approx(2.0 * std::sin(th / 2.0)).epsilon(1e-10));

  CHECK_THROWS_AS(subspace_alignment(Matrix::Identity(2, 2),
                                     Matrix::Identity(3, 3)),
                  std::invalid_argument);
}

TEST_CASE("Weyl perturbation bound holds on random pairs") {
  auto rng = make_engine(17);
  for (int i = 0; i < 30; ++i) {
    const Matrix A = random_psd(5, rng);
    const Matrix Z = random_symmetric(5, rng, 0.3);
    const Vector la = sym_eig(A).eigenvalues;
    const Vector lb = sym_eig(A + Z).eigenvalues;
    const double zop = sym_norms(Z).operator_norm;
    for (int k = 0; k < 5; ++k)
      CHECK(std::abs(lb(k) - la(k)) <= zop + 1e-10);
  }
}
