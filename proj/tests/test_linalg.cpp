#include <gtest/gtest.h>

#include "trbie/linalg.hpp"
#include "trbie/rng.hpp"

using namespace trbie;
using cplx = std::complex<double>;

TEST(Linalg, LuSolveResidual) {
  const Matrix A = random_complex_matrix(50, 50, 3, 0);
  const Matrix B = random_complex_matrix(50, 3, 3, 1);
  const LU lu(A);
  const Matrix X = lu.solve(B);
  EXPECT_LT((A * X - B).norm() / (A.norm() * X.norm()), 1e-12);
  EXPECT_GT(lu.min_pivot(), 0.0);
  EXPECT_EQ(lu.size(), 50);
}

TEST(Linalg, LuRejectsBadInput) {
  EXPECT_THROW(LU(Matrix::Zero(4, 4)), SingularMatrixError);
  Matrix A = Matrix::Identity(3, 3);
  A(1, 2) = cplx(NAN, 0.0);
  EXPECT_THROW(LU{A}, SingularMatrixError);
  EXPECT_THROW(LU(Matrix::Identity(3, 4)), ConfigError);
  EXPECT_THROW(LU(Matrix::Identity(3, 3)).solve(Matrix::Ones(2, 1)), ConfigError);
}

TEST(Linalg, SvdReconstructs) {
  const Matrix A = random_complex_matrix(30, 12, 5, 0);
  const auto s = svd(A);
  ASSERT_EQ(s.sigma.size(), 12);
  for (Eigen::Index i = 1; i < s.sigma.size(); ++i) EXPECT_GE(s.sigma(i - 1), s.sigma(i));
  Matrix S = Matrix::Zero(30, 12);
  for (Eigen::Index i = 0; i < 12; ++i) S(i, i) = s.sigma(i);
  EXPECT_LT((s.U * S * s.V.adjoint() - A).norm() / A.norm(), 1e-12);
  EXPECT_LT((s.U.adjoint() * s.U - Matrix::Identity(30, 30)).norm(), 1e-12);
}

TEST(Linalg, EigSmallPairs) {
  const Matrix A = random_complex_matrix(20, 20, 9, 0);
  const auto e = eig_small(A);
  ASSERT_EQ(e.values.size(), 20);
  for (Eigen::Index c = 0; c < 20; ++c) {
    EXPECT_NEAR(e.vectors.col(c).norm(), 1.0, 1e-14);
    EXPECT_LT((A * e.vectors.col(c) - e.values(c) * e.vectors.col(c)).norm(), 1e-12 * A.norm());
  }
  // trace is the sum of eigenvalues
  EXPECT_LT(std::abs(e.values.sum() - A.trace()), 1e-12 * A.norm());
  EXPECT_EQ(eig_small(Matrix(0, 0)).values.size(), 0);
  EXPECT_THROW(eig_small(Matrix::Zero(2, 3)), ConfigError);
  EXPECT_THROW(eig_small(Matrix::Zero(513, 513)), ConfigError);
}
