#pragma once
/// Dense complex linear algebra on top of Eigen, with the error contract
/// used throughout the library (singular pivots and non-convergence throw).

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>

#include "trbie/errors.hpp"

namespace trbie {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// LU factorization with partial pivoting.
class LU {
 public:
  explicit LU(const Matrix& A) {
    if (A.rows() != A.cols()) throw ConfigError("LU: matrix must be square");
    if (!A.allFinite()) throw SingularMatrixError("LU: matrix has non-finite entries");
    lu_.compute(A);
    const auto& M = lu_.matrixLU();
    double smallest = INFINITY;
    for (Eigen::Index i = 0; i < M.rows(); ++i) smallest = std::min(smallest, std::abs(M(i, i)));
    if (!(smallest >= 1e-300)) throw SingularMatrixError("LU: numerically singular pivot");
    min_pivot_ = smallest;
  }

  Matrix solve(const Matrix& B) const {
    if (B.rows() != lu_.rows()) throw ConfigError("LU solve: row count mismatch");
    return lu_.solve(B);
  }

  Eigen::Index size() const { return lu_.rows(); }
  double min_pivot() const { return min_pivot_; }

 private:
  Eigen::PartialPivLU<Matrix> lu_;
  double min_pivot_ = 0.0;
};

inline Matrix lu_solve(const Matrix& A, const Matrix& B) { return LU(A).solve(B); }

struct SVDResult {
  Matrix U;
  Eigen::VectorXd sigma;  // descending
  Matrix V;
};

inline SVDResult svd(const Matrix& A) {
  Eigen::BDCSVD<Matrix> s(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {s.matrixU(), s.singularValues(), s.matrixV()};
}

struct EigResult {
  Vector values;
  Matrix vectors;  // columns, unit 2-norm
};

/// Eigenpairs of a small dense matrix (complex Schur, at most 30 m sweeps).
inline EigResult eig_small(const Matrix& A) {
  if (A.rows() != A.cols()) throw ConfigError("eig_small: matrix must be square");
  if (A.rows() > 512) throw ConfigError("eig_small: matrix larger than 512");
  EigResult out;
  if (A.rows() == 0) return out;
  Eigen::ComplexEigenSolver<Matrix> es;
  es.setMaxIterations(30 * A.rows());
  es.compute(A, true);
  if (es.info() != Eigen::Success) throw ConvergenceError("eig_small: QR iteration did not converge");
  out.values = es.eigenvalues();
  out.vectors = es.eigenvectors();
  for (Eigen::Index c = 0; c < out.vectors.cols(); ++c) {
    const double n = out.vectors.col(c).norm();
    if (n > 0.0) out.vectors.col(c) /= n;
  }
  return out;
}

}  // namespace trbie
