#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hypoflow/dense_matrix.hpp"

namespace hypoflow {

/// Partial-pivot LU factorization, reusable for many right-hand sides.
template <typename T>
class LUDecomposition {
 public:
  explicit LUDecomposition(DenseMatrix<T> a, double pivot_tol = 1e-14);

  std::vector<T> solve(std::span<const T> rhs) const;
  std::size_t size() const { return lu_.rows(); }

 private:
  DenseMatrix<T> lu_;
  std::vector<std::size_t> perm_;
};

extern template class LUDecomposition<double>;
extern template class LUDecomposition<Complex>;

/// Solve A x = rhs by partial-pivot elimination.
template <typename T>
std::vector<T> linear_solve(const DenseMatrix<T>& a, std::span<const T> rhs) {
  return LUDecomposition<T>(a).solve(rhs);
}

/// Inverse of a square matrix via LU.
template <typename T>
DenseMatrix<T> inverse(const DenseMatrix<T>& a) {
  LUDecomposition<T> lu(a);
  const std::size_t n = a.rows();
  DenseMatrix<T> inv(n, n);
  std::vector<T> e(n, T{});
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), T{});
    e[j] = T{1};
    const auto col = lu.solve(e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

struct EigenResult {
  std::vector<double> values;  ///< ascending
  RealMatrix vectors;          ///< column j is the eigenvector of values[j]
  int sweeps = 0;
  std::vector<double> offdiag_history;  ///< off-diagonal Frobenius norm after each sweep
};

/// Cyclic Jacobi eigensolver for real symmetric matrices.
EigenResult jacobi_eigen(const RealMatrix& a, double tol = 1e-12, int max_sweeps = 100);

/// Lower Cholesky factor of a symmetric positive definite matrix.
RealMatrix cholesky(const RealMatrix& a);

/// Symmetric-definite generalized eigenproblem A v = λ M v, M positive definite.
/// Eigenvectors are M-orthonormal.
EigenResult generalized_eigen(const RealMatrix& a, const RealMatrix& m);

/// Real 2n×2n embedding [[Re, −Im], [Im, Re]] of a Hermitian matrix.
RealMatrix hermitian_embedding(const ComplexMatrix& h);

/// Smallest λ with H v = λ Q v for Hermitian H and Hermitian positive definite Q.
double min_generalized_hermitian(const ComplexMatrix& h, const ComplexMatrix& q);

/// Symmetric square root and inverse square root of an SPD matrix.
RealMatrix spd_sqrt(const RealMatrix& a);
RealMatrix spd_inv_sqrt(const RealMatrix& a);

double max_asymmetry(const RealMatrix& a);

}  // namespace hypoflow
