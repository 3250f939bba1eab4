#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "hypoflow/dense_matrix.hpp"

namespace hypoflow {

/// Multi-index α = (α_1, ..., α_d) of a tensor Hermite function.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries);

  std::size_t dim() const { return entries_.size(); }
  int operator[](std::size_t i) const { return entries_[i]; }
  int degree() const { return degree_; }
  const std::vector<int>& entries() const { return entries_; }

  MultiIndex shifted(std::size_t axis, int delta) const;

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.entries_ == b.entries_; }

 private:
  std::vector<int> entries_;
  int degree_ = 0;
};

/// All multi-indices with |α| ≤ N in graded lexicographic order.
/// Within a degree, indices are sorted lexicographically descending, so (1,0) precedes (0,1).
class BasisTruncation {
 public:
  BasisTruncation(int d, int N);

  int dim() const { return d_; }
  int max_degree() const { return n_; }
  std::size_t size() const { return indices_.size(); }

  const MultiIndex& at(std::size_t flat) const { return indices_[flat]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }

  /// Flat position of α, or npos when |α| > N or an entry is negative.
  std::size_t find(const std::vector<int>& alpha) const;
  std::size_t find(const MultiIndex& alpha) const { return find(alpha.entries()); }
  std::size_t index_of(const std::vector<int>& alpha) const;

  /// Number of basis elements with degree ≤ m (a prefix of the enumeration).
  std::size_t prefix_size(int m) const;

  /// Flat index of e_i (unit multi-index along axis i).
  std::size_t unit(std::size_t axis) const;
  /// Flat index of 2e_i.
  std::size_t double_unit(std::size_t axis) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::uint64_t key(const std::vector<int>& alpha) const;

  int d_;
  int n_;
  std::vector<MultiIndex> indices_;
  std::vector<std::size_t> degree_offsets_;
  std::unordered_map<std::uint64_t, std::size_t> lookup_;
};

using BasisPtr = std::shared_ptr<const BasisTruncation>;

/// Validated constructor: d ≥ 1 and N ≥ 2.
BasisPtr enumerate_basis(int d, int N);

std::size_t binomial(std::size_t n, std::size_t k);

/// Coefficients over a truncated orthonormal Hermite basis.
template <typename T>
struct CoeffVector {
  BasisPtr basis;
  std::vector<T> values;

  CoeffVector() = default;
  explicit CoeffVector(BasisPtr b) : basis(std::move(b)), values(basis->size(), T{}) {}
  CoeffVector(BasisPtr b, std::vector<T> v) : basis(std::move(b)), values(std::move(v)) {
    if (values.size() != basis->size()) throw DomainError("CoeffVector: length does not match basis");
  }

  double norm() const { return norm2(std::span<const T>(values)); }
};

template <typename T>
struct LadderResult {
  std::vector<T> values;
  double dropped_mass = 0.0;  ///< Σ|c_α|² over inputs whose raised index left the truncation
};

/// Y_i φ_α = √α_i φ_{α−e_i}.
template <typename T>
std::vector<T> apply_annihilation(const BasisTruncation& basis, std::size_t axis, std::span<const T> c);

/// Y_i* φ_α = √(α_i+1) φ_{α+e_i}, with overflow beyond N dropped and reported.
template <typename T>
LadderResult<T> apply_creation(const BasisTruncation& basis, std::size_t axis, std::span<const T> c);

/// ξ_i multiplication = Y_i + Y_i*.
template <typename T>
LadderResult<T> apply_xi_multiply(const BasisTruncation& basis, std::size_t axis, std::span<const T> c);

RealMatrix annihilation_matrix(const BasisTruncation& basis, std::size_t axis);
RealMatrix creation_matrix(const BasisTruncation& basis, std::size_t axis);
RealMatrix xi_matrix(const BasisTruncation& basis, std::size_t axis);

/// Gauss–Hermite rule for the standard normal weight (weights sum to 1).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline constexpr int kGaussHermiteCap = 200;

QuadratureRule gauss_hermite_rule(int n);

/// Orthonormal probabilists' Hermite polynomials H̃_0..H̃_n at x (orthonormal for N(0,1)).
std::vector<double> hermite_values(int n, double x);

/// Derivatives H̃_k'(x) = √k H̃_{k−1}(x), k = 0..n.
std::vector<double> hermite_derivatives(int n, double x);

/// Tensor quadrature over d axes: node list (d-vectors) and weights for M(ξ)dξ.
struct TensorQuadrature {
  int dim = 0;
  std::vector<std::vector<double>> points;
  std::vector<double> weights;
};

TensorQuadrature tensor_rule(int d, int n);

/// Values H̃_α(ξ) for every basis element at a point ξ.
std::vector<double> basis_polynomials(const BasisTruncation& basis, std::span<const double> xi);

}  // namespace hypoflow
