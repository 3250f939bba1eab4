#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hypoflow/dense_matrix.hpp"
#include "hypoflow/hermite.hpp"

namespace hypoflow {

/// Fields with `components` entries, each a polynomial of degree ≤ N in the orthonormal Hermite
/// basis of the standard Gaussian measure μ on R^d. Degrees of freedom are ordered degree-major:
/// all (component, α) with |α| = 0, then |α| = 1, and so on, so every degree block is contiguous.
class FieldSpace {
 public:
  FieldSpace(int d, int n, int components);

  int dim() const { return d_; }
  int max_degree() const { return n_; }
  int components() const { return components_; }
  std::size_t size() const { return size_; }
  const BasisTruncation& basis() const { return *basis_; }

  std::size_t block_begin(int degree) const { return block_offsets_[static_cast<std::size_t>(degree)]; }
  std::size_t block_end(int degree) const { return block_offsets_[static_cast<std::size_t>(degree) + 1]; }

  /// Degree-major dof of (component, flat basis index).
  std::size_t dof(int component, std::size_t basis_index) const;
  int component_of(std::size_t dof) const;
  std::size_t basis_index_of(std::size_t dof) const;
  int degree_of(std::size_t dof) const;

  /// Component-major coefficient vectors (component c occupies [c·n_basis, (c+1)·n_basis)).
  std::vector<double> to_components(std::span<const double> u) const;
  std::vector<double> from_components(std::span<const double> c) const;

 private:
  int d_;
  int n_;
  int components_;
  BasisPtr basis_;
  std::size_t size_ = 0;
  std::vector<std::size_t> block_offsets_;
  std::vector<std::size_t> dof_of_;  ///< component-major position → degree-major dof
  std::vector<std::size_t> pos_of_;  ///< inverse of dof_of_
};

/// A form matrix A with mass M and a list of linear constraints, all over a FieldSpace.
struct QuadraticFormPair {
  RealMatrix form;
  RealMatrix mass;
  std::vector<std::vector<double>> constraints;
};

/// Σ_i ‖∂_i a‖²_μ on scalars; constraint ∫a dμ = 0.
QuadraticFormPair poincare_form(const FieldSpace& space);
/// Σ_ij ‖∂_i b_j + ∂_j b_i‖²_μ on vector fields with the mean and rotation constraints.
QuadraticFormPair korn_form(const FieldSpace& space);
/// Same symmetrized form, with mass replaced by the full gradient form Σ_ij ‖∂_i b_j‖²_μ.
QuadraticFormPair korn_gradient_form(const FieldSpace& space);

std::vector<std::vector<double>> mean_constraints(const FieldSpace& space);
std::vector<std::vector<double>> rotation_constraints(const FieldSpace& space);

double quadratic_value(const RealMatrix& a, std::span<const double> u);

/// Minimum of the (generalized) Rayleigh quotient of one degree block on the constraint-free subspace.
struct BlockMinimum {
  int degree = 0;
  std::size_t feasible_dim = 0;
  double lambda = 0.0;
  std::vector<double> witness;  ///< full-length dof vector, unit in the mass norm
  double constraint_residual = 0.0;
};

/// Jacobi eigensolve of each degree block after deflating the constraints; blocks with no feasible
/// direction are skipped. Throws NumericError when a constraint straddles degree blocks.
std::vector<BlockMinimum> constrained_block_minima(const FieldSpace& space, const QuadraticFormPair& pair);

struct ConstantReport {
  std::string name;
  int d = 0;
  int n_coarse = 0;
  int n_fine = 0;
  double lambda_coarse = 0.0;
  double lambda_fine = 0.0;
  double drift = 0.0;  ///< |λ_coarse − λ_fine| / λ_fine
  std::vector<int> ladder_n;
  std::vector<double> ladder_lambda;
  bool monotone = true;  ///< λ̂_N non-increasing along the ladder
  std::vector<double> witness;  ///< degree-major coefficients at n_fine
  int witness_degree = 0;
  double constraint_residual = 0.0;
  double min_form_eigenvalue = 0.0;  ///< smallest eigenvalue of the unconstrained form
  bool pass = false;
  std::string verdict;
};

ConstantReport poincare_constant(int d, int n);
/// d ≥ 2; the ladder runs n_coarse, …, n_fine.
ConstantReport korn_constant(int d, int n_coarse, int n_fine);
ConstantReport korn_gradient_constant(int d, int n_coarse, int n_fine);

struct KernelWitnessReport {
  int d = 0;
  int expected_dim = 0;
  std::vector<int> ladder_n;
  std::vector<int> nullspace_dim;
  double max_witness_rayleigh = 0.0;
  int max_witness_degree = 0;
  std::vector<std::vector<double>> witnesses;  ///< null vectors at the largest N
  bool pass = false;
};

/// Nullspace of the unconstrained symmetrized-gradient form for every N in [2, n_max].
KernelWitnessReport kernel_witness_suite(int d, int n_max);

/// Σ_ij ‖X_i b_j + X_j b_i‖² on b = e^{−V/2}b̃ through ladder matrices, against the μ-form of b̃
/// evaluated by Gauss–Hermite quadrature with polynomial derivatives. Returns the largest relative gap.
double substitution_identity_gap(int d, int n, std::uint64_t seed, int trials);

/// 2‖∇b‖² + 2‖½∇V·b − ∇·b‖² − 2(b, ∇²V b) in ladder form for harmonic V, relative gap to the form.
double korn_split_identity_gap(int d, int n, std::uint64_t seed, int trials);

}  // namespace hypoflow
