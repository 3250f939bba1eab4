#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hypoflow/dense_matrix.hpp"
#include "hypoflow/hermite.hpp"

namespace hypoflow {

enum class ModelKind { Relaxation, FokkerPlanck, BoltzmannSurrogate };

std::string model_name(ModelKind m);
ModelKind parse_model(const std::string& s);

enum class WeightKind { Unit, QuadraticGrowth, LinearGrowth };

/// Default weight w(ξ) per model: 1, 1+|ξ|², 1+|ξ|.
WeightKind default_weight(ModelKind m);
std::string weight_name(WeightKind w);

/// Galerkin matrix of multiplication by w(ξ) on the truncated basis.
RealMatrix weight_matrix(const BasisTruncation& basis, WeightKind w);

/// Galerkin matrix of multiplication by f(ξ) via tensor Gauss–Hermite quadrature.
template <typename F>
RealMatrix galerkin_multiplier(const BasisTruncation& basis, int nodes_per_axis, F&& f) {
  const TensorQuadrature tq = tensor_rule(basis.dim(), nodes_per_axis);
  const std::size_t n = basis.size();
  RealMatrix m(n, n);
  for (std::size_t q = 0; q < tq.points.size(); ++q) {
    const auto v = basis_polynomials(basis, tq.points[q]);
    const double wf = tq.weights[q] * f(tq.points[q]);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = wf * v[i];
      if (a == 0.0) continue;
      auto row = m.row(i);
      for (std::size_t j = i; j < n; ++j) row[j] += a * v[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) m(i, j) = m(j, i);
  return m;
}

enum class GammaConvention { Traceless, Literal };

template <typename T>
struct FluidMoments {
  T a{};
  std::vector<T> b;
  T c{};
  DenseMatrix<T> gamma;
  std::vector<T> lambda;
};

/// Orthonormal vector of the temperature direction Σ_i φ_{2e_i}/√d.
std::vector<double> temperature_vector(const BasisTruncation& basis);

/// Orthonormal kernel basis: {φ_0} for Relaxation, {φ_0, φ_{e_i}} for the FP refinement,
/// {φ_0, φ_{e_i}, temperature} for BoltzmannSurrogate.
std::vector<std::vector<double>> kernel_basis(const BasisTruncation& basis, ModelKind model);

/// Orthogonal projector matrices.
RealMatrix projector_P0(const BasisTruncation& basis);
RealMatrix projector_P(const BasisTruncation& basis, ModelKind model);

template <typename T>
std::vector<T> project_P0(const BasisTruncation& basis, std::span<const T> c);
template <typename T>
std::vector<T> project_P(const BasisTruncation& basis, std::span<const T> c, ModelKind model);

template <typename T>
FluidMoments<T> moments(const BasisTruncation& basis, std::span<const T> c,
                        GammaConvention conv = GammaConvention::Traceless);

/// Γ_ij(u) and Λ_i(u) individually.
template <typename T>
T gamma_entry(const BasisTruncation& basis, std::span<const T> c, std::size_t i, std::size_t j,
              GammaConvention conv = GammaConvention::Traceless);
template <typename T>
T lambda_entry(const BasisTruncation& basis, std::span<const T> c, std::size_t i);

/// Surface measure constant S_d = ∫_{S^{d−1}} |ω_1| dω (2, 4, 2π for d = 1, 2, 3).
double sphere_abs_moment(int d);

struct CollisionFrequencyResult {
  double value = 0.0;
  int refinement_levels = 0;
  double last_relative_change = 0.0;
};

/// ν(ξ) = S_d·E|ξ − Z| with Z ~ N(0, I_d), by radial composite Gauss–Legendre refinement.
/// Throws NumericError when the refinement does not reach a relative change below 1e−10.
CollisionFrequencyResult collision_frequency(std::span<const double> xi, int d);
double collision_frequency_nu(std::span<const double> xi, int d);

/// Galerkin matrix ν̂ via Gauss–Hermite quadrature with N+6 nodes per axis.
RealMatrix assemble_nu_hat(const BasisTruncation& basis);

struct OperatorMatrix {
  RealMatrix matrix;
  ModelKind model = ModelKind::Relaxation;
  BasisPtr basis;
  std::vector<std::vector<double>> kernel;
  WeightKind weight = WeightKind::Unit;
  RealMatrix dissipation_weight;  ///< ν̂ for the surrogate, the w-weight matrix otherwise
};

OperatorMatrix assemble_L(ModelKind model, BasisPtr basis);

/// Orthonormal basis of the orthogonal complement of span(kernel) (columns).
RealMatrix complement_basis(std::size_t n, const std::vector<std::vector<double>>& kernel);

/// Smallest generalized eigenvalue of (−L, W) on (ker L)^⊥, where W is the model weight
/// (identity for Relaxation, 1+|ξ|² for FokkerPlanck, ν̂ for the surrogate).
double coercivity_constant(const OperatorMatrix& L);

/// Smallest λ with −⟨u,Lu⟩ − |b|² ≥ λ‖(I−P)u‖²_w for Fokker–Planck (P the (d+1)-dimensional projector).
double fp_refined_coercivity(const OperatorMatrix& L);

}  // namespace hypoflow
