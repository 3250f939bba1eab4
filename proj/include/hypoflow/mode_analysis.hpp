#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "hypoflow/collision.hpp"
#include "hypoflow/dense_matrix.hpp"
#include "hypoflow/fit.hpp"
#include "hypoflow/integrators.hpp"

namespace hypoflow {

/// Functional weights. Mode energies use `kappa` (Models 1, 2) or `kappa1`, `kappa2` inside
/// E_int and `kappa3` outside (Model 3). Confined functionals reuse the same fields, see confined.hpp.
struct KappaSet {
  double kappa = 0.1;
  double kappa1 = 0.1;
  double kappa2 = 0.01;
  double kappa3 = 0.05;
  double kappa4 = 0.02;
};

KappaSet default_mode_kappas(ModelKind model);

struct Rational {
  long long num = 0;
  long long den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational& a, const Rational& b) { return a.num == b.num && a.den == b.den; }
};

/// σ_{q,m} = (d/2)(1/q − 1/2) + m/2 for q = q_num/q_den in [1, 2], in lowest terms.
Rational sigma_index_exact(long long q_num, long long q_den, int m, int d);
double sigma_index(double q, int m, int d);

/// B̂(k) = L − i Σ_j k_j Ξ_j.
ComplexMatrix assemble_symbol(const OperatorMatrix& L, std::span<const double> k);

struct ModeTrajectory {
  std::vector<double> t;
  std::vector<std::vector<Complex>> u;
  IntegrationStats stats;
};

/// Implicit-midpoint trajectory of û' = B̂û + ĥ(t) sampled on t_grid.
/// Sources with a component in ker L above 1e−10 (relative) are rejected.
ModeTrajectory evolve_mode(const OperatorMatrix& L, const ComplexMatrix& B, std::span<const Complex> u0,
                           std::span<const double> t_grid, double dt_max,
                           const SourceFn<Complex>& source = {});

/// E_int(û) for the Boltzmann surrogate (three-term compensation functional).
Complex interaction_E_int(const BasisTruncation& basis, std::span<const Complex> u, std::span<const double> k,
                          double kappa1, double kappa2);

/// E(û) without the equivalence guard.
double energy_E_unchecked(const OperatorMatrix& L, std::span<const Complex> u, std::span<const double> k,
                          const KappaSet& kappas);

/// E(û) with the guard ½‖û‖² ≤ E ≤ 2‖û‖² (GuardViolation otherwise).
double energy_E(const OperatorMatrix& L, std::span<const Complex> u, std::span<const double> k,
                const KappaSet& kappas);

/// Hermitian matrix Q(k) with E(û) = ûᴴQû, recovered by polarization.
ComplexMatrix energy_form(const OperatorMatrix& L, std::span<const double> k, const KappaSet& kappas);

/// Guard check on the form: spectrum of Q inside [½, 2].
bool kappa_guard_holds(const ComplexMatrix& q);

/// Largest λ with QB̂ + B̂ᴴQ ≤ −λ|k|²/(1+|k|²) Q (exact over all states); 0 at k = 0.
double matrix_certificate(const OperatorMatrix& L, std::span<const double> k, const KappaSet& kappas);

struct CertificateReport {
  double lambda = 0.0;           ///< certified λ (bisection)
  double lambda_closed = 0.0;    ///< closed-form minimum over the steps, for cross-checking
  double rate = 0.0;             ///< λ|k|²/(1+|k|²)
  double worst_violation = 0.0;  ///< worst relative violation at λ
  std::size_t steps = 0;
  bool kernel_mode = false;
  std::vector<double> energies;
};

/// Largest λ such that (E_{n+1} − E_n)/Δt + λ|k|²/(1+|k|²)E_n ≤ tol·E_n along the trajectory.
CertificateReport verify_mode_inequality(const OperatorMatrix& L, std::span<const double> k,
                                         const ModeTrajectory& traj, const KappaSet& kappas, double tol = 1e-8);

struct KappaChoice {
  KappaSet kappas;
  double worst_certificate = 0.0;
  bool feasible = true;
  std::string warning;
};

/// Grid search maximizing the worst-case matrix certificate over k_samples subject to the guard.
KappaChoice choose_kappas(const OperatorMatrix& L, const std::vector<std::vector<double>>& k_samples);

struct TorusResult {
  std::vector<double> t;
  std::vector<double> norm;    ///< ‖u(t)‖
  std::vector<double> energy;  ///< Σ_k E(û(t,k))
  DecayFit fit;
  double max_energy_increase = 0.0;  ///< max relative per-sample increase of Σ_k E
  double max_norm_increase = 0.0;
};

using LatticeData = std::map<std::vector<int>, std::vector<Complex>>;

/// Rejects data whose k = 0 mode has a ker L component; the message names the component.
void check_torus_admissible(const OperatorMatrix& L, const LatticeData& u0);

TorusResult torus_evolve(const OperatorMatrix& L, const LatticeData& u0, std::span<const double> t_grid,
                         const KappaSet& kappas, double dt_max);

struct WholeSpaceSpec {
  std::vector<Complex> profile_vector;  ///< v in û₀(k) = e^{−|k|²/2} v
  int alpha = 0;                        ///< derivative order (d = 1)
  double k_max = 8.0;
  double k_step = 0.02;
  double dt = 0.05;
};

struct WholeSpaceResult {
  std::vector<double> t;
  std::vector<double> norm;  ///< ‖∂^α u(t)‖
  DecayFit fit;
  double resolution_change = 0.0;  ///< max relative change of the curve when halving the k-step
};

/// ‖∂^α u(t)‖² = (2π)^{−1}∫ k^{2α}‖û(t,k)‖² dk on a symmetric trapezoid grid (d = 1).
/// Throws NumericError when halving the k-step changes the curve by more than 1%.
WholeSpaceResult wholespace_norm_curve(const OperatorMatrix& L, const WholeSpaceSpec& spec,
                                       std::span<const double> t_grid, double fit_t0, double fit_t1);

/// Norm curve on one k-grid, without the resolution check.
std::vector<double> wholespace_curve_on_grid(const OperatorMatrix& L, const WholeSpaceSpec& spec,
                                             std::span<const double> t_grid);

struct DuhamelSpec {
  std::vector<double> source_vector;  ///< ĥ(s,k) = e^{−s}e^{−k²/2}·v
  int alpha = 0;
  int alpha_prime = 0;
  long long q_num = 2;
  long long q_den = 1;
  double k_max = 8.0;
  double k_step = 0.05;
  double dt = 0.02;
};

struct DuhamelReport {
  std::vector<double> t;
  std::vector<double> lhs;
  std::vector<double> rhs;  ///< RHS integral without C
  double c_fit = 0.0;
  double c_fit_refined = 0.0;
  bool stable = false;
  double sigma = 0.0;
};

DuhamelReport duhamel_bound_check(const OperatorMatrix& L, const DuhamelSpec& spec, std::span<const double> t_grid);

/// ‖w^{−1/2}v‖ via the inverse square root of the weight Galerkin matrix.
double weighted_inverse_norm(const BasisTruncation& basis, WeightKind w, std::span<const double> v);

/// L^q norm of the α-th derivative of the inverse transform of e^{−k²/2} (d = 1).
double gaussian_profile_lq_norm(int alpha, double q);

}  // namespace hypoflow
