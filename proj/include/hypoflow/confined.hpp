#pragma once

#include <span>
#include <string>
#include <vector>

#include "hypoflow/collision.hpp"
#include "hypoflow/dense_matrix.hpp"
#include "hypoflow/fit.hpp"
#include "hypoflow/hermite.hpp"
#include "hypoflow/integrators.hpp"
#include "hypoflow/mode_analysis.hpp"
#include "hypoflow/sparse_matrix.hpp"

namespace hypoflow {

/// Joint Hermite basis in (x, ξ) for the harmonic potential V = |x|²/2 − (d/2)ln(2π).
/// Element (β, α) is ψ_β(x)φ_α(ξ) with |β| + |α| ≤ N_total; axes 0..d−1 of the joint
/// multi-index are spatial, axes d..2d−1 are velocity.
class PhaseSpaceBasis {
 public:
  PhaseSpaceBasis(int d, int n_total);

  int dim() const { return d_; }
  int max_degree() const { return n_; }
  std::size_t size() const { return joint_->size(); }

  const BasisTruncation& joint() const { return *joint_; }
  const BasisTruncation& spatial() const { return *spatial_; }
  const BasisTruncation& velocity() const { return *velocity_; }
  BasisPtr velocity_ptr() const { return velocity_; }
  BasisPtr spatial_ptr() const { return spatial_; }

  std::size_t spatial_of(std::size_t j) const { return beta_[j]; }
  std::size_t velocity_of(std::size_t j) const { return alpha_[j]; }

  /// Joint position of (β, α) by flat spatial and velocity indices, npos when outside.
  std::size_t find(std::size_t beta, std::size_t alpha) const;
  std::size_t find(const std::vector<int>& beta, const std::vector<int>& alpha) const;

  static constexpr std::size_t npos = BasisTruncation::npos;

 private:
  int d_;
  int n_;
  BasisPtr joint_;
  BasisPtr spatial_;
  BasisPtr velocity_;
  std::vector<std::size_t> beta_;
  std::vector<std::size_t> alpha_;
  std::vector<std::size_t> table_;  ///< spatial.size() × velocity.size() → joint or npos
};

/// Spatial ladder X_i (annihilation on β) and X_i* (creation, overflow dropped).
std::vector<double> apply_X(const PhaseSpaceBasis& basis, std::size_t axis, std::span<const double> u);
LadderResult<double> apply_Xstar(const PhaseSpaceBasis& basis, std::size_t axis, std::span<const double> u);

/// Velocity ladder Y_i and Y_i* on the joint basis.
std::vector<double> apply_Y(const PhaseSpaceBasis& basis, std::size_t axis, std::span<const double> u);
LadderResult<double> apply_Ystar(const PhaseSpaceBasis& basis, std::size_t axis, std::span<const double> u);

SparseMatrix phase_X(const PhaseSpaceBasis& basis, std::size_t axis);
SparseMatrix phase_Y(const PhaseSpaceBasis& basis, std::size_t axis);

/// T = Σ_i (Y_i* X_i − X_i* Y_i), the ladder form of ξ·∇_x − x·∇_ξ.
/// Throws NumericError if the assembled matrix is not skew or couples different total degrees.
SparseMatrix assemble_T_harmonic(const PhaseSpaceBasis& basis);

struct ConfinedOperator {
  PhaseSpaceBasis basis;
  ModelKind model;
  OperatorMatrix velocity_L;  ///< L on the velocity truncation (d, N_total)
  SparseMatrix transport;     ///< T
  RealMatrix generator;       ///< B = L lifted − T
};

/// B = L ⊗ I − T, with L restricted per spatial index β to velocity degrees ≤ N_total − |β|.
ConfinedOperator assemble_generator(ModelKind model, const PhaseSpaceBasis& basis);

/// Velocity coefficients of u at spatial index β, over the full velocity truncation.
std::vector<double> velocity_slice(const PhaseSpaceBasis& basis, std::span<const double> u, std::size_t beta);

/// Fluid fields as spatial coefficient vectors (over basis.spatial()).
struct FluidFields {
  std::vector<double> a;
  std::vector<std::vector<double>> b;  ///< b[i]
  std::vector<double> c;
  std::vector<std::vector<std::vector<double>>> gamma;  ///< gamma[i][j], Γ_ij({I−P}u)
  std::vector<std::vector<double>> lambda;              ///< lambda[i], Λ_i({I−P}u)
};

/// Moments of u and of its microscopic part per spatial mode (P is the model projector).
FluidFields fluid_fields(const PhaseSpaceBasis& basis, std::span<const double> u, ModelKind model);

/// Spatial ladder on a field over basis.spatial().
std::vector<double> field_X(const BasisTruncation& spatial, std::size_t axis, std::span<const double> f);
std::vector<double> field_Xstar(const BasisTruncation& spatial, std::size_t axis, std::span<const double> f);

/// Trajectory on a time grid.
struct ConfinedTrajectory {
  std::vector<double> t;
  std::vector<std::vector<double>> u;
  IntegrationStats stats;
};

struct MomentFunctional {
  std::string name;
  std::vector<double> coefficients;  ///< ((ψ, u))_𝓜 = ⟨coefficients, u⟩
};

/// ((ψ, u))_𝓜 for ψ ∈ (1, x_i, ξ_i, x·ξ, (x×ξ)_{ij} for i<j, |x|², |ξ|²).
std::vector<MomentFunctional> conserved_moment_functionals(const PhaseSpaceBasis& basis);
std::vector<double> conserved_moments(const PhaseSpaceBasis& basis, std::span<const double> u);

/// Moment conditions of the model: mass for Models 1 and 2, every conserved moment for Model 3.
std::vector<MomentFunctional> admissibility_functionals(const PhaseSpaceBasis& basis, ModelKind model);

/// Throws AdmissibilityError naming the first moment above 1e−10·‖u₀‖.
void check_confined_admissible(const ConfinedOperator& op, std::span<const double> u0);

/// Orthogonal projection of u onto the admissible subspace.
std::vector<double> project_admissible(const ConfinedOperator& op, std::span<const double> u);

ConfinedTrajectory evolve_confined(const ConfinedOperator& op, std::span<const double> u0,
                                   std::span<const double> t_grid, double dt_max, bool check_admissible = true);

struct ResidualTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> per_step;  ///< per_step[n][e] residual of equation e on step n → n+1
  std::vector<double> max_residual;
  double overall_max() const;
};

/// Residuals of the moment ODE system (1, x, ξ, x·ξ, x×ξ, |x|², |ξ|²) between consecutive samples,
/// using the midpoint value for the right-hand sides.
ResidualTable moment_ode_residuals(const PhaseSpaceBasis& basis, const ConfinedTrajectory& traj);

/// Fluid-system residuals. Models 1, 2: mass and momentum equations. Model 3: a, b, c, Γ + 2cδ
/// and Λ equations, plus the printed-form momentum and Λ equations as diagnostics (not in `max`).
struct FluidResidualReport {
  ResidualTable table;
  std::vector<std::string> diagnostic_names;
  std::vector<double> diagnostic_max;
};

FluidResidualReport fluid_residuals(const ConfinedOperator& op, const ConfinedTrajectory& traj);

/// κ defaults: κ = 0.1 (Model 1); (κ₁, κ₂, κ₃) = (0.5, 0.25, 0.05) (Model 2);
/// (κ₁, κ₂) = (0.1, 0.01) inside ℰ_int and (κ₃, κ₄) = (0.5, 0.02) (Model 3).
KappaSet default_confined_kappas(ModelKind model);

double h1_norm_sq(const PhaseSpaceBasis& basis, std::span<const double> u);

/// ‖u‖² + κ_X‖Xu‖² + κ_Y‖Yu‖² with the model's H¹ weights from ℰ.
double weighted_h1_norm_sq(const PhaseSpaceBasis& basis, ModelKind model, std::span<const double> u,
                           const KappaSet& kappas);

/// (Xa, b) = Σ_i ⟨X_i a, b_i⟩.
double cross_Xa_b(const PhaseSpaceBasis& basis, std::span<const double> u);

double lyapunov_calE_int(const PhaseSpaceBasis& basis, std::span<const double> u, double kappa1, double kappa2);

double lyapunov_calE_unchecked(const PhaseSpaceBasis& basis, ModelKind model, std::span<const double> u,
                               const KappaSet& kappas);

/// ℰ(u) with the guard ½N_κ(u) ≤ ℰ ≤ 2N_κ(u), N_κ the weighted H¹ norm (GuardViolation otherwise).
double lyapunov_calE(const PhaseSpaceBasis& basis, ModelKind model, std::span<const double> u,
                     const KappaSet& kappas);

struct LyapunovCertificate {
  double lambda = 0.0;           ///< largest λ with (ℰ_{n+1}−ℰ_n)/Δt + λℰ_n ≤ tol·ℰ_n for all n
  double worst_violation = 0.0;  ///< max_n relative violation at λ (≤ 0 when certified)
  std::size_t steps = 0;
};

LyapunovCertificate certify_lyapunov(std::span<const double> t, std::span<const double> values, double tol);

struct ConfinedDecayReport {
  std::vector<double> t;
  std::vector<double> calE;
  std::vector<double> h1;  ///< ‖u‖_{H¹}
  DecayFit energy_fit;
  DecayFit h1_fit;
  LyapunovCertificate certificate;
  double guard_low = 0.0;   ///< min ℰ / N_κ over the run
  double guard_high = 0.0;  ///< max ℰ / N_κ over the run
  bool guard_ok = true;
  bool pass = false;
};

/// Fits of ℰ and ‖u‖_{H¹} on [fit_t0, fit_t1] plus the discrete Lyapunov certificate.
ConfinedDecayReport h1_decay_fit(const PhaseSpaceBasis& basis, ModelKind model, const ConfinedTrajectory& traj,
                                 const KappaSet& kappas, double fit_t0, double fit_t1, double tol = 1e-8);

}  // namespace hypoflow
