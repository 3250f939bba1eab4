#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hypoflow/collision.hpp"
#include "hypoflow/confined.hpp"
#include "hypoflow/dense_matrix.hpp"
#include "hypoflow/fit.hpp"
#include "hypoflow/hermite.hpp"

namespace hypoflow {

/// Uniform grid on [−R, R] with `points` nodes (homogeneous Dirichlet beyond ±R).
struct GridSpec {
  double R = 8.0;
  std::size_t points = 201;
  double h() const { return 2.0 * R / static_cast<double>(points - 1); }
};

/// V and its finite-difference derivatives on the grid; V is shifted so that ∫e^{−V}dx = 1 (trapezoid).
struct PotentialSamples {
  GridSpec grid;
  std::vector<double> x;
  std::vector<double> v;
  std::vector<double> dv;
  std::vector<double> d2v;
};

PotentialSamples sample_potential(const std::function<double(double)>& V, const GridSpec& grid);
PotentialSamples potential_from_samples(std::vector<double> values, const GridSpec& grid);

struct PotentialConditions {
  bool integrable = false;  ///< normalized e^{−V} at ±R below 1e−8
  bool confining = false;   ///< ¼V′² − ½V″ non-decreasing in |x| outside the core and growing by > 1
  double core = 0.0;
  double growth = 0.0;      ///< min over the two sides of W(±R) − W(±core)
  std::vector<double> deltas{0.1, 0.01};
  std::vector<double> c_delta;  ///< max over the grid of V″² − δV′²
  bool c3_finite = false;
  bool pass = false;
  std::string warning;  ///< "outside the decay hypotheses: ..." when a check fails
};

PotentialConditions check_potential_conditions(const PotentialSamples& p, double core_fraction = 0.25);

/// Fokker–Planck on grid × Hermite(ξ) with u[a·n_x + j] the coefficient of φ_a at x_j.
struct GeneralVOperator {
  PotentialSamples potential;
  PotentialConditions conditions;
  BasisPtr velocity;
  RealMatrix X;          ///< D + diag(w), w = V′/2 + O(h²) with X e^{−V/2} = 0 at interior nodes
  RealMatrix generator;  ///< B = L ⊗ I − (Y* ⊗ X − Y ⊗ Xᵀ)
  std::size_t nx = 0;
  std::size_t nv = 0;
  std::size_t size() const { return nx * nv; }
};

/// Throws DomainError for models other than Fokker–Planck or grids with fewer than 5 nodes.
GeneralVOperator assemble_generalV_1d(const PotentialSamples& p, ModelKind model, int n_velocity);

/// Mass functional h·Σ_j e^{−V_j/2}u_0(x_j).
std::vector<double> generalV_mass_functional(const GeneralVOperator& op);
std::vector<double> generalV_project_admissible(const GeneralVOperator& op, std::span<const double> u);

/// Smooth admissible state e^{−V/2}·(random cubic in x) per velocity mode a ≤ 3, unit grid norm.
std::vector<double> generalV_smooth_state(const GeneralVOperator& op, std::uint64_t seed);

/// Fraction of h·Σ|u|² carried by the `width` outermost nodes on each side.
double boundary_mass_fraction(const GeneralVOperator& op, std::span<const double> u, std::size_t width = 5);

struct GeneralVTrajectory {
  std::vector<double> t;
  std::vector<std::vector<double>> u;
  IntegrationStats stats;
  double max_boundary_fraction = 0.0;
  bool flagged = false;  ///< boundary fraction above 1e−8 at some sample
};

GeneralVTrajectory evolve_generalV(const GeneralVOperator& op, std::span<const double> u0,
                                   std::span<const double> t_grid, double dt_max);

/// ℰ = ‖u‖² + κ₁‖Xu‖² + κ₂‖Yu‖² + κ₃(Xa, b) with grid inner products.
double generalV_calE(const GeneralVOperator& op, std::span<const double> u, const KappaSet& kappas);
double generalV_weighted_h1(const GeneralVOperator& op, std::span<const double> u, const KappaSet& kappas);

ConfinedDecayReport generalV_decay_fit(const GeneralVOperator& op, const GeneralVTrajectory& traj,
                                       const KappaSet& kappas, double fit_t0, double fit_t1, double tol = 1e-8);

struct GeneralVKappaSearch {
  KappaSet kappas;
  ConfinedDecayReport report;
  std::vector<KappaSet> tried;
  std::vector<double> tried_lambda;
  bool found = false;
};

/// Walks the ladder κ₁ = κ₂ ∈ {0.5, 0.2, 0.1, 0.05, 0.02}, κ₃ = κ₁/10 (after the model defaults) and
/// returns the first set whose run certifies; the last report is returned when none does.
GeneralVKappaSearch search_generalV_kappas(const GeneralVOperator& op, const GeneralVTrajectory& traj,
                                           double fit_t0, double fit_t1, double tol = 1e-8);

/// Grid values of a joint-basis state (harmonic V): u_a(x_j) = Σ_β c_{β,a} ψ_β(x_j).
std::vector<double> harmonic_state_on_grid(const PhaseSpaceBasis& basis, std::span<const double> c,
                                           const GridSpec& grid, std::size_t n_velocity_modes);

}  // namespace hypoflow
