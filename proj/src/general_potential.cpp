#include "hypoflow/general_potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hypoflow/errors.hpp"
#include "hypoflow/random.hpp"

namespace hypoflow {

namespace {

void check_grid(const GridSpec& g) {
  if (g.points < 5) throw DomainError("grid: need at least 5 nodes");
  if (!(g.R > 0.0)) throw DomainError("grid: R must be positive");
}

double grid_dot(double h, std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return h * s;
}

}  // namespace

PotentialSamples potential_from_samples(std::vector<double> values, const GridSpec& grid) {
  check_grid(grid);
  const std::size_t n = grid.points;
  if (values.size() != n) throw DomainError("potential: sample count does not match grid");
  for (double v : values)
    if (!std::isfinite(v)) throw DomainError("potential: non-finite sample");
  const double h = grid.h();
  PotentialSamples p;
  p.grid = grid;
  p.x.resize(n);
  for (std::size_t j = 0; j < n; ++j) p.x[j] = -grid.R + h * static_cast<double>(j);

  const double vmin = *std::min_element(values.begin(), values.end());
  double z = 0.0;
  for (std::size_t j = 0; j < n; ++j) z += (j == 0 || j + 1 == n ? 0.5 : 1.0) * std::exp(-(values[j] - vmin));
  z *= h;
  const double shift = vmin - std::log(z);
  for (auto& v : values) v -= shift;
  p.v = std::move(values);

  p.dv.resize(n);
  p.d2v.resize(n);
  const auto& v = p.v;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    p.dv[j] = (v[j + 1] - v[j - 1]) / (2.0 * h);
    p.d2v[j] = (v[j + 1] - 2.0 * v[j] + v[j - 1]) / (h * h);
  }
  p.dv[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  p.dv[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
  p.d2v[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / (h * h);
  p.d2v[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / (h * h);
  return p;
}

PotentialSamples sample_potential(const std::function<double(double)>& V, const GridSpec& grid) {
  check_grid(grid);
  std::vector<double> values(grid.points);
  for (std::size_t j = 0; j < grid.points; ++j) values[j] = V(-grid.R + grid.h() * static_cast<double>(j));
  return potential_from_samples(std::move(values), grid);
}

PotentialConditions check_potential_conditions(const PotentialSamples& p, double core_fraction) {
  PotentialConditions c;
  const std::size_t n = p.x.size();
  c.integrable = std::exp(-p.v.front()) < 1e-8 && std::exp(-p.v.back()) < 1e-8;

  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = 0.25 * p.dv[j] * p.dv[j] - 0.5 * p.d2v[j];
  c.core = core_fraction * p.grid.R;
  bool monotone = true;
  double w_core_right = std::numeric_limits<double>::quiet_NaN(), w_core_left = w_core_right;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double scale = 1e-10 * std::max({1.0, std::abs(w[j]), std::abs(w[j + 1])});
    if (p.x[j] >= c.core && w[j + 1] < w[j] - scale) monotone = false;
    if (p.x[j + 1] <= -c.core && w[j] < w[j + 1] - scale) monotone = false;
    if (std::isnan(w_core_right) && p.x[j] >= c.core) w_core_right = w[j];
  }
  for (std::size_t j = n; j-- > 0;)
    if (p.x[j] <= -c.core) {
      w_core_left = w[j];
      break;
    }
  c.growth = std::min(w.back() - w_core_right, w.front() - w_core_left);
  c.confining = monotone && c.growth > 1.0;

  c.c3_finite = true;
  for (double delta : c.deltas) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) m = std::max(m, p.d2v[j] * p.d2v[j] - delta * p.dv[j] * p.dv[j]);
    c.c_delta.push_back(m);
    if (!std::isfinite(m)) c.c3_finite = false;
  }
  c.pass = c.integrable && c.confining && c.c3_finite;
  if (!c.pass) {
    std::string why;
    if (!c.integrable) why += " e^{-V} not small at the cutoff;";
    if (!c.confining) why += " 1/4 V'^2 - 1/2 V'' does not grow outside the core;";
    if (!c.c3_finite) why += " C_delta not finite;";
    c.warning = "outside the decay hypotheses:" + why;
  }
  return c;
}

GeneralVOperator assemble_generalV_1d(const PotentialSamples& p, ModelKind model, int n_velocity) {
  if (model != ModelKind::FokkerPlanck) throw DomainError("general potential: only the Fokker-Planck model is supported");
  check_grid(p.grid);
  GeneralVOperator op;
  op.potential = p;
  op.conditions = check_potential_conditions(p);
  op.velocity = enumerate_basis(1, n_velocity);
  op.nx = p.grid.points;
  op.nv = op.velocity->size();
  const double h = p.grid.h();
  op.X = RealMatrix(op.nx, op.nx);
  // Interior multiplier chosen so that X e^{−V/2} = 0 node by node; it equals V′/2 + O(h²).
  for (std::size_t j = 0; j < op.nx; ++j) {
    if (j == 0 || j + 1 == op.nx) {
      op.X(j, j) = 0.5 * p.dv[j];
    } else {
      op.X(j, j) = (std::exp(0.5 * (p.v[j] - p.v[j - 1])) - std::exp(-0.5 * (p.v[j + 1] - p.v[j]))) / (2.0 * h);
    }
    if (j + 1 < op.nx) op.X(j, j + 1) = 0.5 / h;
    if (j > 0) op.X(j, j - 1) = -0.5 / h;
  }
  const std::size_t n = op.size();
  op.generator = RealMatrix(n, n);
  auto& b = op.generator;
  const std::size_t nx = op.nx;
  for (std::size_t a = 0; a < op.nv; ++a) {
    for (std::size_t j = 0; j < nx; ++j) b(a * nx + j, a * nx + j) = -static_cast<double>(a);
    if (a > 0) {
      const double s = std::sqrt(static_cast<double>(a));
      for (std::size_t j = 0; j < nx; ++j)
        for (std::size_t k = (j > 0 ? j - 1 : 0); k <= std::min(j + 1, nx - 1); ++k)
          b(a * nx + j, (a - 1) * nx + k) -= s * op.X(j, k);
    }
    if (a + 1 < op.nv) {
      const double s = std::sqrt(static_cast<double>(a + 1));
      for (std::size_t j = 0; j < nx; ++j)
        for (std::size_t k = (j > 0 ? j - 1 : 0); k <= std::min(j + 1, nx - 1); ++k)
          b(a * nx + j, (a + 1) * nx + k) += s * op.X(k, j);
    }
  }
  return op;
}

std::vector<double> generalV_mass_functional(const GeneralVOperator& op) {
  std::vector<double> m(op.size(), 0.0);
  const double h = op.potential.grid.h();
  for (std::size_t j = 0; j < op.nx; ++j) m[j] = h * std::exp(-0.5 * op.potential.v[j]);
  return m;
}

std::vector<double> generalV_project_admissible(const GeneralVOperator& op, std::span<const double> u) {
  if (u.size() != op.size()) throw DomainError("general potential: state length mismatch");
  const auto m = generalV_mass_functional(op);
  double mm = 0.0, mu = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    mm += m[k] * m[k];
    mu += m[k] * u[k];
  }
  std::vector<double> out(u.begin(), u.end());
  for (std::size_t k = 0; k < m.size(); ++k) out[k] -= (mu / mm) * m[k];
  return out;
}

std::vector<double> generalV_smooth_state(const GeneralVOperator& op, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  std::vector<double> u(op.size(), 0.0);
  for (std::size_t a = 0; a < std::min<std::size_t>(op.nv, 4); ++a) {
    const auto c = rng.normal_vector(4);
    for (std::size_t j = 0; j < op.nx; ++j) {
      const double x = op.potential.x[j];
      u[a * op.nx + j] = std::exp(-0.5 * op.potential.v[j]) * (c[0] + x * (c[1] + x * (c[2] + x * c[3])));
    }
  }
  u = generalV_project_admissible(op, u);
  const double nrm = std::sqrt(grid_dot(op.potential.grid.h(), u, u));
  for (auto& v : u) v /= nrm;
  return u;
}

double boundary_mass_fraction(const GeneralVOperator& op, std::span<const double> u, std::size_t width) {
  double total = 0.0, edge = 0.0;
  for (std::size_t a = 0; a < op.nv; ++a)
    for (std::size_t j = 0; j < op.nx; ++j) {
      const double v = u[a * op.nx + j] * u[a * op.nx + j];
      total += v;
      if (j < width || j + width >= op.nx) edge += v;
    }
  return total > 0.0 ? edge / total : 0.0;
}

GeneralVTrajectory evolve_generalV(const GeneralVOperator& op, std::span<const double> u0,
                                   std::span<const double> t_grid, double dt_max) {
  if (u0.size() != op.size()) throw DomainError("general potential: state length mismatch");
  const auto m = generalV_mass_functional(op);
  const double mass = dot(std::span<const double>(m), u0);
  if (std::abs(mass) > 1e-10 * norm2(std::span<const double>(m)) * std::max(norm2(u0), 1e-300))
    throw AdmissibilityError("initial data violates the mass moment condition");
  GeneralVTrajectory tr;
  tr.t.assign(t_grid.begin(), t_grid.end());
  tr.u = evolve_midpoint(op.generator, u0, t_grid, dt_max, {}, &tr.stats);
  for (const auto& u : tr.u) tr.max_boundary_fraction = std::max(tr.max_boundary_fraction, boundary_mass_fraction(op, u));
  tr.flagged = tr.max_boundary_fraction > 1e-8;
  return tr;
}

namespace {

struct GridNorms {
  double l2 = 0.0;
  double x = 0.0;
  double y = 0.0;
  double cross = 0.0;
};

GridNorms grid_norms(const GeneralVOperator& op, std::span<const double> u) {
  if (u.size() != op.size()) throw DomainError("general potential: state length mismatch");
  const double h = op.potential.grid.h();
  const std::size_t nx = op.nx;
  GridNorms g;
  g.l2 = grid_dot(h, u, u);
  for (std::size_t a = 0; a < op.nv; ++a) {
    const auto ua = u.subspan(a * nx, nx);
    const auto xa = matvec(op.X, ua);
    g.x += grid_dot(h, xa, xa);
    if (a > 0) g.y += static_cast<double>(a) * grid_dot(h, ua, ua);
    if (a == 0 && op.nv > 1) g.cross = grid_dot(h, xa, u.subspan(nx, nx));
  }
  return g;
}

}  // namespace

double generalV_calE(const GeneralVOperator& op, std::span<const double> u, const KappaSet& k) {
  const auto g = grid_norms(op, u);
  return g.l2 + k.kappa1 * g.x + k.kappa2 * g.y + k.kappa3 * g.cross;
}

double generalV_weighted_h1(const GeneralVOperator& op, std::span<const double> u, const KappaSet& k) {
  const auto g = grid_norms(op, u);
  return g.l2 + k.kappa1 * g.x + k.kappa2 * g.y;
}

ConfinedDecayReport generalV_decay_fit(const GeneralVOperator& op, const GeneralVTrajectory& traj,
                                       const KappaSet& kappas, double fit_t0, double fit_t1, double tol) {
  ConfinedDecayReport r;
  r.t = traj.t;
  r.guard_low = std::numeric_limits<double>::infinity();
  for (const auto& u : traj.u) {
    const auto g = grid_norms(op, u);
    const double e = g.l2 + kappas.kappa1 * g.x + kappas.kappa2 * g.y + kappas.kappa3 * g.cross;
    const double ref = g.l2 + kappas.kappa1 * g.x + kappas.kappa2 * g.y;
    r.calE.push_back(e);
    r.h1.push_back(std::sqrt(g.l2 + g.x + g.y));
    if (ref > 0.0) {
      r.guard_low = std::min(r.guard_low, e / ref);
      r.guard_high = std::max(r.guard_high, e / ref);
    }
  }
  r.guard_ok = r.guard_low >= 0.5 && r.guard_high <= 2.0;
  r.energy_fit = fit_exponential(r.t, r.calE, fit_t0, fit_t1);
  r.h1_fit = fit_exponential(r.t, r.h1, fit_t0, fit_t1);
  r.certificate = certify_lyapunov(r.t, r.calE, tol);
  r.energy_fit.pass = r.energy_fit.rate > 0.0;
  r.h1_fit.pass = r.h1_fit.rate > 0.0;
  r.pass = r.guard_ok && r.certificate.lambda > 0.0 && r.energy_fit.pass && !traj.flagged;
  return r;
}

GeneralVKappaSearch search_generalV_kappas(const GeneralVOperator& op, const GeneralVTrajectory& traj,
                                           double fit_t0, double fit_t1, double tol) {
  std::vector<KappaSet> ladder{default_confined_kappas(ModelKind::FokkerPlanck)};
  for (double k : {0.5, 0.2, 0.1, 0.05, 0.02}) {
    KappaSet s;
    s.kappa1 = k;
    s.kappa2 = k;
    s.kappa3 = k / 10.0;
    ladder.push_back(s);
  }
  GeneralVKappaSearch out;
  for (const auto& k : ladder) {
    auto rep = generalV_decay_fit(op, traj, k, fit_t0, fit_t1, tol);
    out.tried.push_back(k);
    out.tried_lambda.push_back(rep.certificate.lambda);
    out.kappas = k;
    out.report = std::move(rep);
    if (out.report.pass) {
      out.found = true;
      break;
    }
  }
  return out;
}

std::vector<double> harmonic_state_on_grid(const PhaseSpaceBasis& basis, std::span<const double> c,
                                           const GridSpec& grid, std::size_t n_velocity_modes) {
  if (basis.dim() != 1) throw DomainError("harmonic_state_on_grid: d must be 1");
  check_grid(grid);
  const std::size_t nx = grid.points;
  std::vector<double> out(n_velocity_modes * nx, 0.0);
  const int n = basis.max_degree();
  const double norm = std::pow(2.0 * std::numbers::pi, -0.25);
  for (std::size_t j = 0; j < nx; ++j) {
    const double x = -grid.R + grid.h() * static_cast<double>(j);
    const auto hv = hermite_values(n, x);
    const double half = norm * std::exp(-0.25 * x * x);
    for (std::size_t k = 0; k < basis.size(); ++k) {
      if (c[k] == 0.0) continue;
      const std::size_t a = static_cast<std::size_t>(basis.velocity().at(basis.velocity_of(k))[0]);
      if (a >= n_velocity_modes) continue;
      const int beta = basis.spatial().at(basis.spatial_of(k))[0];
      out[a * nx + j] += c[k] * hv[static_cast<std::size_t>(beta)] * half;
    }
  }
  return out;
}

}  // namespace hypoflow
