#include "hypoflow/confined.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hypoflow/errors.hpp"
#include "hypoflow/linalg.hpp"

namespace hypoflow {

PhaseSpaceBasis::PhaseSpaceBasis(int d, int n_total) : d_(d), n_(n_total) {
  if (d < 1) throw DomainError("phase basis: d must be >= 1");
  if (n_total < 2) throw DomainError("phase basis: N_total must be >= 2");
  joint_ = enumerate_basis(2 * d, n_total);
  spatial_ = enumerate_basis(d, n_total);
  velocity_ = enumerate_basis(d, n_total);
  const std::size_t ns = spatial_->size();
  const std::size_t nv = velocity_->size();
  table_.assign(ns * nv, npos);
  beta_.resize(joint_->size());
  alpha_.resize(joint_->size());
  const std::size_t du = static_cast<std::size_t>(d);
  for (std::size_t j = 0; j < joint_->size(); ++j) {
    const auto& e = joint_->at(j).entries();
    const std::vector<int> beta(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(du));
    const std::vector<int> alpha(e.begin() + static_cast<std::ptrdiff_t>(du), e.end());
    beta_[j] = spatial_->index_of(beta);
    alpha_[j] = velocity_->index_of(alpha);
    table_[beta_[j] * nv + alpha_[j]] = j;
  }
}

std::size_t PhaseSpaceBasis::find(std::size_t beta, std::size_t alpha) const {
  if (beta >= spatial_->size() || alpha >= velocity_->size()) return npos;
  return table_[beta * velocity_->size() + alpha];
}

std::size_t PhaseSpaceBasis::find(const std::vector<int>& beta, const std::vector<int>& alpha) const {
  const std::size_t b = spatial_->find(beta);
  const std::size_t a = velocity_->find(alpha);
  if (b == npos || a == npos) return npos;
  return find(b, a);
}

namespace {

void check_axis(const PhaseSpaceBasis& basis, std::size_t axis) {
  if (axis >= static_cast<std::size_t>(basis.dim())) throw DomainError("phase ladder: axis out of range");
}

void check_length(const PhaseSpaceBasis& basis, std::span<const double> u) {
  if (u.size() != basis.size()) throw DomainError("phase state: length does not match basis");
}

SparseMatrix lowering_matrix(const BasisTruncation& b, std::size_t axis) {
  std::vector<SparseMatrix::Triplet> t;
  for (std::size_t j = 0; j < b.size(); ++j) {
    const auto& m = b.at(j);
    if (m[axis] == 0) continue;
    t.push_back({b.index_of(m.shifted(axis, -1).entries()), j, std::sqrt(static_cast<double>(m[axis]))});
  }
  return SparseMatrix::from_triplets(b.size(), b.size(), std::move(t));
}

double dotv(std::span<const double> a, std::span<const double> b) { return dot(a, b); }

std::vector<double> kernel_part(const BasisTruncation& vel, std::span<const double> slice, ModelKind model) {
  if (model == ModelKind::Relaxation) return project_P0(vel, slice);
  return project_P(vel, slice, model);
}

}  // namespace

std::vector<double> apply_X(const PhaseSpaceBasis& basis, std::size_t axis, std::span<const double> u) {
  check_axis(basis, axis);
  check_length(basis, u);
  return apply_annihilation(basis.joint(), axis, u);
}

LadderResult<double> apply_Xstar(const PhaseSpaceBasis& basis, std::size_t axis, std::span<const double> u) {
  check_axis(basis, axis);
  check_length(basis, u);
  return apply_creation(basis.joint(), axis, u);
}

std::vector<double> apply_Y(const PhaseSpaceBasis& basis, std::size_t axis, std::span<const double> u) {
  check_axis(basis, axis);
  check_length(basis, u);
  return apply_annihilation(basis.joint(), axis + static_cast<std::size_t>(basis.dim()), u);
}

LadderResult<double> apply_Ystar(const PhaseSpaceBasis& basis, std::size_t axis, std::span<const double> u) {
  check_axis(basis, axis);
  check_length(basis, u);
  return apply_creation(basis.joint(), axis + static_cast<std::size_t>(basis.dim()), u);
}

SparseMatrix phase_X(const PhaseSpaceBasis& basis, std::size_t axis) {
  check_axis(basis, axis);
  return lowering_matrix(basis.joint(), axis);
}

SparseMatrix phase_Y(const PhaseSpaceBasis& basis, std::size_t axis) {
  check_axis(basis, axis);
  return lowering_matrix(basis.joint(), axis + static_cast<std::size_t>(basis.dim()));
}

SparseMatrix assemble_T_harmonic(const PhaseSpaceBasis& basis) {
  const auto& jb = basis.joint();
  const std::size_t d = static_cast<std::size_t>(basis.dim());
  std::vector<SparseMatrix::Triplet> t;
  for (std::size_t j = 0; j < jb.size(); ++j) {
    const auto& m = jb.at(j);
    for (std::size_t i = 0; i < d; ++i) {
      const int bx = m[i];
      const int av = m[d + i];
      if (bx > 0) {
        const auto target = m.shifted(i, -1).shifted(d + i, 1);
        t.push_back({jb.index_of(target.entries()), j, std::sqrt(static_cast<double>(bx) * (av + 1))});
      }
      if (av > 0) {
        const auto target = m.shifted(i, 1).shifted(d + i, -1);
        t.push_back({jb.index_of(target.entries()), j, -std::sqrt(static_cast<double>(av) * (bx + 1))});
      }
    }
  }
  SparseMatrix tm = SparseMatrix::from_triplets(jb.size(), jb.size(), std::move(t));
  const RealMatrix dense_check = tm.to_dense();
  double skew = 0.0;
  bool block = true;
  tm.for_each([&](std::size_t r, std::size_t c, double v) {
    skew = std::max(skew, std::abs(v + dense_check(c, r)));
    if (jb.at(r).degree() != jb.at(c).degree()) block = false;
  });
  if (skew > 1e-12) throw NumericError("transport matrix is not skew-symmetric");
  if (!block) throw NumericError("transport matrix couples different total degrees");
  return tm;
}

ConfinedOperator assemble_generator(ModelKind model, const PhaseSpaceBasis& basis) {
  if (model == ModelKind::BoltzmannSurrogate && basis.max_degree() < 3)
    throw DomainError("confined generator: the Boltzmann surrogate needs N_total >= 3");
  ConfinedOperator op{basis, model, assemble_L(model, basis.velocity_ptr()), assemble_T_harmonic(basis), {}};
  const std::size_t n = basis.size();
  const auto& sp = basis.spatial();
  const auto& vel = basis.velocity();
  RealMatrix b(n, n);
  for (std::size_t s = 0; s < sp.size(); ++s) {
    const std::size_t m = vel.prefix_size(basis.max_degree() - sp.at(s).degree());
    for (std::size_t a = 0; a < m; ++a) {
      const std::size_t r = basis.find(s, a);
      for (std::size_t a2 = 0; a2 < m; ++a2) {
        const double v = op.velocity_L.matrix(a, a2);
        if (v != 0.0) b(r, basis.find(s, a2)) += v;
      }
    }
  }
  op.transport.for_each([&](std::size_t r, std::size_t c, double v) { b(r, c) -= v; });
  op.generator = std::move(b);
  return op;
}

std::vector<double> velocity_slice(const PhaseSpaceBasis& basis, std::span<const double> u, std::size_t beta) {
  check_length(basis, u);
  const auto& vel = basis.velocity();
  std::vector<double> s(vel.size(), 0.0);
  const std::size_t m = vel.prefix_size(basis.max_degree() - basis.spatial().at(beta).degree());
  for (std::size_t a = 0; a < m; ++a) s[a] = u[basis.find(beta, a)];
  return s;
}

FluidFields fluid_fields(const PhaseSpaceBasis& basis, std::span<const double> u, ModelKind model) {
  const std::size_t d = static_cast<std::size_t>(basis.dim());
  const auto& vel = basis.velocity();
  const std::size_t ns = basis.spatial().size();
  const bool third = basis.max_degree() >= 3;
  FluidFields f;
  f.a.assign(ns, 0.0);
  f.b.assign(d, std::vector<double>(ns, 0.0));
  f.c.assign(ns, 0.0);
  f.gamma.assign(d, std::vector<std::vector<double>>(d, std::vector<double>(ns, 0.0)));
  f.lambda.assign(d, std::vector<double>(ns, 0.0));
  const double cnorm = std::numbers::sqrt2 / (2.0 * static_cast<double>(d));
  for (std::size_t s = 0; s < ns; ++s) {
    const auto slice = velocity_slice(basis, u, s);
    f.a[s] = slice[0];
    double tsum = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      f.b[i][s] = slice[vel.unit(i)];
      tsum += slice[vel.double_unit(i)];
    }
    f.c[s] = cnorm * tsum;
    const auto p = kernel_part(vel, slice, model);
    std::vector<double> g(slice.size());
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = slice[k] - p[k];
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) f.gamma[i][j][s] = gamma_entry(vel, std::span<const double>(g), i, j);
      if (third) f.lambda[i][s] = lambda_entry(vel, std::span<const double>(g), i);
    }
  }
  return f;
}

std::vector<double> field_X(const BasisTruncation& spatial, std::size_t axis, std::span<const double> f) {
  return apply_annihilation(spatial, axis, f);
}

std::vector<double> field_Xstar(const BasisTruncation& spatial, std::size_t axis, std::span<const double> f) {
  return apply_creation(spatial, axis, f).values;
}

std::vector<MomentFunctional> conserved_moment_functionals(const PhaseSpaceBasis& basis) {
  const std::size_t d = static_cast<std::size_t>(basis.dim());
  const std::size_t n = basis.size();
  const std::vector<int> zero(d, 0);
  auto unit = [&](std::size_t i, int k) {
    std::vector<int> e(d, 0);
    e[i] = k;
    return e;
  };
  auto entry = [&](const std::vector<int>& beta, const std::vector<int>& alpha) {
    const std::size_t j = basis.find(beta, alpha);
    if (j == PhaseSpaceBasis::npos) throw DomainError("conserved moments: basis too small");
    return j;
  };
  std::vector<MomentFunctional> out;
  auto add = [&](std::string name) -> std::vector<double>& {
    out.push_back({std::move(name), std::vector<double>(n, 0.0)});
    return out.back().coefficients;
  };
  add("mass")[entry(zero, zero)] = 1.0;
  for (std::size_t i = 0; i < d; ++i) add("x_" + std::to_string(i))[entry(unit(i, 1), zero)] = 1.0;
  for (std::size_t i = 0; i < d; ++i) add("xi_" + std::to_string(i))[entry(zero, unit(i, 1))] = 1.0;
  {
    auto& v = add("x_dot_xi");
    for (std::size_t i = 0; i < d; ++i) v[entry(unit(i, 1), unit(i, 1))] = 1.0;
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      auto& v = add("x_wedge_xi_" + std::to_string(i) + std::to_string(j));
      v[entry(unit(i, 1), unit(j, 1))] = 1.0;
      v[entry(unit(j, 1), unit(i, 1))] = -1.0;
    }
  {
    auto& v = add("x_sq");
    v[entry(zero, zero)] = static_cast<double>(d);
    for (std::size_t i = 0; i < d; ++i) v[entry(unit(i, 2), zero)] = std::numbers::sqrt2;
  }
  {
    auto& v = add("xi_sq");
    v[entry(zero, zero)] = static_cast<double>(d);
    for (std::size_t i = 0; i < d; ++i) v[entry(zero, unit(i, 2))] = std::numbers::sqrt2;
  }
  return out;
}

std::vector<double> conserved_moments(const PhaseSpaceBasis& basis, std::span<const double> u) {
  check_length(basis, u);
  std::vector<double> m;
  for (const auto& f : conserved_moment_functionals(basis)) m.push_back(dotv(f.coefficients, u));
  return m;
}

std::vector<MomentFunctional> admissibility_functionals(const PhaseSpaceBasis& basis, ModelKind model) {
  auto all = conserved_moment_functionals(basis);
  if (model != ModelKind::BoltzmannSurrogate) all.resize(1);
  return all;
}

void check_confined_admissible(const ConfinedOperator& op, std::span<const double> u0) {
  check_length(op.basis, u0);
  const double scale = std::max(norm2(u0), 1e-300);
  for (const auto& f : admissibility_functionals(op.basis, op.model)) {
    const double m = dotv(f.coefficients, u0);
    if (std::abs(m) > 1e-10 * scale)
      throw AdmissibilityError("initial data violates the " + f.name + " moment condition (value " +
                               std::to_string(m) + ")");
  }
}

std::vector<double> project_admissible(const ConfinedOperator& op, std::span<const double> u) {
  check_length(op.basis, u);
  std::vector<std::vector<double>> q;
  for (const auto& f : admissibility_functionals(op.basis, op.model)) {
    std::vector<double> v = f.coefficients;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& e : q) {
        const double c = dotv(e, v);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] -= c * e[k];
      }
    const double nv = norm2(std::span<const double>(v));
    if (nv < 1e-12) continue;
    for (auto& x : v) x /= nv;
    q.push_back(std::move(v));
  }
  std::vector<double> out(u.begin(), u.end());
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& e : q) {
      const double c = dotv(e, out);
      for (std::size_t k = 0; k < out.size(); ++k) out[k] -= c * e[k];
    }
  return out;
}

ConfinedTrajectory evolve_confined(const ConfinedOperator& op, std::span<const double> u0,
                                   std::span<const double> t_grid, double dt_max, bool check_admissible) {
  if (check_admissible) check_confined_admissible(op, u0);
  ConfinedTrajectory tr;
  tr.t.assign(t_grid.begin(), t_grid.end());
  tr.u = evolve_midpoint(op.generator, u0, t_grid, dt_max, {}, &tr.stats);
  return tr;
}

double ResidualTable::overall_max() const {
  double m = 0.0;
  for (double v : max_residual) m = std::max(m, v);
  return m;
}

namespace {

void finalize(ResidualTable& table) {
  table.max_residual.assign(table.names.size(), 0.0);
  for (const auto& row : table.per_step)
    for (std::size_t e = 0; e < row.size(); ++e) table.max_residual[e] = std::max(table.max_residual[e], std::abs(row[e]));
}

std::vector<double> midpoint(std::span<const double> a, std::span<const double> b) {
  std::vector<double> m(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) m[k] = 0.5 * (a[k] + b[k]);
  return m;
}

}  // namespace

ResidualTable moment_ode_residuals(const PhaseSpaceBasis& basis, const ConfinedTrajectory& traj) {
  const std::size_t d = static_cast<std::size_t>(basis.dim());
  const auto fns = conserved_moment_functionals(basis);
  ResidualTable table;
  for (const auto& f : fns) table.names.push_back(f.name);
  const std::size_t ix = 1, ixi = 1 + d, idot = 1 + 2 * d, iwedge = idot + 1;
  const std::size_t ixsq = fns.size() - 2, ixisq = fns.size() - 1;
  std::vector<double> prev = conserved_moments(basis, traj.u.front());
  for (std::size_t n = 0; n + 1 < traj.u.size(); ++n) {
    const auto next = conserved_moments(basis, traj.u[n + 1]);
    const double dt = traj.t[n + 1] - traj.t[n];
    const auto mid = midpoint(prev, next);
    std::vector<double> rhs(fns.size(), 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      rhs[ix + i] = mid[ixi + i];
      rhs[ixi + i] = -mid[ix + i];
    }
    rhs[idot] = mid[ixisq] - mid[ixsq];
    for (std::size_t k = iwedge; k < ixsq; ++k) rhs[k] = 0.0;
    rhs[ixsq] = 2.0 * mid[idot];
    rhs[ixisq] = -2.0 * mid[idot];
    std::vector<double> row(fns.size());
    for (std::size_t e = 0; e < fns.size(); ++e) row[e] = (next[e] - prev[e]) / dt - rhs[e];
    table.per_step.push_back(std::move(row));
    prev = next;
  }
  finalize(table);
  return table;
}

FluidResidualReport fluid_residuals(const ConfinedOperator& op, const ConfinedTrajectory& traj) {
  const auto& basis = op.basis;
  const auto& sp = basis.spatial();
  const std::size_t d = static_cast<std::size_t>(basis.dim());
  const double dd = static_cast<double>(d);
  const int n_total = basis.max_degree();
  const bool boltz = op.model == ModelKind::BoltzmannSurrogate;
  FluidResidualReport rep;
  auto& table = rep.table;
  table.names.push_back("mass");
  for (std::size_t j = 0; j < d; ++j) table.names.push_back("momentum_" + std::to_string(j));
  if (boltz) {
    table.names.push_back("energy");
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) table.names.push_back("gamma_" + std::to_string(i) + std::to_string(j));
    for (std::size_t i = 0; i < d; ++i) table.names.push_back("lambda_" + std::to_string(i));
    for (std::size_t j = 0; j < d; ++j) rep.diagnostic_names.push_back("printed_momentum_" + std::to_string(j));
    for (std::size_t i = 0; i < d; ++i) rep.diagnostic_names.push_back("printed_lambda_" + std::to_string(i));
    rep.diagnostic_max.assign(rep.diagnostic_names.size(), 0.0);
  }
  auto max_over = [&](const std::vector<double>& v, int vel_degree) {
    double m = 0.0;
    for (std::size_t s = 0; s < sp.size(); ++s)
      if (sp.at(s).degree() + vel_degree <= n_total) m = std::max(m, std::abs(v[s]));
    return m;
  };
  auto xf = [&](std::size_t i, const std::vector<double>& f) { return field_X(sp, i, f); };
  auto xs = [&](std::size_t i, const std::vector<double>& f) { return field_Xstar(sp, i, f); };
  const std::size_t ns = sp.size();

  FluidFields prev = fluid_fields(basis, traj.u.front(), op.model);
  for (std::size_t n = 0; n + 1 < traj.u.size(); ++n) {
    const double dt = traj.t[n + 1] - traj.t[n];
    const FluidFields next = fluid_fields(basis, traj.u[n + 1], op.model);
    const auto umid = midpoint(traj.u[n], traj.u[n + 1]);
    const FluidFields mid = fluid_fields(basis, umid, op.model);
    std::vector<double> row;

    std::vector<double> r(ns, 0.0);
    for (std::size_t s = 0; s < ns; ++s) r[s] = (next.a[s] - prev.a[s]) / dt;
    for (std::size_t i = 0; i < d; ++i) {
      const auto t = xs(i, mid.b[i]);
      for (std::size_t s = 0; s < ns; ++s) r[s] -= t[s];
    }
    row.push_back(max_over(r, 0));

    std::vector<std::vector<double>> mom_base(d);
    for (std::size_t j = 0; j < d; ++j) {
      std::vector<double> q(ns, 0.0);
      const auto xa = xf(j, mid.a);
      for (std::size_t s = 0; s < ns; ++s) q[s] = (next.b[j][s] - prev.b[j][s]) / dt + xa[s];
      for (std::size_t i = 0; i < d; ++i) {
        const auto t = xs(i, mid.gamma[i][j]);
        for (std::size_t s = 0; s < ns; ++s) q[s] -= t[s];
      }
      mom_base[j] = q;
      if (boltz) {
        const auto xc = xs(j, mid.c);
        for (std::size_t s = 0; s < ns; ++s) q[s] -= 2.0 * xc[s];
      } else {
        for (std::size_t s = 0; s < ns; ++s) q[s] += mid.b[j][s];
      }
      row.push_back(max_over(q, 1));
    }

    if (boltz) {
      std::vector<double> gmid(umid.size());
      {
        std::vector<double> pu(umid.size(), 0.0);
        for (std::size_t s = 0; s < ns; ++s) {
          const auto slice = velocity_slice(basis, umid, s);
          const auto p = kernel_part(basis.velocity(), slice, op.model);
          const std::size_t m = basis.velocity().prefix_size(n_total - sp.at(s).degree());
          for (std::size_t a = 0; a < m; ++a) pu[basis.find(s, a)] = p[a];
        }
        for (std::size_t k = 0; k < umid.size(); ++k) gmid[k] = umid[k] - pu[k];
      }
      const auto rvec = matvec(op.generator, std::span<const double>(gmid));
      std::vector<std::vector<std::vector<double>>> gam_r(d, std::vector<std::vector<double>>(d, std::vector<double>(ns, 0.0)));
      std::vector<std::vector<double>> lam_r(d, std::vector<double>(ns, 0.0));
      for (std::size_t s = 0; s < ns; ++s) {
        const auto slice = velocity_slice(basis, rvec, s);
        for (std::size_t i = 0; i < d; ++i) {
          for (std::size_t j = 0; j < d; ++j) gam_r[i][j][s] = gamma_entry(basis.velocity(), std::span<const double>(slice), i, j);
          lam_r[i][s] = lambda_entry(basis.velocity(), std::span<const double>(slice), i);
        }
      }

      std::vector<double> e(ns, 0.0);
      for (std::size_t s = 0; s < ns; ++s) e[s] = (next.c[s] - prev.c[s]) / dt;
      for (std::size_t i = 0; i < d; ++i) {
        const auto xb = xf(i, mid.b[i]);
        const auto xl = xs(i, mid.lambda[i]);
        for (std::size_t s = 0; s < ns; ++s) e[s] += xb[s] / dd - xl[s] / (2.0 * dd);
      }
      row.push_back(max_over(e, 2));

      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
          const auto xbj = xf(i, mid.b[j]);
          const auto xbi = xf(j, mid.b[i]);
          std::vector<double> q(ns, 0.0);
          for (std::size_t s = 0; s < ns; ++s) {
            const double delta = i == j ? 2.0 : 0.0;
            const double now = next.gamma[i][j][s] + delta * next.c[s];
            const double before = prev.gamma[i][j][s] + delta * prev.c[s];
            q[s] = (now - before) / dt + xbj[s] + xbi[s] - gam_r[i][j][s];
          }
          row.push_back(max_over(q, 2));
        }

      std::vector<std::vector<double>> lam_base(d);
      for (std::size_t i = 0; i < d; ++i) {
        const auto xc = xf(i, mid.c);
        std::vector<double> q(ns, 0.0), printed(ns, 0.0);
        for (std::size_t s = 0; s < ns; ++s) {
          const double base = (next.lambda[i][s] - prev.lambda[i][s]) / dt - lam_r[i][s];
          q[s] = base + (2.0 * dd + 4.0) * xc[s];
          printed[s] = base + xc[s];
        }
        row.push_back(max_over(q, 3));
        lam_base[i] = printed;
      }

      for (std::size_t j = 0; j < d; ++j) {
        const auto xc = xf(j, mid.c);
        std::vector<double> q = mom_base[j];
        for (std::size_t s = 0; s < ns; ++s) q[s] += 2.0 * xc[s];
        rep.diagnostic_max[j] = std::max(rep.diagnostic_max[j], max_over(q, 1));
      }
      for (std::size_t i = 0; i < d; ++i)
        rep.diagnostic_max[d + i] = std::max(rep.diagnostic_max[d + i], max_over(lam_base[i], 3));
    }
    table.per_step.push_back(std::move(row));
    prev = next;
  }
  finalize(table);
  return rep;
}

KappaSet default_confined_kappas(ModelKind model) {
  KappaSet k;
  switch (model) {
    case ModelKind::Relaxation:
      k.kappa = 0.1;
      break;
    case ModelKind::FokkerPlanck:
      k.kappa1 = 0.5;
      k.kappa2 = 0.25;
      k.kappa3 = 0.05;
      break;
    case ModelKind::BoltzmannSurrogate:
      k.kappa1 = 0.1;
      k.kappa2 = 0.01;
      k.kappa3 = 0.5;
      k.kappa4 = 0.02;
      break;
  }
  return k;
}

namespace {

struct LadderNorms {
  double l2 = 0.0;
  double x = 0.0;
  double y = 0.0;
};

LadderNorms ladder_norms(const PhaseSpaceBasis& basis, std::span<const double> u) {
  check_length(basis, u);
  LadderNorms n;
  n.l2 = dotv(u, u);
  for (std::size_t i = 0; i < static_cast<std::size_t>(basis.dim()); ++i) {
    const auto xu = apply_X(basis, i, u);
    const auto yu = apply_Y(basis, i, u);
    n.x += dotv(xu, xu);
    n.y += dotv(yu, yu);
  }
  return n;
}

std::pair<double, double> h1_weights(ModelKind model, const KappaSet& k) {
  switch (model) {
    case ModelKind::Relaxation:
      return {1.0, 1.0};
    case ModelKind::FokkerPlanck:
      return {k.kappa1, k.kappa2};
    case ModelKind::BoltzmannSurrogate:
      return {k.kappa3, k.kappa3};
  }
  return {1.0, 1.0};
}

}  // namespace

double h1_norm_sq(const PhaseSpaceBasis& basis, std::span<const double> u) {
  const auto n = ladder_norms(basis, u);
  return n.l2 + n.x + n.y;
}

double weighted_h1_norm_sq(const PhaseSpaceBasis& basis, ModelKind model, std::span<const double> u,
                           const KappaSet& kappas) {
  const auto n = ladder_norms(basis, u);
  const auto [wx, wy] = h1_weights(model, kappas);
  return n.l2 + wx * n.x + wy * n.y;
}

double cross_Xa_b(const PhaseSpaceBasis& basis, std::span<const double> u) {
  const auto f = fluid_fields(basis, u, ModelKind::Relaxation);
  double s = 0.0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(basis.dim()); ++i)
    s += dotv(field_X(basis.spatial(), i, f.a), f.b[i]);
  return s;
}

double lyapunov_calE_int(const PhaseSpaceBasis& basis, std::span<const double> u, double kappa1, double kappa2) {
  if (basis.max_degree() < 3) throw DomainError("calE_int: requires N_total >= 3");
  const std::size_t d = static_cast<std::size_t>(basis.dim());
  const auto& sp = basis.spatial();
  const auto f = fluid_fields(basis, u, ModelKind::BoltzmannSurrogate);
  double t1 = 0.0, t2 = 0.0, t3 = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    t1 += dotv(field_X(sp, i, f.c), f.lambda[i]);
    t3 += dotv(field_X(sp, i, f.a), f.b[i]);
    for (std::size_t j = 0; j < d; ++j) {
      const auto xbj = field_X(sp, i, f.b[j]);
      const auto xbi = field_X(sp, j, f.b[i]);
      for (std::size_t s = 0; s < sp.size(); ++s) {
        const double rhs = f.gamma[i][j][s] + (i == j ? 2.0 * f.c[s] : 0.0);
        t2 += (xbj[s] + xbi[s]) * rhs;
      }
    }
  }
  return t1 + kappa1 * t2 + kappa2 * t3;
}

double lyapunov_calE_unchecked(const PhaseSpaceBasis& basis, ModelKind model, std::span<const double> u,
                               const KappaSet& kappas) {
  const auto n = ladder_norms(basis, u);
  switch (model) {
    case ModelKind::Relaxation:
      return n.l2 + n.x + n.y + kappas.kappa * cross_Xa_b(basis, u);
    case ModelKind::FokkerPlanck:
      return n.l2 + kappas.kappa1 * n.x + kappas.kappa2 * n.y + kappas.kappa3 * cross_Xa_b(basis, u);
    case ModelKind::BoltzmannSurrogate:
      return n.l2 + kappas.kappa3 * (n.x + n.y) +
             kappas.kappa4 * lyapunov_calE_int(basis, u, kappas.kappa1, kappas.kappa2);
  }
  return 0.0;
}

double lyapunov_calE(const PhaseSpaceBasis& basis, ModelKind model, std::span<const double> u,
                     const KappaSet& kappas) {
  const double e = lyapunov_calE_unchecked(basis, model, u, kappas);
  const double ref = weighted_h1_norm_sq(basis, model, u, kappas);
  if (e < 0.5 * ref - 1e-14 * ref || e > 2.0 * ref + 1e-14 * ref)
    throw GuardViolation("calE outside [1/2, 2] x weighted H1 norm: ratio " + std::to_string(ref > 0 ? e / ref : 0.0));
  return e;
}

LyapunovCertificate certify_lyapunov(std::span<const double> t, std::span<const double> values, double tol) {
  if (t.size() != values.size() || t.size() < 2) throw DomainError("certificate: need at least two samples");
  LyapunovCertificate c;
  c.lambda = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n + 1 < t.size(); ++n) {
    if (!(values[n] > 0.0)) continue;
    const double dt = t[n + 1] - t[n];
    const double slope = (values[n + 1] - values[n]) / dt;
    c.lambda = std::min(c.lambda, tol - slope / values[n]);
    ++c.steps;
  }
  if (c.steps == 0) {
    c.lambda = 0.0;
    return c;
  }
  c.worst_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n + 1 < t.size(); ++n) {
    if (!(values[n] > 0.0)) continue;
    const double dt = t[n + 1] - t[n];
    const double lhs = (values[n + 1] - values[n]) / dt + c.lambda * values[n];
    c.worst_violation = std::max(c.worst_violation, lhs / values[n] - tol);
  }
  return c;
}

ConfinedDecayReport h1_decay_fit(const PhaseSpaceBasis& basis, ModelKind model, const ConfinedTrajectory& traj,
                                 const KappaSet& kappas, double fit_t0, double fit_t1, double tol) {
  ConfinedDecayReport r;
  r.t = traj.t;
  r.guard_low = std::numeric_limits<double>::infinity();
  r.guard_high = 0.0;
  for (const auto& u : traj.u) {
    const double e = lyapunov_calE_unchecked(basis, model, u, kappas);
    const double ref = weighted_h1_norm_sq(basis, model, u, kappas);
    r.calE.push_back(e);
    r.h1.push_back(std::sqrt(h1_norm_sq(basis, u)));
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
  r.pass = r.guard_ok && r.certificate.lambda > 0.0 && r.energy_fit.pass;
  return r;
}

}  // namespace hypoflow
