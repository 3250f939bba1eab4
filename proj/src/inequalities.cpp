#include "hypoflow/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "hypoflow/errors.hpp"
#include "hypoflow/linalg.hpp"
#include "hypoflow/random.hpp"

namespace hypoflow {

FieldSpace::FieldSpace(int d, int n, int components)
    : d_(d), n_(n), components_(components), basis_(enumerate_basis(d, n)) {
  if (components < 1) throw DomainError("FieldSpace: need at least one component");
  const std::size_t nb = basis_->size();
  const auto nc = static_cast<std::size_t>(components);
  size_ = nb * nc;
  dof_of_.assign(size_, 0);
  pos_of_.assign(size_, 0);
  block_offsets_.push_back(0);
  std::size_t next = 0;
  for (int k = 0; k <= n; ++k) {
    const std::size_t lo = k == 0 ? 0 : basis_->prefix_size(k - 1);
    const std::size_t hi = basis_->prefix_size(k);
    for (std::size_t c = 0; c < nc; ++c)
      for (std::size_t a = lo; a < hi; ++a) {
        dof_of_[c * nb + a] = next;
        pos_of_[next] = c * nb + a;
        ++next;
      }
    block_offsets_.push_back(next);
  }
}

std::size_t FieldSpace::dof(int component, std::size_t basis_index) const {
  return dof_of_[static_cast<std::size_t>(component) * basis_->size() + basis_index];
}
int FieldSpace::component_of(std::size_t dof) const { return static_cast<int>(pos_of_[dof] / basis_->size()); }
std::size_t FieldSpace::basis_index_of(std::size_t dof) const { return pos_of_[dof] % basis_->size(); }
int FieldSpace::degree_of(std::size_t dof) const { return basis_->at(basis_index_of(dof)).degree(); }

std::vector<double> FieldSpace::to_components(std::span<const double> u) const {
  if (u.size() != size_) throw DomainError("FieldSpace: length mismatch");
  std::vector<double> c(size_);
  for (std::size_t k = 0; k < size_; ++k) c[pos_of_[k]] = u[k];
  return c;
}

std::vector<double> FieldSpace::from_components(std::span<const double> c) const {
  if (c.size() != size_) throw DomainError("FieldSpace: length mismatch");
  std::vector<double> u(size_);
  for (std::size_t k = 0; k < size_; ++k) u[dof_of_[k]] = c[k];
  return u;
}

namespace {

using SparseRow = std::vector<std::pair<std::size_t, double>>;

// Gram matrix Σ_rows rowᵀrow of a stacked sparse operator.
RealMatrix gram(std::size_t n, const std::vector<SparseRow>& rows) {
  RealMatrix a(n, n);
  for (const auto& r : rows)
    for (const auto& [p, vp] : r)
      for (const auto& [q, vq] : r) a(p, q) += vp * vq;
  return a;
}

// Rows of ∂_i applied to component c, indexed by the output basis element.
void add_derivative(const FieldSpace& s, std::size_t axis, int component, double scale,
                    std::vector<SparseRow>& rows, std::size_t row_offset) {
  const auto& basis = s.basis();
  for (std::size_t a = 0; a < basis.size(); ++a) {
    const MultiIndex& alpha = basis.at(a);
    const int ai = alpha[axis];
    if (ai == 0) continue;
    const std::size_t target = basis.find(alpha.shifted(axis, -1));
    rows[row_offset + target].emplace_back(s.dof(component, a), scale * std::sqrt(static_cast<double>(ai)));
  }
}

void require_vector_field(const FieldSpace& s, const char* who) {
  if (s.dim() < 2) throw DomainError(std::string(who) + ": requires d >= 2 (rotation constraints are empty for d = 1)");
  if (s.components() != s.dim()) throw DomainError(std::string(who) + ": field needs d components");
}

RealMatrix symmetrized_gradient_matrix(const FieldSpace& s) {
  const auto d = static_cast<std::size_t>(s.dim());
  const std::size_t nb = s.basis().size();
  std::vector<SparseRow> rows(d * d * nb);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const std::size_t off = (i * d + j) * nb;
      add_derivative(s, i, static_cast<int>(j), 1.0, rows, off);
      add_derivative(s, j, static_cast<int>(i), 1.0, rows, off);
    }
  for (auto& r : rows) {
    std::sort(r.begin(), r.end());
    SparseRow merged;
    for (const auto& e : r) {
      if (!merged.empty() && merged.back().first == e.first) merged.back().second += e.second;
      else merged.push_back(e);
    }
    r = std::move(merged);
  }
  return gram(s.size(), rows);
}

RealMatrix gradient_matrix(const FieldSpace& s) {
  const auto d = static_cast<std::size_t>(s.dim());
  const std::size_t nb = s.basis().size();
  const auto nc = static_cast<std::size_t>(s.components());
  std::vector<SparseRow> rows(d * nc * nb);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t c = 0; c < nc; ++c) add_derivative(s, i, static_cast<int>(c), 1.0, rows, (i * nc + c) * nb);
  return gram(s.size(), rows);
}

RealMatrix sub_block(const RealMatrix& a, std::size_t lo, std::size_t hi) {
  RealMatrix b(hi - lo, hi - lo);
  for (std::size_t i = lo; i < hi; ++i)
    for (std::size_t j = lo; j < hi; ++j) b(i - lo, j - lo) = a(i, j);
  return b;
}

bool is_identity(const RealMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != (i == j ? 1.0 : 0.0)) return false;
  return true;
}

// Columns spanning the orthogonal complement of the given orthonormal vectors, via the projector.
RealMatrix feasible_basis(std::size_t n, const std::vector<std::vector<double>>& q) {
  if (q.empty()) return RealMatrix::identity(n);
  RealMatrix p = RealMatrix::identity(n);
  for (const auto& v : q)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) p(i, j) -= v[i] * v[j];
  const EigenResult r = jacobi_eigen(p);
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < n; ++k)
    if (r.values[k] > 0.5) keep.push_back(k);
  if (keep.size() != n - q.size()) throw NumericError("constraint projector has an unexpected rank");
  RealMatrix z(n, keep.size());
  for (std::size_t c = 0; c < keep.size(); ++c)
    for (std::size_t i = 0; i < n; ++i) z(i, c) = r.vectors(i, keep[c]);
  return z;
}

RealMatrix congruence(const RealMatrix& z, const RealMatrix& a) {
  RealMatrix r = matmul(matmul(z.transpose(), a), z);
  for (std::size_t i = 0; i < r.rows(); ++i)
    for (std::size_t j = i + 1; j < r.cols(); ++j) r(i, j) = r(j, i) = 0.5 * (r(i, j) + r(j, i));
  return r;
}

double max_symmetry_defect(const RealMatrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - a(j, i)));
  return m;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

double min_unconstrained_eigenvalue(const FieldSpace& s, const RealMatrix& a) {
  double m = 0.0;
  bool first = true;
  for (int k = 0; k <= s.max_degree(); ++k) {
    const std::size_t lo = s.block_begin(k), hi = s.block_end(k);
    if (hi == lo) continue;
    const double v = jacobi_eigen(sub_block(a, lo, hi)).values.front();
    m = first ? v : std::min(m, v);
    first = false;
  }
  return m;
}

ConstantReport ladder_report(std::string name, int d, int n_coarse, int n_fine, const FieldSpace& space,
                             const QuadraticFormPair& pair) {
  ConstantReport rep;
  rep.name = std::move(name);
  rep.d = d;
  rep.n_coarse = n_coarse;
  rep.n_fine = n_fine;
  const auto blocks = constrained_block_minima(space, pair);
  // Degree blocks do not depend on N, so the block minima at n_fine give the whole ladder.
  for (int n = n_coarse; n <= n_fine; ++n) {
    double best = 0.0;
    bool any = false;
    for (const auto& b : blocks) {
      if (b.degree > n) continue;
      best = any ? std::min(best, b.lambda) : b.lambda;
      any = true;
    }
    if (!any) throw NumericError(rep.name + ": no feasible direction at N = " + std::to_string(n));
    rep.ladder_n.push_back(n);
    rep.ladder_lambda.push_back(best);
  }
  for (std::size_t k = 1; k < rep.ladder_lambda.size(); ++k)
    if (rep.ladder_lambda[k] > rep.ladder_lambda[k - 1] * (1.0 + 1e-12) + 1e-14) rep.monotone = false;
  rep.lambda_coarse = rep.ladder_lambda.front();
  rep.lambda_fine = rep.ladder_lambda.back();
  rep.drift = rep.lambda_fine != 0.0 ? std::abs(rep.lambda_coarse - rep.lambda_fine) / std::abs(rep.lambda_fine) : 0.0;
  const BlockMinimum* arg = nullptr;
  for (const auto& b : blocks) {
    rep.constraint_residual = std::max(rep.constraint_residual, b.constraint_residual);
    if (!arg || b.lambda < arg->lambda) arg = &b;
  }
  rep.witness = arg->witness;
  rep.witness_degree = arg->degree;
  rep.min_form_eigenvalue = min_unconstrained_eigenvalue(space, pair.form);
  return rep;
}

}  // namespace

double quadratic_value(const RealMatrix& a, std::span<const double> u) {
  const auto au = matvec(a, u);
  return dot(u, std::span<const double>(au));
}

std::vector<std::vector<double>> mean_constraints(const FieldSpace& s) {
  std::vector<std::vector<double>> out;
  for (int c = 0; c < s.components(); ++c) {
    std::vector<double> v(s.size(), 0.0);
    v[s.dof(c, 0)] = 1.0;
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<std::vector<double>> rotation_constraints(const FieldSpace& s) {
  require_vector_field(s, "rotation_constraints");
  const auto d = static_cast<std::size_t>(s.dim());
  std::vector<std::vector<double>> out;
  // ∫(x_i b_j − x_j b_i)dμ: x_i is the unit Hermite polynomial along axis i.
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      std::vector<double> v(s.size(), 0.0);
      v[s.dof(static_cast<int>(j), s.basis().unit(i))] = 1.0;
      v[s.dof(static_cast<int>(i), s.basis().unit(j))] = -1.0;
      out.push_back(std::move(v));
    }
  return out;
}

QuadraticFormPair poincare_form(const FieldSpace& s) {
  if (s.components() != 1) throw DomainError("poincare_form: scalar field expected");
  QuadraticFormPair p{gradient_matrix(s), RealMatrix::identity(s.size()), mean_constraints(s)};
  return p;
}

QuadraticFormPair korn_form(const FieldSpace& s) {
  require_vector_field(s, "korn_form");
  auto cons = mean_constraints(s);
  for (auto& r : rotation_constraints(s)) cons.push_back(std::move(r));
  return {symmetrized_gradient_matrix(s), RealMatrix::identity(s.size()), std::move(cons)};
}

QuadraticFormPair korn_gradient_form(const FieldSpace& s) {
  QuadraticFormPair p = korn_form(s);
  p.mass = gradient_matrix(s);
  return p;
}

std::vector<BlockMinimum> constrained_block_minima(const FieldSpace& s, const QuadraticFormPair& pair) {
  const std::size_t n = s.size();
  if (pair.form.rows() != n || pair.mass.rows() != n) throw DomainError("constrained_block_minima: size mismatch");
  const double scale = std::max(1.0, pair.form.max_abs());
  if (max_symmetry_defect(pair.form) > 1e-12 * scale) throw NumericError("form matrix is not symmetric");
  const bool identity_mass = is_identity(pair.mass);

  std::vector<std::vector<std::vector<double>>> per_block(static_cast<std::size_t>(s.max_degree()) + 1);
  for (const auto& c : pair.constraints) {
    if (c.size() != n) throw DomainError("constraint length mismatch");
    int block = -1;
    for (std::size_t k = 0; k < n; ++k) {
      if (c[k] == 0.0) continue;
      const int deg = s.degree_of(k);
      if (block >= 0 && deg != block) throw NumericError("constraint straddles degree blocks");
      block = deg;
    }
    if (block < 0) throw DomainError("zero constraint functional");
    per_block[static_cast<std::size_t>(block)].push_back(c);
  }

  std::vector<BlockMinimum> out;
  for (int k = 0; k <= s.max_degree(); ++k) {
    const std::size_t lo = s.block_begin(k), hi = s.block_end(k), m = hi - lo;
    // Gram–Schmidt on the block-restricted constraints.
    std::vector<std::vector<double>> q;
    for (const auto& c : per_block[static_cast<std::size_t>(k)]) {
      std::vector<double> v(c.begin() + static_cast<std::ptrdiff_t>(lo), c.begin() + static_cast<std::ptrdiff_t>(hi));
      const double n0 = norm2(std::span<const double>(v));
      for (const auto& u : q) {
        const double pr = dot(std::span<const double>(u), std::span<const double>(v));
        for (std::size_t i = 0; i < m; ++i) v[i] -= pr * u[i];
      }
      const double nv = norm2(std::span<const double>(v));
      if (nv <= 1e-10 * n0) throw DomainError("constraints are linearly dependent");
      for (auto& x : v) x /= nv;
      q.push_back(std::move(v));
    }
    if (q.size() >= m) continue;
    const RealMatrix z = feasible_basis(m, q);
    const RealMatrix a = congruence(z, sub_block(pair.form, lo, hi));
    EigenResult r = identity_mass ? jacobi_eigen(a) : generalized_eigen(a, congruence(z, sub_block(pair.mass, lo, hi)));
    BlockMinimum bm;
    bm.degree = k;
    bm.feasible_dim = z.cols();
    bm.lambda = r.values.front();
    bm.witness.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      double s_ = 0.0;
      for (std::size_t c = 0; c < z.cols(); ++c) s_ += z(i, c) * r.vectors(c, 0);
      bm.witness[lo + i] = s_;
    }
    for (const auto& c : pair.constraints)
      bm.constraint_residual = std::max(bm.constraint_residual,
                                        std::abs(dot(std::span<const double>(c), std::span<const double>(bm.witness))));
    out.push_back(std::move(bm));
  }
  return out;
}

ConstantReport poincare_constant(int d, int n) {
  const FieldSpace space(d, n, 1);
  ConstantReport rep = ladder_report("poincare", d, n, n, space, poincare_form(space));
  rep.pass = std::abs(rep.lambda_fine - 1.0) <= 1e-10 && rep.witness_degree == 1 && rep.min_form_eigenvalue >= -1e-10;
  rep.verdict = (rep.pass ? "pass: " : "fail: ") + std::string("lambda = ") + fmt(rep.lambda_fine) +
                ", witness degree " + std::to_string(rep.witness_degree);
  return rep;
}

ConstantReport korn_constant(int d, int n_coarse, int n_fine) {
  if (d < 2) throw DomainError("korn_constant: requires d >= 2 (rotation constraints are empty for d = 1)");
  if (n_coarse > n_fine) throw DomainError("korn_constant: n_coarse must not exceed n_fine");
  const FieldSpace space(d, n_fine, d);
  ConstantReport rep = ladder_report("korn", d, n_coarse, n_fine, space, korn_form(space));
  rep.pass = rep.lambda_fine > 0.0 && rep.drift < 0.05 && rep.lambda_fine <= 4.0 + 1e-10 && rep.monotone &&
             rep.constraint_residual <= 1e-12 && rep.min_form_eigenvalue >= -1e-10;
  rep.verdict = (rep.pass ? "pass: " : "fail: ") + std::string("lambda = ") + fmt(rep.lambda_fine) +
                ", drift = " + fmt(rep.drift);
  return rep;
}

ConstantReport korn_gradient_constant(int d, int n_coarse, int n_fine) {
  if (d < 2) throw DomainError("korn_gradient_constant: requires d >= 2 (rotation constraints are empty for d = 1)");
  if (n_coarse > n_fine) throw DomainError("korn_gradient_constant: n_coarse must not exceed n_fine");
  const FieldSpace space(d, n_fine, d);
  ConstantReport rep = ladder_report("korn-gradient", d, n_coarse, n_fine, space, korn_gradient_form(space));
  rep.pass = rep.lambda_fine > 0.0 && rep.lambda_fine <= 2.0 + 1e-10 && rep.drift < 0.05 && rep.monotone &&
             rep.constraint_residual <= 1e-12 && rep.min_form_eigenvalue >= -1e-10;
  rep.verdict = (rep.pass ? "pass: " : "fail: ") + std::string("lambda = ") + fmt(rep.lambda_fine) +
                ", drift = " + fmt(rep.drift);
  return rep;
}

KernelWitnessReport kernel_witness_suite(int d, int n_max) {
  if (d < 2) throw DomainError("kernel_witness_suite: requires d >= 2");
  if (n_max < 2) throw DomainError("kernel_witness_suite: requires N >= 2");
  KernelWitnessReport rep;
  rep.d = d;
  rep.expected_dim = d + d * (d - 1) / 2;
  const FieldSpace space(d, n_max, d);
  const RealMatrix a = symmetrized_gradient_matrix(space);
  std::vector<int> null_per_block;
  for (int k = 0; k <= n_max; ++k) {
    const std::size_t lo = space.block_begin(k), hi = space.block_end(k);
    const EigenResult r = jacobi_eigen(sub_block(a, lo, hi));
    int count = 0;
    for (std::size_t c = 0; c < r.values.size(); ++c) {
      if (r.values[c] >= 1e-10) continue;
      ++count;
      std::vector<double> w(space.size(), 0.0);
      for (std::size_t i = lo; i < hi; ++i) w[i] = r.vectors(i - lo, c);
      rep.max_witness_rayleigh = std::max(rep.max_witness_rayleigh, std::abs(quadratic_value(a, w)));
      for (std::size_t i = 0; i < w.size(); ++i)
        if (std::abs(w[i]) > 1e-12) rep.max_witness_degree = std::max(rep.max_witness_degree, space.degree_of(i));
      rep.witnesses.push_back(std::move(w));
    }
    null_per_block.push_back(count);
  }
  int running = null_per_block[0] + null_per_block[1];
  for (int n = 2; n <= n_max; ++n) {
    running += null_per_block[static_cast<std::size_t>(n)];
    rep.ladder_n.push_back(n);
    rep.nullspace_dim.push_back(running);
  }
  rep.pass = std::all_of(rep.nullspace_dim.begin(), rep.nullspace_dim.end(),
                         [&](int k) { return k == rep.expected_dim; }) &&
             rep.max_witness_degree <= 1 && rep.max_witness_rayleigh < 1e-10;
  return rep;
}

namespace {

double ladder_symmetrized_value(const BasisTruncation& basis, int d, std::span<const double> c) {
  const std::size_t nb = basis.size();
  std::vector<std::vector<double>> grad(static_cast<std::size_t>(d) * static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      grad[static_cast<std::size_t>(i * d + j)] =
          apply_annihilation(basis, static_cast<std::size_t>(i), c.subspan(static_cast<std::size_t>(j) * nb, nb));
  double total = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const auto& g1 = grad[static_cast<std::size_t>(i * d + j)];
      const auto& g2 = grad[static_cast<std::size_t>(j * d + i)];
      for (std::size_t k = 0; k < nb; ++k) total += (g1[k] + g2[k]) * (g1[k] + g2[k]);
    }
  return total;
}

}  // namespace

double substitution_identity_gap(int d, int n, std::uint64_t seed, int trials) {
  const BasisTruncation basis(d, n);
  const std::size_t nb = basis.size();
  const auto du = static_cast<std::size_t>(d);
  const TensorQuadrature quad = tensor_rule(d, n + 1);
  Xoshiro256 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto c = rng.normal_vector(du * nb);
    const double ladder = ladder_symmetrized_value(basis, d, c);
    double mu = 0.0;
    for (std::size_t p = 0; p < quad.points.size(); ++p) {
      std::vector<std::vector<double>> val(du), der(du);
      for (std::size_t ax = 0; ax < du; ++ax) {
        val[ax] = hermite_values(n, quad.points[p][ax]);
        der[ax] = hermite_derivatives(n, quad.points[p][ax]);
      }
      // ∂_i b̃_j at the node, from polynomial derivatives.
      std::vector<double> g(du * du, 0.0);
      for (std::size_t a = 0; a < nb; ++a) {
        const MultiIndex& alpha = basis.at(a);
        for (std::size_t i = 0; i < du; ++i) {
          double prod = 1.0;
          for (std::size_t ax = 0; ax < du; ++ax)
            prod *= ax == i ? der[ax][static_cast<std::size_t>(alpha[ax])] : val[ax][static_cast<std::size_t>(alpha[ax])];
          for (std::size_t j = 0; j < du; ++j) g[i * du + j] += c[j * nb + a] * prod;
        }
      }
      double s = 0.0;
      for (std::size_t i = 0; i < du; ++i)
        for (std::size_t j = 0; j < du; ++j) {
          const double e = g[i * du + j] + g[j * du + i];
          s += e * e;
        }
      mu += quad.weights[p] * s;
    }
    worst = std::max(worst, std::abs(ladder - mu) / std::max(1.0, std::abs(mu)));
  }
  return worst;
}

double korn_split_identity_gap(int d, int n, std::uint64_t seed, int trials) {
  const BasisTruncation basis(d, n);
  const BasisTruncation wide(d, n + 1);
  const std::size_t nb = basis.size();
  const auto du = static_cast<std::size_t>(d);
  Xoshiro256 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto c = rng.normal_vector(du * nb);
    const double form = ladder_symmetrized_value(basis, d, c);
    double grad = 0.0, mass = 0.0;
    std::vector<double> div(wide.size(), 0.0);
    for (std::size_t j = 0; j < du; ++j) {
      const auto bj = std::span<const double>(c).subspan(j * nb, nb);
      mass += dot(bj, bj);
      for (std::size_t i = 0; i < du; ++i) {
        const auto g = apply_annihilation(basis, i, bj);
        grad += dot(std::span<const double>(g), std::span<const double>(g));
      }
      // X_j* b_j = (½∂_jV − ∂_j)b_j; the prefix embedding into the wider basis preserves indices.
      std::vector<double> embedded(wide.size(), 0.0);
      std::copy(bj.begin(), bj.end(), embedded.begin());
      const auto up = apply_creation(wide, j, std::span<const double>(embedded));
      if (up.dropped_mass != 0.0) throw NumericError("korn_split_identity_gap: creation left the widened basis");
      for (std::size_t k = 0; k < wide.size(); ++k) div[k] += up.values[k];
    }
    const double split = 2.0 * grad + 2.0 * dot(std::span<const double>(div), std::span<const double>(div)) - 2.0 * mass;
    worst = std::max(worst, std::abs(split - form) / std::max(1.0, std::abs(form)));
  }
  return worst;
}

}  // namespace hypoflow
