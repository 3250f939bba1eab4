#include "hypoflow/hermite.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace hypoflow {

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  for (int e : entries_) {
    if (e < 0) throw DomainError("MultiIndex: negative entry");
    degree_ += e;
  }
}

MultiIndex MultiIndex::shifted(std::size_t axis, int delta) const {
  std::vector<int> e = entries_;
  e.at(axis) += delta;
  return MultiIndex(std::move(e));
}

namespace {

void compositions(int remaining, std::size_t pos, std::vector<int>& cur, std::vector<MultiIndex>& out) {
  if (pos + 1 == cur.size()) {
    cur[pos] = remaining;
    out.emplace_back(cur);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    cur[pos] = v;
    compositions(remaining - v, pos + 1, cur, out);
  }
}

}  // namespace

BasisTruncation::BasisTruncation(int d, int N) : d_(d), n_(N) {
  if (d < 1) throw DomainError("BasisTruncation: dimension must be >= 1, got " + std::to_string(d));
  if (N < 0) throw DomainError("BasisTruncation: degree must be >= 0, got " + std::to_string(N));
  std::vector<int> cur(static_cast<std::size_t>(d), 0);
  for (int deg = 0; deg <= N; ++deg) {
    degree_offsets_.push_back(indices_.size());
    compositions(deg, 0, cur, indices_);
  }
  degree_offsets_.push_back(indices_.size());
  lookup_.reserve(indices_.size());
  for (std::size_t k = 0; k < indices_.size(); ++k) lookup_.emplace(key(indices_[k].entries()), k);
}

std::uint64_t BasisTruncation::key(const std::vector<int>& alpha) const {
  std::uint64_t k = 0;
  for (int a : alpha) k = k * static_cast<std::uint64_t>(n_ + 1) + static_cast<std::uint64_t>(a);
  return k;
}

std::size_t BasisTruncation::find(const std::vector<int>& alpha) const {
  if (alpha.size() != static_cast<std::size_t>(d_)) return npos;
  int deg = 0;
  for (int a : alpha) {
    if (a < 0) return npos;
    deg += a;
  }
  if (deg > n_) return npos;
  const auto it = lookup_.find(key(alpha));
  return it == lookup_.end() ? npos : it->second;
}

std::size_t BasisTruncation::index_of(const std::vector<int>& alpha) const {
  const std::size_t k = find(alpha);
  if (k == npos) throw DomainError("BasisTruncation: multi-index outside truncation");
  return k;
}

std::size_t BasisTruncation::prefix_size(int m) const {
  if (m < 0) return 0;
  if (m >= n_) return indices_.size();
  return degree_offsets_[static_cast<std::size_t>(m) + 1];
}

std::size_t BasisTruncation::unit(std::size_t axis) const {
  std::vector<int> a(static_cast<std::size_t>(d_), 0);
  a.at(axis) = 1;
  return index_of(a);
}

std::size_t BasisTruncation::double_unit(std::size_t axis) const {
  std::vector<int> a(static_cast<std::size_t>(d_), 0);
  a.at(axis) = 2;
  return index_of(a);
}

BasisPtr enumerate_basis(int d, int N) {
  if (d < 1) throw DomainError("enumerate_basis: d must be >= 1");
  if (N < 2) throw DomainError("enumerate_basis: N must be >= 2");
  return std::make_shared<const BasisTruncation>(d, N);
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

template <typename T>
std::vector<T> apply_annihilation(const BasisTruncation& basis, std::size_t axis, std::span<const T> c) {
  if (axis >= static_cast<std::size_t>(basis.dim())) throw DomainError("annihilation: axis out of range");
  if (c.size() != basis.size()) throw DomainError("annihilation: length mismatch");
  std::vector<T> out(basis.size(), T{});
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const MultiIndex& a = basis.at(k);
    if (a[axis] == 0 || c[k] == T{}) continue;
    out[basis.index_of(a.shifted(axis, -1).entries())] += std::sqrt(static_cast<double>(a[axis])) * c[k];
  }
  return out;
}

template <typename T>
LadderResult<T> apply_creation(const BasisTruncation& basis, std::size_t axis, std::span<const T> c) {
  if (axis >= static_cast<std::size_t>(basis.dim())) throw DomainError("creation: axis out of range");
  if (c.size() != basis.size()) throw DomainError("creation: length mismatch");
  LadderResult<T> r;
  r.values.assign(basis.size(), T{});
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (c[k] == T{}) continue;
    const MultiIndex& a = basis.at(k);
    if (a.degree() == basis.max_degree()) {
      r.dropped_mass += abs2(c[k]);
      continue;
    }
    r.values[basis.index_of(a.shifted(axis, 1).entries())] += std::sqrt(static_cast<double>(a[axis] + 1)) * c[k];
  }
  return r;
}

template <typename T>
LadderResult<T> apply_xi_multiply(const BasisTruncation& basis, std::size_t axis, std::span<const T> c) {
  LadderResult<T> r = apply_creation(basis, axis, c);
  const auto down = apply_annihilation(basis, axis, c);
  for (std::size_t k = 0; k < down.size(); ++k) r.values[k] += down[k];
  return r;
}

template std::vector<double> apply_annihilation(const BasisTruncation&, std::size_t, std::span<const double>);
template std::vector<Complex> apply_annihilation(const BasisTruncation&, std::size_t, std::span<const Complex>);
template LadderResult<double> apply_creation(const BasisTruncation&, std::size_t, std::span<const double>);
template LadderResult<Complex> apply_creation(const BasisTruncation&, std::size_t, std::span<const Complex>);
template LadderResult<double> apply_xi_multiply(const BasisTruncation&, std::size_t, std::span<const double>);
template LadderResult<Complex> apply_xi_multiply(const BasisTruncation&, std::size_t, std::span<const Complex>);

RealMatrix annihilation_matrix(const BasisTruncation& basis, std::size_t axis) {
  if (axis >= static_cast<std::size_t>(basis.dim())) throw DomainError("annihilation: axis out of range");
  RealMatrix m(basis.size(), basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const MultiIndex& a = basis.at(k);
    if (a[axis] == 0) continue;
    m(basis.index_of(a.shifted(axis, -1).entries()), k) = std::sqrt(static_cast<double>(a[axis]));
  }
  return m;
}

RealMatrix creation_matrix(const BasisTruncation& basis, std::size_t axis) {
  return annihilation_matrix(basis, axis).transpose();
}

RealMatrix xi_matrix(const BasisTruncation& basis, std::size_t axis) {
  return annihilation_matrix(basis, axis) + creation_matrix(basis, axis);
}

std::vector<double> hermite_values(int n, double x) {
  std::vector<double> h(static_cast<std::size_t>(n) + 1);
  h[0] = 1.0;
  if (n >= 1) h[1] = x;
  for (int k = 1; k < n; ++k)
    h[k + 1] = (x * h[k] - std::sqrt(static_cast<double>(k)) * h[k - 1]) / std::sqrt(static_cast<double>(k + 1));
  return h;
}

std::vector<double> hermite_derivatives(int n, double x) {
  const auto h = hermite_values(n, x);
  std::vector<double> dh(h.size(), 0.0);
  for (int k = 1; k <= n; ++k) dh[k] = std::sqrt(static_cast<double>(k)) * h[k - 1];
  return dh;
}

QuadratureRule gauss_hermite_rule(int n) {
  if (n < 1) throw DomainError("gauss_hermite_rule: n must be >= 1");
  if (n > kGaussHermiteCap)
    throw DomainError("gauss_hermite_rule: n exceeds cap " + std::to_string(kGaussHermiteCap));
  // Newton iteration on physicists' orthonormal Hermite functions, then rescale to N(0,1).
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * x[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * x[1];
    else
      z = 2.0 * z - x[static_cast<std::size_t>(i - 2)];
    double pp = 0.0;
    bool converged = false;
    for (int it = 0; it < 200; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-14 * std::max(1.0, std::abs(z))) {
        converged = true;
        break;
      }
    }
    if (!converged) throw NumericError("gauss_hermite_rule: Newton iteration did not converge");
    x[static_cast<std::size_t>(i)] = z;
    x[static_cast<std::size_t>(n - 1 - i)] = -z;
    w[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
    w[static_cast<std::size_t>(n - 1 - i)] = w[static_cast<std::size_t>(i)];
  }
  QuadratureRule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  for (int i = 0; i < n; ++i) {
    const std::size_t src = static_cast<std::size_t>(n - 1 - i);
    r.nodes[static_cast<std::size_t>(i)] = std::numbers::sqrt2 * x[src];
    r.weights[static_cast<std::size_t>(i)] = w[src] / sqrt_pi;
  }
  if (n % 2 == 1) r.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return r;
}

TensorQuadrature tensor_rule(int d, int n) {
  const QuadratureRule r = gauss_hermite_rule(n);
  TensorQuadrature t;
  t.dim = d;
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) total *= static_cast<std::size_t>(n);
  t.points.reserve(total);
  t.weights.reserve(total);
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t rem = c;
    std::vector<double> p(static_cast<std::size_t>(d));
    double w = 1.0;
    for (int k = d - 1; k >= 0; --k) {
      const std::size_t j = rem % static_cast<std::size_t>(n);
      rem /= static_cast<std::size_t>(n);
      p[static_cast<std::size_t>(k)] = r.nodes[j];
      w *= r.weights[j];
    }
    t.points.push_back(std::move(p));
    t.weights.push_back(w);
  }
  return t;
}

std::vector<double> basis_polynomials(const BasisTruncation& basis, std::span<const double> xi) {
  const int d = basis.dim();
  if (xi.size() != static_cast<std::size_t>(d)) throw DomainError("basis_polynomials: point dimension mismatch");
  std::vector<std::vector<double>> per_axis(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) per_axis[static_cast<std::size_t>(k)] = hermite_values(basis.max_degree(), xi[static_cast<std::size_t>(k)]);
  std::vector<double> out(basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const MultiIndex& a = basis.at(j);
    double v = 1.0;
    for (int k = 0; k < d; ++k) v *= per_axis[static_cast<std::size_t>(k)][static_cast<std::size_t>(a[static_cast<std::size_t>(k)])];
    out[j] = v;
  }
  return out;
}

}  // namespace hypoflow
