#include "hypoflow/collision.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "hypoflow/linalg.hpp"

namespace hypoflow {

std::string model_name(ModelKind m) {
  switch (m) {
    case ModelKind::Relaxation: return "relaxation";
    case ModelKind::FokkerPlanck: return "fokker-planck";
    case ModelKind::BoltzmannSurrogate: return "boltzmann-surrogate";
  }
  return "unknown";
}

ModelKind parse_model(const std::string& s) {
  if (s == "1" || s == "relaxation") return ModelKind::Relaxation;
  if (s == "2" || s == "fokker-planck" || s == "fp") return ModelKind::FokkerPlanck;
  if (s == "3" || s == "boltzmann-surrogate" || s == "boltzmann") return ModelKind::BoltzmannSurrogate;
  throw DomainError("unknown model '" + s + "'");
}

WeightKind default_weight(ModelKind m) {
  switch (m) {
    case ModelKind::Relaxation: return WeightKind::Unit;
    case ModelKind::FokkerPlanck: return WeightKind::QuadraticGrowth;
    case ModelKind::BoltzmannSurrogate: return WeightKind::LinearGrowth;
  }
  return WeightKind::Unit;
}

std::string weight_name(WeightKind w) {
  switch (w) {
    case WeightKind::Unit: return "1";
    case WeightKind::QuadraticGrowth: return "1+|xi|^2";
    case WeightKind::LinearGrowth: return "1+|xi|";
  }
  return "?";
}

RealMatrix weight_matrix(const BasisTruncation& basis, WeightKind w) {
  switch (w) {
    case WeightKind::Unit:
      return RealMatrix::identity(basis.size());
    case WeightKind::QuadraticGrowth:
      return galerkin_multiplier(basis, basis.max_degree() + 2, [](const std::vector<double>& x) {
        double s = 1.0;
        for (double v : x) s += v * v;
        return s;
      });
    case WeightKind::LinearGrowth:
      return galerkin_multiplier(basis, basis.max_degree() + 6, [](const std::vector<double>& x) {
        double s = 0.0;
        for (double v : x) s += v * v;
        return 1.0 + std::sqrt(s);
      });
  }
  throw DomainError("weight_matrix: unknown weight");
}

std::vector<double> temperature_vector(const BasisTruncation& basis) {
  std::vector<double> t(basis.size(), 0.0);
  const double s = 1.0 / std::sqrt(static_cast<double>(basis.dim()));
  for (int i = 0; i < basis.dim(); ++i) t[basis.double_unit(static_cast<std::size_t>(i))] = s;
  return t;
}

std::vector<std::vector<double>> kernel_basis(const BasisTruncation& basis, ModelKind model) {
  std::vector<std::vector<double>> k;
  std::vector<double> e(basis.size(), 0.0);
  e[0] = 1.0;
  k.push_back(e);
  if (model == ModelKind::Relaxation) return k;
  for (int i = 0; i < basis.dim(); ++i) {
    std::vector<double> ei(basis.size(), 0.0);
    ei[basis.unit(static_cast<std::size_t>(i))] = 1.0;
    k.push_back(ei);
  }
  if (model == ModelKind::BoltzmannSurrogate) k.push_back(temperature_vector(basis));
  return k;
}

namespace {

RealMatrix projector_from(const std::vector<std::vector<double>>& k, std::size_t n) {
  RealMatrix p(n, n);
  for (const auto& v : k)
    for (std::size_t i = 0; i < n; ++i) {
      if (v[i] == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) p(i, j) += v[i] * v[j];
    }
  return p;
}

template <typename T>
std::vector<T> project_onto(const std::vector<std::vector<double>>& k, std::span<const T> c) {
  std::vector<T> out(c.size(), T{});
  for (const auto& v : k) {
    T s{};
    for (std::size_t i = 0; i < c.size(); ++i) s += v[i] * c[i];
    for (std::size_t i = 0; i < c.size(); ++i) out[i] += v[i] * s;
  }
  return out;
}

}  // namespace

RealMatrix projector_P0(const BasisTruncation& basis) {
  return projector_from(kernel_basis(basis, ModelKind::Relaxation), basis.size());
}

RealMatrix projector_P(const BasisTruncation& basis, ModelKind model) {
  if (model == ModelKind::Relaxation) throw DomainError("project_P: Relaxation uses P0");
  return projector_from(kernel_basis(basis, model), basis.size());
}

template <typename T>
std::vector<T> project_P0(const BasisTruncation& basis, std::span<const T> c) {
  if (c.size() != basis.size()) throw DomainError("project_P0: length mismatch");
  std::vector<T> out(c.size(), T{});
  out[0] = c[0];
  return out;
}

template <typename T>
std::vector<T> project_P(const BasisTruncation& basis, std::span<const T> c, ModelKind model) {
  if (model == ModelKind::Relaxation) throw DomainError("project_P: Relaxation uses P0");
  if (c.size() != basis.size()) throw DomainError("project_P: length mismatch");
  return project_onto(kernel_basis(basis, model), c);
}

template <typename T>
T gamma_entry(const BasisTruncation& basis, std::span<const T> c, std::size_t i, std::size_t j,
              GammaConvention conv) {
  const std::size_t d = static_cast<std::size_t>(basis.dim());
  if (i >= d || j >= d) throw DomainError("gamma: axis out of range");
  if (i == j) return std::numbers::sqrt2 * c[basis.double_unit(i)];
  std::vector<int> a(d, 0);
  a[i] = 1;
  a[j] = 1;
  T v = c[basis.index_of(a)];
  if (conv == GammaConvention::Literal) v -= c[0];
  return v;
}

template <typename T>
T lambda_entry(const BasisTruncation& basis, std::span<const T> c, std::size_t i) {
  const std::size_t d = static_cast<std::size_t>(basis.dim());
  if (i >= d) throw DomainError("lambda: axis out of range");
  if (basis.max_degree() < 3) throw DomainError("lambda: requires N >= 3");
  std::vector<int> a(d, 0);
  a[i] = 3;
  T v = std::sqrt(6.0) * c[basis.index_of(a)];
  for (std::size_t j = 0; j < d; ++j) {
    if (j == i) continue;
    std::vector<int> b(d, 0);
    b[i] = 1;
    b[j] = 2;
    v += std::numbers::sqrt2 * c[basis.index_of(b)];
  }
  return v;
}

template <typename T>
FluidMoments<T> moments(const BasisTruncation& basis, std::span<const T> c, GammaConvention conv) {
  if (c.size() != basis.size()) throw DomainError("moments: length mismatch");
  const std::size_t d = static_cast<std::size_t>(basis.dim());
  FluidMoments<T> m;
  m.a = c[0];
  m.b.resize(d);
  T tsum{};
  for (std::size_t i = 0; i < d; ++i) {
    m.b[i] = c[basis.unit(i)];
    tsum += c[basis.double_unit(i)];
  }
  m.c = (std::numbers::sqrt2 / (2.0 * static_cast<double>(d))) * tsum;
  m.gamma = DenseMatrix<T>(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m.gamma(i, j) = gamma_entry(basis, c, i, j, conv);
  m.lambda.assign(d, T{});
  if (basis.max_degree() >= 3)
    for (std::size_t i = 0; i < d; ++i) m.lambda[i] = lambda_entry(basis, c, i);
  return m;
}

template std::vector<double> project_P0(const BasisTruncation&, std::span<const double>);
template std::vector<Complex> project_P0(const BasisTruncation&, std::span<const Complex>);
template std::vector<double> project_P(const BasisTruncation&, std::span<const double>, ModelKind);
template std::vector<Complex> project_P(const BasisTruncation&, std::span<const Complex>, ModelKind);
template double gamma_entry(const BasisTruncation&, std::span<const double>, std::size_t, std::size_t, GammaConvention);
template Complex gamma_entry(const BasisTruncation&, std::span<const Complex>, std::size_t, std::size_t, GammaConvention);
template double lambda_entry(const BasisTruncation&, std::span<const double>, std::size_t);
template Complex lambda_entry(const BasisTruncation&, std::span<const Complex>, std::size_t);
template FluidMoments<double> moments(const BasisTruncation&, std::span<const double>, GammaConvention);
template FluidMoments<Complex> moments(const BasisTruncation&, std::span<const Complex>, GammaConvention);

double sphere_abs_moment(int d) {
  if (d < 1) throw DomainError("sphere_abs_moment: d must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (d - 1)) / std::tgamma(0.5 * (d + 1));
}

namespace {

struct GaussLegendre {
  std::array<double, 16> x{};
  std::array<double, 16> w{};
  GaussLegendre() {
    const int n = 16;
    for (int i = 0; i < n; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p1 = 1.0, p2 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
        }
        pp = n * (z * p1 - p2) / (z * z - 1.0);
        const double z1 = z;
        z = z1 - p1 / pp;
        if (std::abs(z - z1) < 1e-15) break;
      }
      x[static_cast<std::size_t>(i)] = z;
      w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
  }
};

const GaussLegendre& gl16() {
  static const GaussLegendre rule;
  return rule;
}

template <typename F>
double composite(F&& f, double a, double b, int panels) {
  const auto& g = gl16();
  const double h = (b - a) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double c = lo + 0.5 * h;
    for (std::size_t k = 0; k < g.x.size(); ++k) s += g.w[k] * f(c + 0.5 * h * g.x[k]);
  }
  return 0.5 * h * s;
}

struct RefinedIntegral {
  double value = 0.0;
  int levels = 0;
  double change = 0.0;
};

template <typename F>
RefinedIntegral refine(F&& f, double a, double b) {
  constexpr int kMaxLevels = 14;
  double prev = composite(f, a, b, 1);
  for (int level = 1; level <= kMaxLevels; ++level) {
    const double cur = composite(f, a, b, 1 << level);
    const double change = std::abs(cur - prev) / std::max(std::abs(cur), 1e-300);
    if (change < 1e-10 || std::abs(cur - prev) < 1e-300) return {cur, level, change};
    prev = cur;
  }
  throw NumericError("collision frequency: radial quadrature did not converge to 1e-10 on [" +
                     std::to_string(a) + ", " + std::to_string(b) + "]");
}

// Radial density of |Z| for Z ~ N(0, I_d).
double chi_density(int d, double rho) {
  const double norm = std::pow(2.0, 1.0 - 0.5 * d) / std::tgamma(0.5 * d);
  return norm * std::pow(rho, d - 1) * std::exp(-0.5 * rho * rho);
}

// Average of |ξ − ρω| over the uniform unit sphere, |ξ| = r.
double sphere_average_distance(int d, double r, double rho) {
  switch (d) {
    case 1:
      return 0.5 * (std::abs(r - rho) + (r + rho));
    case 2: {
      const double s = r + rho;
      if (s == 0.0) return 0.0;
      const double k = 2.0 * std::sqrt(r * rho) / s;
      return (2.0 / std::numbers::pi) * s * std::comp_ellint_2(std::min(k, 1.0));
    }
    case 3: {
      if (r == 0.0) return rho;
      if (rho == 0.0) return r;
      const double hi = r + rho, lo = std::abs(r - rho);
      return (hi * hi * hi - lo * lo * lo) / (6.0 * r * rho);
    }
    default:
      throw DomainError("collision frequency: only d in {1,2,3} is supported");
  }
}

}  // namespace

CollisionFrequencyResult collision_frequency(std::span<const double> xi, int d) {
  if (xi.size() != static_cast<std::size_t>(d)) throw DomainError("collision frequency: point dimension mismatch");
  if (d < 1 || d > 3) throw DomainError("collision frequency: only d in {1,2,3} is supported");
  double r2 = 0.0;
  for (double v : xi) r2 += v * v;
  const double r = std::sqrt(r2);
  constexpr double kTail = 14.0;
  auto integrand = [&](double rho) { return chi_density(d, rho) * sphere_average_distance(d, r, rho); };
  CollisionFrequencyResult out;
  double total = 0.0;
  std::vector<double> breaks{0.0};
  if (r > 0.0 && r < kTail) breaks.push_back(r);
  breaks.push_back(kTail);
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const RefinedIntegral part = refine(integrand, breaks[s], breaks[s + 1]);
    total += part.value;
    out.refinement_levels = std::max(out.refinement_levels, part.levels);
    out.last_relative_change = std::max(out.last_relative_change, part.change);
  }
  out.value = sphere_abs_moment(d) * total;
  return out;
}

double collision_frequency_nu(std::span<const double> xi, int d) { return collision_frequency(xi, d).value; }

RealMatrix assemble_nu_hat(const BasisTruncation& basis) {
  const int d = basis.dim();
  return galerkin_multiplier(basis, basis.max_degree() + 6,
                             [d](const std::vector<double>& x) { return collision_frequency_nu(x, d); });
}

RealMatrix complement_basis(std::size_t n, const std::vector<std::vector<double>>& kernel) {
  std::vector<std::vector<double>> q;
  for (const auto& k : kernel) q.push_back(k);
  const std::size_t kdim = kernel.size();
  for (std::size_t e = 0; e < n && q.size() < n; ++e) {
    std::vector<double> v(n, 0.0);
    v[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : q) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += u[i] * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= s * u[i];
      }
    const double nv = norm2(std::span<const double>(v));
    if (nv < 1e-8) continue;
    for (auto& x : v) x /= nv;
    q.push_back(std::move(v));
  }
  RealMatrix c(n, q.size() - kdim);
  for (std::size_t j = kdim; j < q.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) c(i, j - kdim) = q[j][i];
  return c;
}

OperatorMatrix assemble_L(ModelKind model, BasisPtr basis) {
  if (!basis) throw DomainError("assemble_L: null basis");
  if (basis->max_degree() < 2) throw DomainError("assemble_L: basis too small (N >= 2 required)");
  if (model == ModelKind::BoltzmannSurrogate && basis->max_degree() < 3)
    throw DomainError("assemble_L: the Boltzmann surrogate needs N >= 3");
  const std::size_t n = basis->size();
  OperatorMatrix op;
  op.model = model;
  op.basis = basis;
  op.weight = default_weight(model);
  switch (model) {
    case ModelKind::Relaxation: {
      op.matrix = RealMatrix::identity(n) * -1.0;
      op.matrix(0, 0) = 0.0;
      op.kernel = kernel_basis(*basis, model);
      op.dissipation_weight = RealMatrix::identity(n);
      break;
    }
    case ModelKind::FokkerPlanck: {
      op.matrix = RealMatrix(n, n);
      for (std::size_t k = 0; k < n; ++k) op.matrix(k, k) = -static_cast<double>(basis->at(k).degree());
      op.kernel = kernel_basis(*basis, ModelKind::Relaxation);
      op.dissipation_weight = weight_matrix(*basis, WeightKind::QuadraticGrowth);
      break;
    }
    case ModelKind::BoltzmannSurrogate: {
      const RealMatrix nu = assemble_nu_hat(*basis);
      const RealMatrix q = RealMatrix::identity(n) - projector_P(*basis, model);
      op.matrix = matmul(matmul(q, nu), q) * -1.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) op.matrix(i, j) = op.matrix(j, i) = 0.5 * (op.matrix(i, j) + op.matrix(j, i));
      op.kernel = kernel_basis(*basis, model);
      op.dissipation_weight = nu;
      break;
    }
  }
  return op;
}

namespace {

double min_restricted_geneig(const RealMatrix& a, const RealMatrix& w, const RealMatrix& c) {
  const RealMatrix ar = matmul(matmul(c.transpose(), a), c);
  const RealMatrix wr = matmul(matmul(c.transpose(), w), c);
  return generalized_eigen(ar, wr).values.front();
}

}  // namespace

double coercivity_constant(const OperatorMatrix& L) {
  const std::size_t n = L.matrix.rows();
  const RealMatrix c = complement_basis(n, L.kernel);
  const double lam = min_restricted_geneig(L.matrix * -1.0, L.dissipation_weight, c);
  if (lam <= 1e-10) throw NumericError("coercivity_constant: non-positive constant, operator assembly is broken");
  return lam;
}

double fp_refined_coercivity(const OperatorMatrix& L) {
  if (L.model != ModelKind::FokkerPlanck) throw DomainError("fp_refined_coercivity: Fokker-Planck only");
  const BasisTruncation& b = *L.basis;
  const std::size_t n = b.size();
  RealMatrix a = L.matrix * -1.0;
  for (int i = 0; i < b.dim(); ++i) {
    const std::size_t k = b.unit(static_cast<std::size_t>(i));
    a(k, k) -= 1.0;
  }
  const RealMatrix c = complement_basis(n, kernel_basis(b, ModelKind::FokkerPlanck));
  return min_restricted_geneig(a, L.dissipation_weight, c);
}

}  // namespace hypoflow
