#include "hypoflow/mode_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "hypoflow/errors.hpp"
#include "hypoflow/linalg.hpp"

namespace hypoflow {

namespace {

constexpr Complex kI{0.0, 1.0};

double k_squared(std::span<const double> k) {
  double s = 0.0;
  for (double v : k) s += v * v;
  return s;
}

void check_k(const BasisTruncation& basis, std::span<const double> k) {
  if (k.size() != static_cast<std::size_t>(basis.dim()))
    throw DomainError("wavenumber dimension does not match the basis");
}

std::vector<std::string> kernel_names(const OperatorMatrix& L) {
  std::vector<std::string> names{"mass"};
  const int d = L.basis->dim();
  if (L.kernel.size() > 1) {
    for (int i = 0; i < d; ++i) names.push_back("momentum_" + std::to_string(i));
    if (L.model == ModelKind::BoltzmannSurrogate) names.push_back("temperature");
  }
  return names;
}

template <typename T>
void reject_kernel_component(const OperatorMatrix& L, std::span<const T> s, const char* what) {
  const double scale = norm2(s);
  if (scale == 0.0) return;
  const auto names = kernel_names(L);
  for (std::size_t j = 0; j < L.kernel.size(); ++j) {
    Complex proj = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) proj += L.kernel[j][i] * Complex(s[i]);
    if (std::abs(proj) > 1e-10 * scale) {
      std::ostringstream os;
      os << what << " has a ker L component (" << names[j] << " = " << std::abs(proj) << ")";
      throw DomainError(os.str());
    }
  }
}

double trapezoid_weight(std::size_t j, std::size_t last, double h) { return (j == 0 || j == last) ? 0.5 * h : h; }

/// Weight of node j ≥ 0 of a symmetric grid folded onto k ≥ 0 (node 0 is interior on the full line).
double folded_weight(std::size_t j, std::size_t last, double h) { return j == last ? 0.5 * h : h; }

}  // namespace

KappaSet default_mode_kappas(ModelKind model) {
  KappaSet k;
  if (model == ModelKind::BoltzmannSurrogate) {
    k.kappa1 = 0.1;
    k.kappa2 = 0.01;
    k.kappa3 = 0.05;
  }
  return k;
}

Rational sigma_index_exact(long long q_num, long long q_den, int m, int d) {
  if (q_den <= 0 || q_num <= 0) throw DomainError("sigma_index: q must be a positive rational");
  if (q_num < q_den || q_num > 2 * q_den) throw DomainError("sigma_index: q must lie in [1, 2]");
  if (m < 0) throw DomainError("sigma_index: m must be nonnegative");
  if (d < 1) throw DomainError("sigma_index: d must be at least 1");
  long long num = static_cast<long long>(d) * (2 * q_den - q_num) + 2LL * m * q_num;
  long long den = 4 * q_num;
  const long long g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return {num, den};
}

double sigma_index(double q, int m, int d) {
  if (!(q >= 1.0 && q <= 2.0)) throw DomainError("sigma_index: q must lie in [1, 2]");
  if (m < 0) throw DomainError("sigma_index: m must be nonnegative");
  if (d < 1) throw DomainError("sigma_index: d must be at least 1");
  return 0.5 * d * (1.0 / q - 0.5) + 0.5 * m;
}

ComplexMatrix assemble_symbol(const OperatorMatrix& L, std::span<const double> k) {
  const BasisTruncation& basis = *L.basis;
  check_k(basis, k);
  ComplexMatrix b = to_complex(L.matrix);
  for (std::size_t j = 0; j < k.size(); ++j) {
    if (k[j] == 0.0) continue;
    const RealMatrix xi = xi_matrix(basis, j);
    for (std::size_t r = 0; r < xi.rows(); ++r)
      for (std::size_t c = 0; c < xi.cols(); ++c)
        if (xi(r, c) != 0.0) b(r, c) -= kI * (k[j] * xi(r, c));
  }
  return b;
}

ModeTrajectory evolve_mode(const OperatorMatrix& L, const ComplexMatrix& B, std::span<const Complex> u0,
                           std::span<const double> t_grid, double dt_max, const SourceFn<Complex>& source) {
  if (u0.size() != B.rows()) throw DomainError("evolve_mode: state length mismatch");
  ModeTrajectory out;
  out.t.assign(t_grid.begin(), t_grid.end());
  SourceFn<Complex> checked;
  if (source) {
    checked = [&](double t) {
      auto s = source(t);
      if (s.size() != u0.size()) throw DomainError("evolve_mode: source length mismatch");
      reject_kernel_component(L, std::span<const Complex>(s), "source");
      return s;
    };
  }
  out.u = evolve_midpoint<Complex>(B, u0, t_grid, dt_max, checked, &out.stats);
  return out;
}

Complex interaction_E_int(const BasisTruncation& basis, std::span<const Complex> u, std::span<const double> k,
                          double kappa1, double kappa2) {
  check_k(basis, k);
  if (basis.max_degree() < 3) throw DomainError("E_int: requires N >= 3");
  const std::size_t d = static_cast<std::size_t>(basis.dim());
  const auto m = moments<Complex>(basis, u);
  const auto g = project_P<Complex>(basis, u, ModelKind::BoltzmannSurrogate);
  std::vector<Complex> micro(u.begin(), u.end());
  for (std::size_t i = 0; i < micro.size(); ++i) micro[i] -= g[i];
  const std::span<const Complex> gs(micro);

  Complex total = 0.0;
  for (std::size_t i = 0; i < d; ++i) total += (kI * k[i] * m.c) * std::conj(lambda_entry<Complex>(basis, gs, i));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      Complex right = gamma_entry<Complex>(basis, gs, i, j);
      if (i == j) right += 2.0 * m.c;
      total += kappa1 * (kI * k[i] * m.b[j] + kI * k[j] * m.b[i]) * std::conj(right);
    }
  for (std::size_t i = 0; i < d; ++i) total += kappa2 * (kI * k[i] * m.a) * std::conj(m.b[i]);
  return total / (1.0 + k_squared(k));
}

double energy_E_unchecked(const OperatorMatrix& L, std::span<const Complex> u, std::span<const double> k,
                          const KappaSet& kappas) {
  const BasisTruncation& basis = *L.basis;
  check_k(basis, k);
  if (u.size() != basis.size()) throw DomainError("energy_E: state length mismatch");
  const double base = std::pow(norm2(u), 2);
  if (L.model == ModelKind::BoltzmannSurrogate)
    return base + kappas.kappa3 * std::real(interaction_E_int(basis, u, k, kappas.kappa1, kappas.kappa2));
  Complex cross = 0.0;
  for (std::size_t j = 0; j < k.size(); ++j) cross += (kI * k[j] * u[0]) * std::conj(u[basis.unit(j)]);
  return base + kappas.kappa * std::real(cross) / (1.0 + k_squared(k));
}

double energy_E(const OperatorMatrix& L, std::span<const Complex> u, std::span<const double> k,
                const KappaSet& kappas) {
  const double e = energy_E_unchecked(L, u, k, kappas);
  const double n2 = std::pow(norm2(u), 2);
  if (e < 0.5 * n2 * (1.0 - 1e-12) || e > 2.0 * n2 * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "energy equivalence guard violated: E = " << e << ", |u|^2 = " << n2 << ", state = [";
    for (std::size_t i = 0; i < u.size(); ++i) os << (i ? ", " : "") << u[i];
    os << "]";
    throw GuardViolation(os.str());
  }
  return e;
}

ComplexMatrix energy_form(const OperatorMatrix& L, std::span<const double> k, const KappaSet& kappas) {
  const std::size_t n = L.basis->size();
  std::vector<Complex> e(n, 0.0);
  auto E = [&](std::size_t i, Complex ci, std::size_t j, Complex cj) {
    std::fill(e.begin(), e.end(), Complex{});
    e[i] += ci;
    e[j] += cj;
    return energy_E_unchecked(L, e, k, kappas);
  };
  ComplexMatrix q(n, n);
  for (std::size_t i = 0; i < n; ++i) q(i, i) = E(i, 1.0, i, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double re = 0.25 * (E(i, 1.0, j, 1.0) - E(i, 1.0, j, -1.0));
      const double im = 0.25 * (E(i, 1.0, j, -kI) - E(i, 1.0, j, kI));
      q(i, j) = Complex(re, im);
      q(j, i) = Complex(re, -im);
    }
  return q;
}

bool kappa_guard_holds(const ComplexMatrix& q) {
  const auto r = jacobi_eigen(hermitian_embedding(q));
  return r.values.front() >= 0.5 && r.values.back() <= 2.0;
}

double matrix_certificate(const OperatorMatrix& L, std::span<const double> k, const KappaSet& kappas) {
  const double k2 = k_squared(k);
  if (k2 == 0.0) return 0.0;
  const ComplexMatrix q = energy_form(L, k, kappas);
  const ComplexMatrix b = assemble_symbol(L, k);
  ComplexMatrix m = matmul(q, b);
  m += matmul(b.adjoint(), q);
  m *= Complex(-1.0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const Complex avg = 0.5 * (m(i, j) + std::conj(m(j, i)));
      m(i, j) = avg;
      m(j, i) = std::conj(avg);
    }
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) = std::real(m(i, i));
  const double r = min_generalized_hermitian(m, q);
  return r * (1.0 + k2) / k2;
}

CertificateReport verify_mode_inequality(const OperatorMatrix& L, std::span<const double> k,
                                         const ModeTrajectory& traj, const KappaSet& kappas, double tol) {
  CertificateReport rep;
  if (traj.t.size() != traj.u.size() || traj.t.size() < 2)
    throw DomainError("verify_mode_inequality: trajectory needs at least two samples");
  rep.energies.reserve(traj.u.size());
  for (const auto& u : traj.u) rep.energies.push_back(energy_E(L, u, k, kappas));
  rep.steps = traj.t.size() - 1;
  const double k2 = k_squared(k);
  const double rho = k2 / (1.0 + k2);
  if (k2 == 0.0) {
    rep.kernel_mode = true;
    double worst = 0.0;
    for (std::size_t n = 0; n + 1 < traj.t.size(); ++n) {
      const double en = rep.energies[n];
      if (en < 1e-280) continue;
      const double slope = (rep.energies[n + 1] - en) / (traj.t[n + 1] - traj.t[n]);
      worst = std::max(worst, slope / en - tol);
    }
    rep.worst_violation = worst;
    return rep;
  }

  std::vector<double> ratio;
  ratio.reserve(rep.steps);
  double closed = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n + 1 < traj.t.size(); ++n) {
    const double en = rep.energies[n];
    if (en < 1e-280) continue;
    const double slope = (rep.energies[n + 1] - en) / (traj.t[n + 1] - traj.t[n]);
    const double r = (tol * en - slope) / (rho * en);
    ratio.push_back(r);
    closed = std::min(closed, r);
  }
  if (ratio.empty()) return rep;
  rep.lambda_closed = closed;

  auto holds = [&](double lam) {
    for (double r : ratio)
      if (lam > r) return false;
    return true;
  };
  double lo = 0.0;
  double hi = std::max(1.0, 2.0 * std::abs(closed));
  if (!holds(lo)) {
    rep.lambda = 0.0;
  } else {
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (holds(mid) ? lo : hi) = mid;
    }
    rep.lambda = lo;
  }
  rep.rate = rep.lambda * rho;
  double worst = 0.0;
  for (std::size_t n = 0; n + 1 < traj.t.size(); ++n) {
    const double en = rep.energies[n];
    if (en < 1e-280) continue;
    const double slope = (rep.energies[n + 1] - en) / (traj.t[n + 1] - traj.t[n]);
    worst = std::max(worst, (slope + rep.rate * en) / en - tol);
  }
  rep.worst_violation = worst;
  return rep;
}

KappaChoice choose_kappas(const OperatorMatrix& L, const std::vector<std::vector<double>>& k_samples) {
  KappaChoice best;
  best.kappas = default_mode_kappas(L.model);
  std::vector<std::vector<double>> active;
  for (const auto& k : k_samples)
    if (k_squared(k) > 0.0) active.push_back(k);
  if (active.empty()) {
    best.warning = "all wavenumber samples are zero; kappa is irrelevant, defaults returned";
    return best;
  }

  std::vector<KappaSet> candidates;
  if (L.model == ModelKind::BoltzmannSurrogate) {
    const double g12[] = {0.01, 0.03, 0.1, 0.3, 1.0};
    const double g3[] = {0.03, 0.1, 0.3, 0.5, 1.0};
    for (double k3 : g3)
      for (double k1 : g12)
        for (double k2 : g12) {
          KappaSet s = best.kappas;
          s.kappa1 = k1;
          s.kappa2 = k2;
          s.kappa3 = k3;
          candidates.push_back(s);
        }
  } else {
    for (double k : {0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.8, 1.2}) {
      KappaSet s = best.kappas;
      s.kappa = k;
      candidates.push_back(s);
    }
  }

  double best_worst = -std::numeric_limits<double>::infinity();
  const KappaSet* guard_max = nullptr;
  bool found = false;
  for (const auto& cand : candidates) {
    bool guard_ok = true;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& k : active) {
      if (!kappa_guard_holds(energy_form(L, k, cand))) {
        guard_ok = false;
        break;
      }
      worst = std::min(worst, matrix_certificate(L, k, cand));
    }
    if (!guard_ok) continue;
    guard_max = &cand;
    if (worst > 0.0 && worst > best_worst) {
      best_worst = worst;
      best.kappas = cand;
      found = true;
    }
  }
  if (found) {
    best.worst_certificate = best_worst;
    return best;
  }
  best.feasible = false;
  if (guard_max) best.kappas = *guard_max;
  best.warning = "no kappa candidate yields a positive certificate on every sample; returning the guard-maximal set";
  return best;
}

void check_torus_admissible(const OperatorMatrix& L, const LatticeData& u0) {
  const std::size_t d = static_cast<std::size_t>(L.basis->dim());
  for (const auto& [k, v] : u0) {
    if (k.size() != d) throw DomainError("torus: lattice index dimension does not match the basis");
    if (v.size() != L.basis->size()) throw DomainError("torus: coefficient length mismatch");
  }
  const auto it = u0.find(std::vector<int>(d, 0));
  if (it == u0.end()) return;
  const auto names = kernel_names(L);
  double scale = 0.0;
  for (const auto& [k, v] : u0) scale = std::max(scale, norm2(std::span<const Complex>(v)));
  for (std::size_t j = 0; j < L.kernel.size(); ++j) {
    Complex proj = 0.0;
    for (std::size_t i = 0; i < it->second.size(); ++i) proj += L.kernel[j][i] * it->second[i];
    if (std::abs(proj) > 1e-10 * std::max(scale, 1e-300)) {
      std::ostringstream os;
      os << "torus initial data violates the zero-mean condition: conserved " << names[j]
         << " component of the k = 0 mode is " << std::abs(proj);
      throw DomainError(os.str());
    }
  }
}

TorusResult torus_evolve(const OperatorMatrix& L, const LatticeData& u0, std::span<const double> t_grid,
                         const KappaSet& kappas, double dt_max) {
  check_torus_admissible(L, u0);
  if (u0.empty()) throw DomainError("torus: empty initial data");
  if (t_grid.size() < 4) throw DomainError("torus: time grid too short");
  TorusResult res;
  res.t.assign(t_grid.begin(), t_grid.end());
  res.norm.assign(t_grid.size(), 0.0);
  res.energy.assign(t_grid.size(), 0.0);
  for (const auto& [kint, v] : u0) {
    std::vector<double> k(kint.begin(), kint.end());
    const ComplexMatrix b = assemble_symbol(L, k);
    IntegrationStats stats;
    const auto traj = evolve_midpoint<Complex>(b, v, t_grid, dt_max, {}, &stats);
    for (std::size_t n = 0; n < traj.size(); ++n) {
      res.norm[n] += std::pow(norm2(std::span<const Complex>(traj[n])), 2);
      res.energy[n] += energy_E(L, traj[n], k, kappas);
    }
  }
  for (auto& v : res.norm) v = std::sqrt(v);
  for (std::size_t n = 0; n + 1 < t_grid.size(); ++n) {
    if (res.energy[n] > 0.0)
      res.max_energy_increase = std::max(res.max_energy_increase, (res.energy[n + 1] - res.energy[n]) / res.energy[n]);
    if (res.norm[n] > 0.0)
      res.max_norm_increase = std::max(res.max_norm_increase, (res.norm[n + 1] - res.norm[n]) / res.norm[n]);
  }
  const double t_end = t_grid.back();
  res.fit = fit_exponential(res.t, res.norm, t_end / 3.0, t_end);
  res.fit.pass = res.fit.rate > 0.0;
  return res;
}

namespace {

struct KGrid {
  std::vector<double> k;  ///< nonnegative nodes 0, h, ..., K
  double h = 0.0;
};

KGrid make_half_grid(double k_max, double k_step) {
  if (!(k_max > 0.0) || !(k_step > 0.0)) throw DomainError("k-grid: K and step must be positive");
  const auto m = static_cast<std::size_t>(std::llround(k_max / k_step));
  if (m < 2) throw DomainError("k-grid: too few nodes");
  KGrid g;
  g.h = k_max / static_cast<double>(m);
  for (std::size_t j = 0; j <= m; ++j) g.k.push_back(g.h * static_cast<double>(j));
  return g;
}

/// ‖e^{t_n B(k)} v‖² on a grid of output times with uniform propagator powers per interval.
std::vector<double> propagate_norms(const ComplexMatrix& b, std::span<const Complex> v, std::span<const double> t_grid,
                                    double dt) {
  for (int attempt = 0; attempt < 8; ++attempt, dt *= 0.5) {
    std::map<long long, std::pair<std::unique_ptr<MidpointStepper<Complex>>, ComplexMatrix>> cache;
    std::vector<double> out;
    out.reserve(t_grid.size());
    std::vector<Complex> u(v.begin(), v.end());
    out.push_back(std::pow(norm2(std::span<const Complex>(u)), 2));
    bool ok = true;
    for (std::size_t g = 1; g < t_grid.size() && ok; ++g) {
      const double span_t = t_grid[g] - t_grid[g - 1];
      if (!(span_t > 0.0)) throw DomainError("time grid must be strictly increasing");
      const long long key = std::llround(span_t * 1e9);
      auto& slot = cache[key];
      std::size_t m = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span_t / dt - 1e-12)));
      if (!slot.first) {
        slot.first = std::make_unique<MidpointStepper<Complex>>(b, span_t / static_cast<double>(m));
        slot.second = matrix_power(slot.first->propagator(), m);
      }
      const auto one = slot.first->step(u);
      if (slot.first->energy_defect(u, one) > 1e-8) ok = false;
      u = matvec(slot.second, std::span<const Complex>(u));
      out.push_back(std::pow(norm2(std::span<const Complex>(u)), 2));
    }
    if (ok) return out;
  }
  throw NumericError("mode propagation: energy defect stays above 1e-8 after step halving");
}

}  // namespace

std::vector<double> wholespace_curve_on_grid(const OperatorMatrix& L, const WholeSpaceSpec& spec,
                                             std::span<const double> t_grid) {
  if (L.basis->dim() != 1) throw DomainError("whole-space synthesis is implemented for d = 1");
  if (spec.profile_vector.size() != L.basis->size()) throw DomainError("whole-space: profile vector length mismatch");
  if (spec.alpha < 0) throw DomainError("whole-space: derivative order must be nonnegative");
  if (t_grid.empty() || t_grid.front() != 0.0) throw DomainError("whole-space: time grid must start at 0");
  const KGrid g = make_half_grid(spec.k_max, spec.k_step);
  bool real_profile = true;
  std::vector<Complex> vconj(spec.profile_vector.size());
  for (std::size_t i = 0; i < vconj.size(); ++i) {
    vconj[i] = std::conj(spec.profile_vector[i]);
    if (spec.profile_vector[i].imag() != 0.0) real_profile = false;
  }
  std::vector<double> acc(t_grid.size(), 0.0);
  const std::size_t last = g.k.size() - 1;
  for (std::size_t j = 0; j <= last; ++j) {
    const double k = g.k[j];
    const double amp = std::exp(-0.5 * k * k);
    std::vector<Complex> v(spec.profile_vector);
    for (auto& x : v) x *= amp;
    const double kw = std::pow(k, 2 * spec.alpha);
    if (kw == 0.0 && spec.alpha > 0) continue;
    const double w = folded_weight(j, last, g.h) * kw;
    const std::vector<double> kv{k};
    const ComplexMatrix b = assemble_symbol(L, kv);
    const auto plus = propagate_norms(b, v, t_grid, spec.dt);
    std::vector<double> minus;
    if (j > 0) {
      if (real_profile) {
        minus = plus;
      } else {
        std::vector<Complex> vc(vconj);
        for (auto& x : vc) x *= amp;
        minus = propagate_norms(b, vc, t_grid, spec.dt);
      }
    }
    for (std::size_t n = 0; n < t_grid.size(); ++n) {
      acc[n] += w * plus[n];
      if (j > 0) acc[n] += w * minus[n];
    }
  }
  for (auto& a : acc) a = std::sqrt(a / (2.0 * std::numbers::pi));
  return acc;
}

WholeSpaceResult wholespace_norm_curve(const OperatorMatrix& L, const WholeSpaceSpec& spec,
                                       std::span<const double> t_grid, double fit_t0, double fit_t1) {
  WholeSpaceResult res;
  res.t.assign(t_grid.begin(), t_grid.end());
  res.norm = wholespace_curve_on_grid(L, spec, t_grid);
  WholeSpaceSpec fine = spec;
  fine.k_step = 0.5 * spec.k_step;
  const auto ref = wholespace_curve_on_grid(L, fine, t_grid);
  for (std::size_t n = 0; n < ref.size(); ++n)
    if (ref[n] > 0.0) res.resolution_change = std::max(res.resolution_change, std::abs(res.norm[n] - ref[n]) / ref[n]);
  if (res.resolution_change > 0.01) {
    std::ostringstream os;
    os << "whole-space quadrature unresolved: halving the k-step changes the norm by "
       << 100.0 * res.resolution_change << "%";
    throw NumericError(os.str());
  }
  res.fit = fit_algebraic(res.t, res.norm, fit_t0, fit_t1);
  return res;
}

double weighted_inverse_norm(const BasisTruncation& basis, WeightKind w, std::span<const double> v) {
  if (v.size() != basis.size()) throw DomainError("weighted norm: length mismatch");
  if (w == WeightKind::Unit) return norm2(v);
  const RealMatrix s = spd_inv_sqrt(weight_matrix(basis, w));
  return norm2(std::span<const double>(matvec(s, v)));
}

double gaussian_profile_lq_norm(int alpha, double q) {
  if (alpha < 0) throw DomainError("profile norm: derivative order must be nonnegative");
  if (!(q >= 1.0)) throw DomainError("profile norm: q must be at least 1");
  constexpr double kLim = 40.0;
  constexpr std::size_t kPts = 160000;
  const double h = 2.0 * kLim / static_cast<double>(kPts);
  const double c = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  double sum = 0.0;
  for (std::size_t j = 0; j <= kPts; ++j) {
    const double x = -kLim + h * static_cast<double>(j);
    double he_prev = 1.0;
    double he = x;
    double val = 1.0;
    if (alpha >= 1) {
      for (int n = 1; n < alpha; ++n) {
        const double next = x * he - n * he_prev;
        he_prev = he;
        he = next;
      }
      val = he;
    }
    const double f = c * std::abs(val) * std::exp(-0.5 * x * x);
    sum += trapezoid_weight(j, kPts, h) * std::pow(f, q);
  }
  return std::pow(sum, 1.0 / q);
}

namespace {

struct DuhamelCurve {
  std::vector<double> lhs;
};

DuhamelCurve duhamel_lhs(const OperatorMatrix& L, const DuhamelSpec& spec, std::span<const double> t_grid,
                         double k_step, double dt) {
  const KGrid g = make_half_grid(spec.k_max, k_step);
  const std::size_t n = L.basis->size();
  std::vector<Complex> v(spec.source_vector.begin(), spec.source_vector.end());
  std::vector<double> acc(t_grid.size(), 0.0);
  const std::size_t last = g.k.size() - 1;
  for (std::size_t j = 0; j <= last; ++j) {
    const double k = g.k[j];
    const double kw = std::pow(k, 2 * spec.alpha);
    if (kw == 0.0 && spec.alpha > 0) continue;
    const double amp = std::exp(-0.5 * k * k);
    const std::vector<double> kv{k};
    const ComplexMatrix b = assemble_symbol(L, kv);
    std::vector<Complex> src(n);
    auto source = [&](double s) {
      const double f = std::exp(-s) * amp;
      for (std::size_t i = 0; i < n; ++i) src[i] = f * v[i];
      return src;
    };
    const std::vector<Complex> zero(n, 0.0);
    IntegrationStats stats;
    const auto traj = evolve_midpoint<Complex>(b, zero, t_grid, dt, source, &stats);
    const double w = folded_weight(j, last, g.h) * kw * (j > 0 ? 2.0 : 1.0);
    for (std::size_t m = 0; m < t_grid.size(); ++m) acc[m] += w * std::pow(norm2(std::span<const Complex>(traj[m])), 2);
  }
  for (auto& a : acc) a /= 2.0 * std::numbers::pi;
  return {acc};
}

}  // namespace

DuhamelReport duhamel_bound_check(const OperatorMatrix& L, const DuhamelSpec& spec, std::span<const double> t_grid) {
  if (L.basis->dim() != 1) throw DomainError("duhamel check is implemented for d = 1");
  if (spec.source_vector.size() != L.basis->size()) throw DomainError("duhamel: source vector length mismatch");
  if (spec.alpha_prime < 0 || spec.alpha < spec.alpha_prime)
    throw DomainError("duhamel: derivative orders must satisfy 0 <= alpha' <= alpha");
  if (t_grid.empty() || t_grid.front() != 0.0) throw DomainError("duhamel: time grid must start at 0");
  reject_kernel_component(L, std::span<const double>(spec.source_vector), "source");
  DuhamelReport rep;
  rep.t.assign(t_grid.begin(), t_grid.end());
  const Rational sig = sigma_index_exact(spec.q_num, spec.q_den, spec.alpha - spec.alpha_prime, 1);
  rep.sigma = sig.value();
  const double q = static_cast<double>(spec.q_num) / static_cast<double>(spec.q_den);

  const double wv = weighted_inverse_norm(*L.basis, L.weight, spec.source_vector);
  const double zq = gaussian_profile_lq_norm(spec.alpha_prime, q);
  const double l2 = gaussian_profile_lq_norm(spec.alpha, 2.0);
  const double amp = wv * wv * (zq * zq + l2 * l2);

  rep.rhs.resize(t_grid.size());
  for (std::size_t m = 0; m < t_grid.size(); ++m) {
    const double t = t_grid[m];
    constexpr int kPanels = 4000;
    const double h = t / kPanels;
    double s = 0.0;
    for (int j = 0; j <= kPanels; ++j) {
      const double x = h * j;
      const double f = std::pow(1.0 + t - x, -2.0 * rep.sigma) * std::exp(-2.0 * x);
      const double w = (j == 0 || j == kPanels) ? 1.0 : (j % 2 ? 4.0 : 2.0);
      s += w * f;
    }
    rep.rhs[m] = amp * s * h / 3.0;
  }

  rep.lhs = duhamel_lhs(L, spec, t_grid, spec.k_step, spec.dt).lhs;
  const auto fine = duhamel_lhs(L, spec, t_grid, 0.5 * spec.k_step, 0.5 * spec.dt).lhs;
  for (std::size_t m = 0; m < t_grid.size(); ++m) {
    if (rep.rhs[m] <= 0.0) continue;
    rep.c_fit = std::max(rep.c_fit, rep.lhs[m] / rep.rhs[m]);
    rep.c_fit_refined = std::max(rep.c_fit_refined, fine[m] / rep.rhs[m]);
  }
  if (rep.c_fit == 0.0 && rep.c_fit_refined == 0.0) {
    rep.stable = true;
  } else if (rep.c_fit > 0.0 && rep.c_fit_refined > 0.0) {
    const double r = rep.c_fit / rep.c_fit_refined;
    rep.stable = r <= 2.0 && r >= 0.5;
  }
  return rep;
}

}  // namespace hypoflow
