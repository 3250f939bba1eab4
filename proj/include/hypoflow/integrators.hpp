#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hypoflow/dense_matrix.hpp"
#include "hypoflow/linalg.hpp"

namespace hypoflow {

/// Implicit midpoint (Cayley) stepper for u' = B u + s with a fixed step.
template <typename T>
class MidpointStepper {
 public:
  MidpointStepper(const DenseMatrix<T>& b, double dt) : b_(&b), dt_(dt), lu_(left_matrix(b, dt)) {}

  double dt() const { return dt_; }

  /// Advances one step; `source_mid` is the source evaluated at the midpoint time.
  std::vector<T> step(std::span<const T> u, std::span<const T> source_mid = {}) const {
    const std::size_t n = u.size();
    const auto bu = matvec(*b_, u);
    std::vector<T> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = u[i] + (0.5 * dt_) * bu[i];
    if (!source_mid.empty())
      for (std::size_t i = 0; i < n; ++i) rhs[i] += dt_ * source_mid[i];
    return lu_.solve(rhs);
  }

  /// Relative defect of the discrete energy identity
  /// ‖u⁺‖² − ‖u‖² = 2Δt Re⟨u_mid, B u_mid + s⟩ for one step.
  double energy_defect(std::span<const T> u, std::span<const T> up,
                       std::span<const T> source_mid = {}) const {
    const std::size_t n = u.size();
    std::vector<T> mid(n);
    for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (u[i] + up[i]);
    auto bm = matvec(*b_, std::span<const T>(mid));
    if (!source_mid.empty())
      for (std::size_t i = 0; i < n; ++i) bm[i] += source_mid[i];
    const double lhs = std::pow(norm2(up), 2) - std::pow(norm2(u), 2);
    const double rhs = 2.0 * dt_ * std::real(dot(std::span<const T>(mid), std::span<const T>(bm)));
    const double scale = std::max(std::pow(norm2(u), 2), 1e-300);
    return std::abs(lhs - rhs) / scale;
  }

  /// Dense one-step propagator S = (I − Δt/2 B)^{-1}(I + Δt/2 B).
  DenseMatrix<T> propagator() const {
    const std::size_t n = b_->rows();
    DenseMatrix<T> s(n, n);
    std::vector<T> e(n, T{});
    for (std::size_t j = 0; j < n; ++j) {
      std::fill(e.begin(), e.end(), T{});
      e[j] = T{1};
      const auto col = step(e);
      for (std::size_t i = 0; i < n; ++i) s(i, j) = col[i];
    }
    return s;
  }

 private:
  static DenseMatrix<T> left_matrix(const DenseMatrix<T>& b, double dt) {
    if (!b.square()) throw DomainError("implicit midpoint: generator must be square");
    DenseMatrix<T> a = b * T(-0.5 * dt);
    for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += T{1};
    return a;
  }

  const DenseMatrix<T>* b_;
  double dt_;
  LUDecomposition<T> lu_;
};

/// One implicit-midpoint step with a fresh factorization.
template <typename T>
std::vector<T> implicit_midpoint_step(const DenseMatrix<T>& b, std::span<const T> u, double dt,
                                      std::span<const T> source_mid = {}) {
  return MidpointStepper<T>(b, dt).step(u, source_mid);
}

/// Classical RK4 step for u' = B u + s(t).
template <typename T>
std::vector<T> rk4_step(const DenseMatrix<T>& b, std::span<const T> u, double t, double dt,
                        const std::function<std::vector<T>(double)>& source = {}) {
  const std::size_t n = u.size();
  auto f = [&](double tt, std::span<const T> x) {
    auto y = matvec(b, x);
    if (source) {
      const auto s = source(tt);
      for (std::size_t i = 0; i < n; ++i) y[i] += s[i];
    }
    return y;
  };
  std::vector<T> tmp(n);
  const auto k1 = f(t, u);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + (0.5 * dt) * k1[i];
  const auto k2 = f(t + 0.5 * dt, tmp);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + (0.5 * dt) * k2[i];
  const auto k3 = f(t + 0.5 * dt, tmp);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + dt * k3[i];
  const auto k4 = f(t + dt, tmp);
  std::vector<T> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = u[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

struct IntegrationStats {
  std::size_t steps = 0;
  std::size_t halvings = 0;
  double max_defect = 0.0;
  double max_norm_growth = 0.0;  ///< max over steps of ‖u⁺‖/‖u‖ − 1 (sourceless runs)
};

template <typename T>
using SourceFn = std::function<std::vector<T>(double)>;

/// Trajectory sampled on `t_grid` (which must start at 0 and increase).
/// Inside each grid interval the step is the largest Δt ≤ dt_max dividing it evenly;
/// a step whose energy-identity defect exceeds `defect_tol` is retried at half size.
template <typename T>
std::vector<std::vector<T>> evolve_midpoint(const DenseMatrix<T>& b, std::span<const T> u0,
                                            std::span<const double> t_grid, double dt_max,
                                            const SourceFn<T>& source = {},
                                            IntegrationStats* stats = nullptr,
                                            double defect_tol = 1e-8) {
  if (t_grid.empty() || t_grid.front() != 0.0) throw DomainError("evolve: time grid must start at 0");
  if (!(dt_max > 0.0)) throw DomainError("evolve: dt_max must be positive");
  std::map<double, std::unique_ptr<MidpointStepper<T>>> cache;
  auto stepper = [&](double h) -> const MidpointStepper<T>& {
    auto& slot = cache[h];
    if (!slot) slot = std::make_unique<MidpointStepper<T>>(b, h);
    return *slot;
  };
  IntegrationStats local;
  std::vector<std::vector<T>> traj;
  traj.reserve(t_grid.size());
  std::vector<T> u(u0.begin(), u0.end());
  traj.push_back(u);
  for (std::size_t g = 1; g < t_grid.size(); ++g) {
    const double span_t = t_grid[g] - t_grid[g - 1];
    if (!(span_t > 0.0)) throw DomainError("evolve: time grid must be strictly increasing");
    std::size_t m = static_cast<std::size_t>(std::ceil(span_t / dt_max - 1e-12));
    m = std::max<std::size_t>(m, 1);
    double t = t_grid[g - 1];
    const double h0 = span_t / static_cast<double>(m);
    for (std::size_t s = 0; s < m; ++s) {
      std::vector<T> cur = u;
      double remaining = h0;
      double h = h0;
      while (remaining > 1e-15 * h0) {
        h = std::min(h, remaining);
        std::vector<T> src;
        if (source) src = source(t + 0.5 * h);
        const auto& st = stepper(h);
        auto next = st.step(cur, src);
        const double defect = st.energy_defect(cur, next, src);
        if (defect > defect_tol && h > h0 * 1e-6) {
          h *= 0.5;
          ++local.halvings;
          continue;
        }
        local.max_defect = std::max(local.max_defect, defect);
        if (!source) {
          const double n0 = norm2(std::span<const T>(cur));
          if (n0 > 0.0) local.max_norm_growth = std::max(local.max_norm_growth, norm2(std::span<const T>(next)) / n0 - 1.0);
        }
        cur = std::move(next);
        t += h;
        remaining -= h;
        ++local.steps;
      }
      u = std::move(cur);
    }
    t = t_grid[g];
    traj.push_back(u);
  }
  if (stats) *stats = local;
  return traj;
}

/// Matrix power by repeated squaring.
template <typename T>
DenseMatrix<T> matrix_power(DenseMatrix<T> s, std::size_t m) {
  DenseMatrix<T> r = DenseMatrix<T>::identity(s.rows());
  while (m > 0) {
    if (m & 1U) r = matmul(r, s);
    m >>= 1U;
    if (m) s = matmul(s, s);
  }
  return r;
}

}  // namespace hypoflow
