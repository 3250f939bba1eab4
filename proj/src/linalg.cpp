#include "hypoflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace hypoflow {

template <typename T>
LUDecomposition<T>::LUDecomposition(DenseMatrix<T> a, double pivot_tol)
    : lu_(std::move(a)), perm_(lu_.rows()) {
  if (!lu_.square()) throw DomainError("LU: matrix must be square");
  const std::size_t n = lu_.rows();
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  const double scale = std::max(1.0, lu_.max_abs());
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(lu_(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best < pivot_tol * scale)
      throw NumericError("LU: singular matrix, pivot " + std::to_string(k) + " has magnitude " +
                         std::to_string(best));
    if (p != k) {
      std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(p).begin());
      std::swap(perm_[k], perm_[p]);
    }
    const T pivot = lu_(k, k);
    const auto rk = lu_.row(k);
    for (std::size_t i = k + 1; i < n; ++i) {
      auto ri = lu_.row(i);
      const T f = ri[k] / pivot;
      ri[k] = f;
      if (f == T{}) continue;
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= f * rk[j];
    }
  }
}

template <typename T>
std::vector<T> LUDecomposition<T>::solve(std::span<const T> rhs) const {
  const std::size_t n = lu_.rows();
  if (rhs.size() != n) throw DomainError("LU solve: rhs length mismatch");
  std::vector<T> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rhs[perm_[i]];
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = lu_.row(i);
    T s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= r[j] * x[j];
    x[i] = s;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    const auto r = lu_.row(ii);
    T s = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= r[j] * x[j];
    x[ii] = s / r[ii];
  }
  return x;
}

template class LUDecomposition<double>;
template class LUDecomposition<Complex>;

double max_asymmetry(const RealMatrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - a(j, i)));
  return m;
}

namespace {

double offdiag_norm(const RealMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

EigenResult jacobi_eigen(const RealMatrix& input, double tol, int max_sweeps) {
  if (!input.square()) throw DomainError("jacobi_eigen: matrix must be square");
  const double scale = std::max(1.0, input.max_abs());
  if (max_asymmetry(input) > 1e-10 * scale) throw DomainError("jacobi_eigen: matrix is not symmetric");
  const std::size_t n = input.rows();
  RealMatrix a = input;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (input(i, j) + input(j, i));
  RealMatrix v = RealMatrix::identity(n);
  EigenResult out;
  const double target = tol * std::max(scale, a.frobenius());
  double off = offdiag_norm(a);
  while (off > target) {
    if (out.sweeps >= max_sweeps) throw NumericError("jacobi_eigen: no convergence");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    ++out.sweeps;
    off = offdiag_norm(a);
    out.offdiag_history.push_back(off);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  out.values.resize(n);
  out.vectors = RealMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

RealMatrix cholesky(const RealMatrix& a) {
  if (!a.square()) throw DomainError("cholesky: matrix must be square");
  const std::size_t n = a.rows();
  RealMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = a(j, j);
    for (std::size_t k = 0; k < j; ++k) s -= l(j, k) * l(j, k);
    if (!(s > 0.0)) throw NumericError("cholesky: matrix not positive definite at row " + std::to_string(j));
    l(j, j) = std::sqrt(s);
    for (std::size_t i = j + 1; i < n; ++i) {
      double t = a(i, j);
      for (std::size_t k = 0; k < j; ++k) t -= l(i, k) * l(j, k);
      l(i, j) = t / l(j, j);
    }
  }
  return l;
}

namespace {

RealMatrix lower_inverse(const RealMatrix& l) {
  const std::size_t n = l.rows();
  RealMatrix inv(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    inv(j, j) = 1.0 / l(j, j);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = j; k < i; ++k) s -= l(i, k) * inv(k, j);
      inv(i, j) = s / l(i, i);
    }
  }
  return inv;
}

}  // namespace

EigenResult generalized_eigen(const RealMatrix& a, const RealMatrix& m) {
  if (a.rows() != m.rows() || !a.square() || !m.square())
    throw DomainError("generalized_eigen: shape mismatch");
  const RealMatrix linv = lower_inverse(cholesky(m));
  RealMatrix c = matmul(matmul(linv, a), linv.transpose());
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = i + 1; j < c.cols(); ++j) c(i, j) = c(j, i) = 0.5 * (c(i, j) + c(j, i));
  EigenResult r = jacobi_eigen(c);
  r.vectors = matmul(linv.transpose(), r.vectors);
  return r;
}

RealMatrix hermitian_embedding(const ComplexMatrix& h) {
  const std::size_t n = h.rows();
  RealMatrix e(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Complex z = h(i, j);
      e(i, j) = z.real();
      e(i, j + n) = -z.imag();
      e(i + n, j) = z.imag();
      e(i + n, j + n) = z.real();
    }
  return e;
}

double min_generalized_hermitian(const ComplexMatrix& h, const ComplexMatrix& q) {
  const EigenResult r = generalized_eigen(hermitian_embedding(h), hermitian_embedding(q));
  return r.values.front();
}

namespace {

RealMatrix spd_power(const RealMatrix& a, double power) {
  const EigenResult r = jacobi_eigen(a);
  const std::size_t n = a.rows();
  RealMatrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(r.values[k] > 0.0)) throw NumericError("spd_power: matrix not positive definite");
    const double f = std::pow(r.values[k], power);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) += f * r.vectors(i, k) * r.vectors(j, k);
  }
  return out;
}

}  // namespace

RealMatrix spd_sqrt(const RealMatrix& a) { return spd_power(a, 0.5); }
RealMatrix spd_inv_sqrt(const RealMatrix& a) { return spd_power(a, -0.5); }

}  // namespace hypoflow
