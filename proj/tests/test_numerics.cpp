#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "hypoflow/dense_matrix.hpp"
#include "hypoflow/fit.hpp"
#include "hypoflow/integrators.hpp"
#include "hypoflow/linalg.hpp"
#include "hypoflow/random.hpp"

using namespace hypoflow;

namespace {

RealMatrix random_matrix(std::size_t n, Xoshiro256& rng) {
  RealMatrix a(n, n);
  for (auto& v : a.data()) v = rng.normal();
  return a;
}

RealMatrix random_symmetric(std::size_t n, Xoshiro256& rng) {
  RealMatrix a = random_matrix(n, rng);
  return (a + a.transpose()) * 0.5;
}

// ½(K − Kᵀ) − GᵀG is dissipative with a nontrivial skew part.
RealMatrix random_dissipative(std::size_t n, Xoshiro256& rng) {
  RealMatrix g = random_matrix(n, rng) * (1.0 / std::sqrt(static_cast<double>(n)));
  RealMatrix k = random_matrix(n, rng);
  RealMatrix b = (k - k.transpose()) * 0.5 - matmul(g.transpose(), g);
  return b;
}

}  // namespace

TEST_CASE("jacobi: identity has unit spectrum") {
  const auto r = jacobi_eigen(RealMatrix::identity(5));
  for (double v : r.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("jacobi: rotated diagonal recovers eigenvalues") {
  const double c = std::cos(0.3), s = std::sin(0.3);
  RealMatrix q = RealMatrix::identity(3);
  q(0, 0) = c; q(0, 1) = -s; q(1, 0) = s; q(1, 1) = c;
  RealMatrix q2 = RealMatrix::identity(3);
  q2(1, 1) = std::cos(1.1); q2(1, 2) = -std::sin(1.1); q2(2, 1) = std::sin(1.1); q2(2, 2) = std::cos(1.1);
  q = matmul(q, q2);
  RealMatrix dmat(3, 3);
  dmat(0, 0) = 1.0; dmat(1, 1) = -2.0; dmat(2, 2) = 0.0;
  const auto a = matmul(matmul(q, dmat), q.transpose());
  const auto r = jacobi_eigen(a);
  CHECK(r.values[0] == doctest::Approx(-2.0).epsilon(1e-13));
  CHECK(std::abs(r.values[1]) < 1e-13);
  CHECK(r.values[2] == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("jacobi: random symmetric 50x50 reconstruction and orthonormality") {
  Xoshiro256 rng(7);
  const auto a = random_symmetric(50, rng);
  const auto r = jacobi_eigen(a);
  RealMatrix lam(50, 50);
  for (std::size_t i = 0; i < 50; ++i) lam(i, i) = r.values[i];
  const auto rec = matmul(matmul(r.vectors, lam), r.vectors.transpose());
  CHECK((rec - a).max_abs() < 1e-8);
  const auto gram = matmul(r.vectors.transpose(), r.vectors);
  CHECK((gram - RealMatrix::identity(50)).max_abs() < 1e-10);
  for (std::size_t j = 0; j < 50; ++j) {
    std::vector<double> v(50);
    for (std::size_t i = 0; i < 50; ++i) v[i] = r.vectors(i, j);
    const auto av = matvec(a, std::span<const double>(v));
    double res = 0.0;
    for (std::size_t i = 0; i < 50; ++i) res = std::max(res, std::abs(av[i] - r.values[j] * v[i]));
    CHECK(res <= 1e-9 * a.max_abs());
  }
  for (std::size_t s = 1; s < r.offdiag_history.size(); ++s)
    CHECK(r.offdiag_history[s] <= r.offdiag_history[s - 1]);
}

TEST_CASE("jacobi: non-symmetric input rejected") {
  RealMatrix a(2, 2);
  a(0, 1) = 1.0;
  CHECK_THROWS_AS(jacobi_eigen(a), DomainError);
}

TEST_CASE("linear_solve: identity, diagonal, random residual") {
  std::vector<double> rhs{1.0, -2.0, 3.0};
  const auto x = linear_solve(RealMatrix::identity(3), std::span<const double>(rhs));
  for (std::size_t i = 0; i < 3; ++i) CHECK(x[i] == rhs[i]);
  RealMatrix dg(3, 3);
  dg(0, 0) = 2.0; dg(1, 1) = 4.0; dg(2, 2) = -8.0;
  const auto y = linear_solve(dg, std::span<const double>(rhs));
  CHECK(y[0] == 0.5); CHECK(y[1] == -0.5); CHECK(y[2] == -0.375);

  Xoshiro256 rng(11);
  RealMatrix a = random_matrix(100, rng);
  for (std::size_t i = 0; i < 100; ++i) a(i, i) += 20.0;
  const auto b = rng.normal_vector(100);
  const auto z = linear_solve(a, std::span<const double>(b));
  const auto az = matvec(a, std::span<const double>(z));
  double res = 0.0;
  for (std::size_t i = 0; i < 100; ++i) res += (az[i] - b[i]) * (az[i] - b[i]);
  CHECK(std::sqrt(res) <= 1e-10 * norm2(std::span<const double>(b)));
}

TEST_CASE("linear_solve: singular matrix reports pivot") {
  RealMatrix a(2, 2);
  a(0, 0) = 1.0; a(0, 1) = 2.0; a(1, 0) = 2.0; a(1, 1) = 4.0;
  std::vector<double> rhs{1.0, 1.0};
  CHECK_THROWS_AS(linear_solve(a, std::span<const double>(rhs)), NumericError);
}

TEST_CASE("implicit midpoint: skew generator preserves the norm") {
  Xoshiro256 rng(3);
  RealMatrix k = random_matrix(12, rng);
  const RealMatrix skew = (k - k.transpose()) * 0.5;
  const auto u = rng.normal_vector(12);
  for (double dt : {0.01, 0.5, 3.0}) {
    const auto up = implicit_midpoint_step(skew, std::span<const double>(u), dt);
    CHECK(std::abs(norm2(std::span<const double>(up)) - norm2(std::span<const double>(u))) < 1e-12 * norm2(std::span<const double>(u)));
  }
}

TEST_CASE("implicit midpoint: scalar decay factor") {
  RealMatrix b(1, 1, -1.0);
  std::vector<double> u{1.0};
  const auto up = implicit_midpoint_step(b, std::span<const double>(u), 0.1);
  CHECK(up[0] == doctest::Approx(0.95 / 1.05).epsilon(1e-15));
}

TEST_CASE("implicit midpoint agrees with fine RK4 on a dissipative 20x20 system") {
  Xoshiro256 rng(5);
  const auto b = random_dissipative(20, rng);
  const auto u0 = rng.normal_vector(20);
  std::vector<double> grid{0.0, 1.0};
  const auto traj = evolve_midpoint(b, std::span<const double>(u0), std::span<const double>(grid), 2e-4);
  std::vector<double> v = u0;
  const int steps = 500000;
  for (int s = 0; s < steps; ++s) v = rk4_step(b, std::span<const double>(v), s * 2e-6, 2e-6);
  double err = 0.0;
  for (std::size_t i = 0; i < 20; ++i) err = std::max(err, std::abs(v[i] - traj.back()[i]));
  CHECK(err < 1e-6);
}

TEST_CASE("implicit midpoint contracts for random dissipative generators") {
  Xoshiro256 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto b = random_dissipative(10, rng);
    const auto u = rng.normal_vector(10);
    const auto up = implicit_midpoint_step(b, std::span<const double>(u), 0.3);
    CHECK(norm2(std::span<const double>(up)) <= norm2(std::span<const double>(u)) * (1.0 + 1e-14));
  }
}

TEST_CASE("evolve_midpoint: energy defect stays at roundoff") {
  Xoshiro256 rng(13);
  const auto b = random_dissipative(8, rng);
  const auto u0 = rng.normal_vector(8);
  std::vector<double> grid{0.0, 0.5, 1.0, 2.0};
  IntegrationStats stats;
  evolve_midpoint(b, std::span<const double>(u0), std::span<const double>(grid), 0.05, {}, &stats);
  CHECK(stats.max_defect < 1e-12);
  CHECK(stats.max_norm_growth <= 1e-14);
  CHECK(stats.halvings == 0);
}

TEST_CASE("complex LU and hermitian generalized eigenvalue") {
  ComplexMatrix h(2, 2);
  h(0, 0) = 2.0; h(1, 1) = 2.0; h(0, 1) = Complex(0.0, 1.0); h(1, 0) = Complex(0.0, -1.0);
  const double lmin = min_generalized_hermitian(h, ComplexMatrix::identity(2));
  CHECK(lmin == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<Complex> rhs{Complex(1.0, 0.0), Complex(0.0, 1.0)};
  const auto x = linear_solve(h, std::span<const Complex>(rhs));
  const auto hx = matvec(h, std::span<const Complex>(x));
  CHECK(std::abs(hx[0] - rhs[0]) < 1e-14);
  CHECK(std::abs(hx[1] - rhs[1]) < 1e-14);
}

TEST_CASE("generalized symmetric eigenproblem") {
  RealMatrix a(2, 2), m(2, 2);
  a(0, 0) = 2.0; a(1, 1) = 6.0;
  m(0, 0) = 1.0; m(1, 1) = 2.0;
  const auto r = generalized_eigen(a, m);
  CHECK(r.values[0] == doctest::Approx(2.0));
  CHECK(r.values[1] == doctest::Approx(3.0));
}

TEST_CASE("spd square roots") {
  Xoshiro256 rng(17);
  RealMatrix g = random_matrix(6, rng);
  RealMatrix a = matmul(g.transpose(), g);
  for (std::size_t i = 0; i < 6; ++i) a(i, i) += 1.0;
  const auto s = spd_sqrt(a);
  CHECK((matmul(s, s) - a).max_abs() < 1e-10);
  const auto si = spd_inv_sqrt(a);
  CHECK((matmul(matmul(si, a), si) - RealMatrix::identity(6)).max_abs() < 1e-10);
}

TEST_CASE("fit_line: exact, noisy, degenerate") {
  std::vector<double> xs{0, 1, 2, 3, 4}, ys;
  for (double x : xs) ys.push_back(2.0 * x + 1.0);
  auto f = fit_line(xs, ys, 0.0, 4.0);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.intercept == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f.rms_residual < 1e-14);

  const double eps = 1e-3;
  std::vector<double> noisy = ys;
  for (std::size_t i = 0; i < noisy.size(); ++i) noisy[i] += (i % 2 == 0 ? eps : -eps);
  f = fit_line(xs, noisy, 0.0, 4.0);
  CHECK(std::abs(f.slope - 2.0) <= eps);

  CHECK_THROWS_AS(fit_line(xs, ys, 2.0, 2.0), DomainError);
  std::vector<double> cx{1, 1, 1}, cy{1, 2, 3};
  CHECK_THROWS_AS(fit_line(cx, cy, 0.0, 2.0), DomainError);
}

TEST_CASE("exponential and algebraic decay fits") {
  std::vector<double> ts, ve, va;
  for (int i = 0; i <= 100; ++i) {
    const double t = i * 0.1;
    ts.push_back(t);
    ve.push_back(3.0 * std::exp(-0.7 * t));
    va.push_back(2.0 * std::pow(1.0 + t, -0.25));
  }
  CHECK(fit_exponential(ts, ve, 2.0, 10.0).rate == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(fit_algebraic(ts, va, 2.0, 10.0).rate == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("xoshiro256** streams are reproducible and split") {
  Xoshiro256 a(42), b(42), c(43);
  for (int i = 0; i < 5; ++i) CHECK(a.next() == b.next());
  CHECK(Xoshiro256(42).next() != c.next());
  Xoshiro256 p(1), q(1);
  auto s1 = p.split(0), s2 = q.split(0);
  CHECK(s1.next() == s2.next());
  Xoshiro256 r(2024);
  double mean = 0.0, var = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    mean += z;
    var += z * z;
  }
  mean /= n;
  var /= n;
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::abs(var - 1.0) < 0.05);
}
