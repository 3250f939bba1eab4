#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "hypoflow/hermite.hpp"
#include "hypoflow/random.hpp"

using namespace hypoflow;

namespace {

// Y(H̃_n M^{1/2}) = H̃_n' M^{1/2}; the derivative is taken by central differences.
double quad_annihilation_1d(int n, int m) {
  const auto rule = gauss_hermite_rule(40);
  double s = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double x = rule.nodes[q];
    const double h = 1e-4;
    const double dp = (hermite_values(n, x + h)[n] - hermite_values(n, x - h)[n]) / (2 * h);
    s += rule.weights[q] * dp * hermite_values(std::max(n, m), x)[m];
  }
  return s;
}

double quad_xi_1d(int n, int m) {
  const auto rule = gauss_hermite_rule(40);
  double s = 0.0;
  const int top = std::max(n, m);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const auto h = hermite_values(top, rule.nodes[q]);
    s += rule.weights[q] * rule.nodes[q] * h[n] * h[m];
  }
  return s;
}

}  // namespace

TEST_CASE("enumerate_basis sizes and order") {
  const auto b1 = enumerate_basis(1, 2);
  REQUIRE(b1->size() == 3);
  CHECK(b1->at(0).entries() == std::vector<int>{0});
  CHECK(b1->at(1).entries() == std::vector<int>{1});
  CHECK(b1->at(2).entries() == std::vector<int>{2});
  CHECK(enumerate_basis(2, 2)->size() == 6);
  const auto b3 = enumerate_basis(3, 8);
  CHECK(b3->size() == 165);
  std::size_t brute = 0;
  for (int a = 0; a <= 8; ++a)
    for (int b = 0; b <= 8; ++b)
      for (int c = 0; c <= 8; ++c)
        if (a + b + c <= 8) ++brute;
  CHECK(b3->size() == brute);
  for (std::size_t k = 0; k < b3->size(); ++k) CHECK(b3->find(b3->at(k)) == k);
  for (std::size_t k = 1; k < b3->size(); ++k) CHECK(b3->at(k - 1).degree() <= b3->at(k).degree());
  CHECK(b3->prefix_size(2) == binomial(5, 3));
  CHECK_THROWS_AS(enumerate_basis(0, 4), DomainError);
  CHECK_THROWS_AS(enumerate_basis(2, 1), DomainError);
}

TEST_CASE("annihilation matches the quadrature oracle") {
  const auto b = enumerate_basis(1, 6);
  std::vector<double> phi0(b->size(), 0.0);
  phi0[0] = 1.0;
  const auto y0 = apply_annihilation(*b, 0, std::span<const double>(phi0));
  for (double v : y0) CHECK(v == 0.0);

  std::vector<double> phi2(b->size(), 0.0);
  phi2[2] = 1.0;
  const auto y2 = apply_annihilation(*b, 0, std::span<const double>(phi2));
  CHECK(y2[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  for (int n = 0; n <= 6; ++n)
    for (int m = 0; m <= 6; ++m)
      CHECK(annihilation_matrix(*b, 0)(m, n) == doctest::Approx(quad_annihilation_1d(n, m)).epsilon(1e-7));

  const auto b2 = enumerate_basis(2, 4);
  std::vector<double> phi11(b2->size(), 0.0);
  phi11[b2->index_of({1, 1})] = 1.0;
  const auto y = apply_annihilation(*b2, 0, std::span<const double>(phi11));
  CHECK(y[b2->index_of({0, 1})] == doctest::Approx(1.0));
  CHECK(norm2(std::span<const double>(y)) == doctest::Approx(1.0));
}

TEST_CASE("creation: action, truncation report, adjointness") {
  const int N = 5;
  const auto b = enumerate_basis(1, N);
  std::vector<double> phi0(b->size(), 0.0);
  phi0[0] = 1.0;
  const auto c0 = apply_creation(*b, 0, std::span<const double>(phi0));
  CHECK(c0.values[1] == doctest::Approx(1.0));
  CHECK(c0.dropped_mass == 0.0);
  CHECK(quad_xi_1d(0, 1) == doctest::Approx(1.0).epsilon(1e-13));

  std::vector<double> phiN(b->size(), 0.0);
  phiN[N] = 1.0;
  const auto cN = apply_creation(*b, 0, std::span<const double>(phiN));
  for (double v : cN.values) CHECK(v == 0.0);
  CHECK(cN.dropped_mass == doctest::Approx(1.0));

  const auto b3 = enumerate_basis(3, 6);
  Xoshiro256 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> u(b3->size()), v(b3->size());
    for (std::size_t k = 0; k < b3->size(); ++k) {
      const bool interior = b3->at(k).degree() <= 5;
      u[k] = interior ? rng.normal() : 0.0;
      v[k] = interior ? rng.normal() : 0.0;
    }
    for (std::size_t ax = 0; ax < 3; ++ax) {
      const auto yu = apply_annihilation(*b3, ax, std::span<const double>(u));
      const auto ysv = apply_creation(*b3, ax, std::span<const double>(v));
      CHECK(std::abs(dot(std::span<const double>(yu), std::span<const double>(v)) -
                     dot(std::span<const double>(u), std::span<const double>(ysv.values))) < 1e-12);
    }
  }
  CHECK((creation_matrix(*b3, 1) - annihilation_matrix(*b3, 1).transpose()).max_abs() == 0.0);
}

TEST_CASE("xi multiplication") {
  const auto b = enumerate_basis(1, 4);
  std::vector<double> phi0(b->size(), 0.0), phi1(b->size(), 0.0);
  phi0[0] = 1.0;
  phi1[1] = 1.0;
  const auto r0 = apply_xi_multiply(*b, 0, std::span<const double>(phi0));
  CHECK(r0.values[1] == doctest::Approx(1.0));
  CHECK(r0.values[0] == 0.0);
  const auto r1 = apply_xi_multiply(*b, 0, std::span<const double>(phi1));
  CHECK(r1.values[0] == doctest::Approx(1.0));
  CHECK(r1.values[2] == doctest::Approx(std::sqrt(2.0)));
  CHECK(quad_xi_1d(1, 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
  CHECK(std::abs(quad_xi_1d(0, 0)) < 1e-15);
}

TEST_CASE("ladder algebra [Y_i, Y_j*] = δ_ij on interior degrees") {
  const auto b = enumerate_basis(2, 5);
  const std::size_t interior = b->prefix_size(4);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      const auto yi = annihilation_matrix(*b, i), yj = creation_matrix(*b, j);
      const auto comm = matmul(yi, yj) - matmul(yj, yi);
      for (std::size_t r = 0; r < interior; ++r)
        for (std::size_t c = 0; c < interior; ++c)
          CHECK(std::abs(comm(r, c) - ((i == j && r == c) ? 1.0 : 0.0)) < 1e-14);
    }
}

TEST_CASE("gauss_hermite_rule: small rules and exactness") {
  const auto r1 = gauss_hermite_rule(1);
  CHECK(r1.nodes[0] == 0.0);
  CHECK(r1.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
  const auto r2 = gauss_hermite_rule(2);
  CHECK(r2.nodes[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(r2.nodes[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r2.weights[0] == doctest::Approx(0.5).epsilon(1e-14));
  const auto r3 = gauss_hermite_rule(3);
  double m4 = 0.0;
  for (std::size_t q = 0; q < 3; ++q) m4 += r3.weights[q] * std::pow(r3.nodes[q], 4);
  CHECK(m4 == doctest::Approx(3.0).epsilon(1e-14));
  for (int n : {5, 20, 60, 120}) {
    const auto r = gauss_hermite_rule(n);
    double ws = 0.0;
    for (double w : r.weights) ws += w;
    CHECK(ws == doctest::Approx(1.0).epsilon(1e-13));
  }
  CHECK_THROWS_AS(gauss_hermite_rule(0), DomainError);
  CHECK_THROWS_AS(gauss_hermite_rule(kGaussHermiteCap + 1), DomainError);
}

TEST_CASE("orthonormality and Parseval under tensor quadrature") {
  const int N = 6;
  const auto b = enumerate_basis(2, N);
  const auto tq = tensor_rule(2, N + 1);
  RealMatrix gram(b->size(), b->size());
  std::vector<std::vector<double>> vals;
  for (const auto& p : tq.points) vals.push_back(basis_polynomials(*b, p));
  for (std::size_t q = 0; q < tq.points.size(); ++q)
    for (std::size_t i = 0; i < b->size(); ++i)
      for (std::size_t j = 0; j < b->size(); ++j) gram(i, j) += tq.weights[q] * vals[q][i] * vals[q][j];
  CHECK((gram - RealMatrix::identity(b->size())).max_abs() < 1e-12);

  Xoshiro256 rng(99);
  const auto c = rng.normal_vector(b->size());
  double l2 = 0.0;
  for (std::size_t q = 0; q < tq.points.size(); ++q) {
    double f = 0.0;
    for (std::size_t i = 0; i < b->size(); ++i) f += c[i] * vals[q][i];
    l2 += tq.weights[q] * f * f;
  }
  CHECK(std::abs(l2 - std::pow(norm2(std::span<const double>(c)), 2)) < 1e-10);
}
