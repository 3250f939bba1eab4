#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hypoflow/errors.hpp"
#include "hypoflow/inequalities.hpp"
#include "hypoflow/linalg.hpp"
#include "hypoflow/random.hpp"

using namespace hypoflow;

namespace {

// Degree-major vector for a field given by (component, multi-index, coefficient) terms.
std::vector<double> field(const FieldSpace& s, std::initializer_list<std::tuple<int, std::vector<int>, double>> terms) {
  std::vector<double> u(s.size(), 0.0);
  for (const auto& [c, alpha, v] : terms) u[s.dof(c, s.basis().find(alpha))] += v;
  return u;
}

double constraint_value(const std::vector<double>& c, const std::vector<double>& u) {
  return dot(std::span<const double>(c), std::span<const double>(u));
}

}  // namespace

TEST_CASE("field space ordering is a degree-major bijection") {
  const FieldSpace s(3, 5, 3);
  std::vector<int> seen(s.size(), 0);
  for (int c = 0; c < 3; ++c)
    for (std::size_t a = 0; a < s.basis().size(); ++a) {
      const std::size_t k = s.dof(c, a);
      ++seen[k];
      CHECK(s.component_of(k) == c);
      CHECK(s.basis_index_of(k) == a);
      CHECK(k >= s.block_begin(s.degree_of(k)));
      CHECK(k < s.block_end(s.degree_of(k)));
    }
  for (int v : seen) CHECK(v == 1);
  Xoshiro256 rng(1);
  const auto u = rng.normal_vector(s.size());
  const auto back = s.from_components(s.to_components(u));
  for (std::size_t k = 0; k < u.size(); ++k) CHECK(back[k] == u[k]);
}

TEST_CASE("Poincare constant is one with a degree-one witness") {
  for (int d = 1; d <= 3; ++d) {
    const auto r = poincare_constant(d, 8);
    CHECK(std::abs(r.lambda_fine - 1.0) <= 1e-10);
    CHECK(r.witness_degree == 1);
    CHECK(r.pass);
  }
  // Rayleigh quotient of a = x₁ is exactly one.
  const FieldSpace s(2, 6, 1);
  const auto pair = poincare_form(s);
  const auto a = field(s, {{0, {1, 0}, 1.0}});
  CHECK(quadratic_value(pair.form, a) == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      CHECK(pair.form(i, j) == doctest::Approx(i == j ? s.degree_of(i) : 0.0));
}

TEST_CASE("Korn trial and rotation fields") {
  const FieldSpace s(2, 6, 2);
  const auto pair = korn_form(s);
  const auto rotation = field(s, {{0, {0, 1}, 1.0}, {1, {1, 0}, -1.0}});
  CHECK(std::abs(quadratic_value(pair.form, rotation)) < 1e-14);
  const auto rot = rotation_constraints(s);
  REQUIRE(rot.size() == 1);
  CHECK(constraint_value(rot[0], rotation) == doctest::Approx(-2.0));

  const auto trial = field(s, {{0, {1, 0}, 1.0}, {1, {0, 1}, -1.0}});
  CHECK(quadratic_value(pair.form, trial) == doctest::Approx(8.0));
  CHECK(quadratic_value(pair.mass, trial) == doctest::Approx(2.0));
  for (const auto& c : pair.constraints) CHECK(std::abs(constraint_value(c, trial)) < 1e-15);
  const auto r = korn_constant(2, 4, 6);
  CHECK(r.lambda_fine <= 4.0 + 1e-12);

  // b = (x₁x₂, −(x₁² − 1)/2): form 4, norm 3/2, feasible.
  const auto bent = field(s, {{0, {1, 1}, 1.0}, {1, {2, 0}, -std::sqrt(2.0) / 2.0}});
  for (const auto& c : pair.constraints) CHECK(std::abs(constraint_value(c, bent)) < 1e-15);
  CHECK(quadratic_value(pair.form, bent) == doctest::Approx(4.0));
  CHECK(quadratic_value(pair.mass, bent) == doctest::Approx(1.5));
  CHECK(r.lambda_fine <= 8.0 / 3.0);
}

TEST_CASE("Korn constant is positive and stable across truncations") {
  for (int d = 2; d <= 3; ++d) {
    const auto r = korn_constant(d, 10, 14);
    CHECK(r.lambda_fine > 0.0);
    CHECK(r.drift < 0.05);
    CHECK(r.monotone);
    CHECK(r.constraint_residual <= 1e-12);
    CHECK(r.min_form_eigenvalue >= -1e-10);
    CHECK(r.pass);
    // An independent assembly at the coarse truncation reproduces the ladder entry.
    const FieldSpace coarse(d, 10, d);
    double best = 1e300;
    for (const auto& b : constrained_block_minima(coarse, korn_form(coarse))) best = std::min(best, b.lambda);
    CHECK(best == doctest::Approx(r.lambda_coarse).epsilon(1e-12));
  }
  CHECK_THROWS_AS(korn_constant(1, 4, 6), DomainError);
  CHECK_THROWS_AS(korn_gradient_constant(1, 4, 6), DomainError);
}

TEST_CASE("block eigensolve agrees with a brute-force constrained eigensolve") {
  const FieldSpace s(2, 4, 2);
  const auto pair = korn_form(s);
  // Full-size orthonormal complement of the constraints by Gram–Schmidt on the unit vectors.
  std::vector<std::vector<double>> q;
  for (const auto& c : pair.constraints) {
    auto v = c;
    for (const auto& u : q) {
      const double p = dot(std::span<const double>(u), std::span<const double>(v));
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= p * u[i];
    }
    const double n = norm2(std::span<const double>(v));
    for (auto& x : v) x /= n;
    q.push_back(v);
  }
  std::vector<std::vector<double>> z;
  for (std::size_t e = 0; e < s.size(); ++e) {
    std::vector<double> v(s.size(), 0.0);
    v[e] = 1.0;
    for (const auto& u : q) {
      const double p = dot(std::span<const double>(u), std::span<const double>(v));
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= p * u[i];
    }
    for (const auto& u : z) {
      const double p = dot(std::span<const double>(u), std::span<const double>(v));
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= p * u[i];
    }
    const double n = norm2(std::span<const double>(v));
    if (n < 1e-8) continue;
    for (auto& x : v) x /= n;
    z.push_back(v);
  }
  REQUIRE(z.size() == s.size() - pair.constraints.size());
  RealMatrix reduced(z.size(), z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const auto az = matvec(pair.form, std::span<const double>(z[i]));
    for (std::size_t j = 0; j < z.size(); ++j) reduced(j, i) = dot(std::span<const double>(z[j]), std::span<const double>(az));
  }
  const double brute = jacobi_eigen(reduced).values.front();
  CHECK(brute == doctest::Approx(korn_constant(2, 4, 4).lambda_fine).epsilon(1e-10));
}

TEST_CASE("Korn gradient constant") {
  const FieldSpace s(2, 6, 2);
  const auto pair = korn_gradient_form(s);
  const auto identity_field = field(s, {{0, {1, 0}, 1.0}, {1, {0, 1}, 1.0}});
  const double sym = quadratic_value(pair.form, identity_field);
  const double full = quadratic_value(pair.mass, identity_field);
  CHECK(sym == doctest::Approx(8.0));
  CHECK(full == doctest::Approx(2.0));
  const auto r = korn_gradient_constant(2, 10, 14);
  CHECK(r.lambda_fine > 0.0);
  CHECK(r.lambda_fine <= 2.0);
  CHECK(sym / full >= r.lambda_fine);
  CHECK(r.drift < 0.05);
  CHECK(r.monotone);
  CHECK(r.pass);
  // The witness attains λ̂ as a generalized Rayleigh quotient.
  const FieldSpace fine(2, 14, 2);
  const auto fp = korn_gradient_form(fine);
  CHECK(quadratic_value(fp.form, r.witness) / quadratic_value(fp.mass, r.witness) ==
        doctest::Approx(r.lambda_fine).epsilon(1e-10));
}

TEST_CASE("rigid-motion kernel of the symmetrized gradient") {
  for (int d = 2; d <= 3; ++d) {
    const auto k = kernel_witness_suite(d, 6);
    CHECK(k.expected_dim == d + d * (d - 1) / 2);
    for (int v : k.nullspace_dim) CHECK(v == k.expected_dim);
    CHECK(k.max_witness_degree <= 1);
    CHECK(k.max_witness_rayleigh < 1e-10);
    CHECK(k.witnesses.size() == static_cast<std::size_t>(k.expected_dim));
    CHECK(k.pass);
  }
  // Brute force on the whole unconstrained matrix at small N.
  const FieldSpace s(2, 3, 2);
  const auto e = jacobi_eigen(korn_form(s).form);
  int zeros = 0;
  for (double v : e.values) zeros += v < 1e-10 ? 1 : 0;
  CHECK(zeros == 3);
  CHECK(e.values.front() >= -1e-10);
}

TEST_CASE("constraint deflation leaves feasible witnesses") {
  const FieldSpace s(3, 5, 3);
  const auto pair = korn_form(s);
  for (const auto& b : constrained_block_minima(s, pair)) CHECK(b.constraint_residual <= 1e-12);
}

TEST_CASE("change of variables and split identities") {
  CHECK(substitution_identity_gap(2, 8, 11, 20) <= 1e-10);
  CHECK(substitution_identity_gap(3, 5, 12, 5) <= 1e-10);
  CHECK(korn_split_identity_gap(2, 8, 13, 20) <= 1e-10);
  CHECK(korn_split_identity_gap(3, 6, 14, 20) <= 1e-10);
}
