#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <numeric>

#include "hypoflow/errors.hpp"
#include "hypoflow/mode_analysis.hpp"
#include "hypoflow/random.hpp"

using namespace hypoflow;

namespace {

std::vector<Complex> unit_c(std::size_t n, std::size_t k) {
  std::vector<Complex> v(n, 0.0);
  v[k] = 1.0;
  return v;
}

std::vector<Complex> random_state(Xoshiro256& rng, std::size_t n) {
  std::vector<Complex> v(n);
  for (auto& x : v) x = Complex(rng.normal(), rng.normal());
  return v;
}

std::vector<double> uniform_grid(double t_end, double step) {
  std::vector<double> t;
  const auto m = static_cast<std::size_t>(std::llround(t_end / step));
  for (std::size_t i = 0; i <= m; ++i) t.push_back(step * static_cast<double>(i));
  return t;
}

// ⟨ψ(ξ)M^{1/2}, u⟩ by tensor Gauss–Hermite quadrature, for a real polynomial ψ.
template <typename F>
Complex quad_moment(const BasisTruncation& b, std::span<const Complex> u, F&& psi) {
  const auto tq = tensor_rule(b.dim(), b.max_degree() + 4);
  Complex s = 0.0;
  for (std::size_t q = 0; q < tq.points.size(); ++q) {
    const auto v = basis_polynomials(b, tq.points[q]);
    Complex f = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) f += u[i] * v[i];
    s += tq.weights[q] * psi(tq.points[q]) * f;
  }
  return s;
}

}  // namespace

TEST_CASE("sigma index") {
  CHECK(sigma_index(2.0, 0, 3) == doctest::Approx(0.0));
  CHECK(sigma_index(1.0, 0, 3) == doctest::Approx(0.75));
  CHECK(sigma_index(1.0, 1, 1) == doctest::Approx(0.75));
  CHECK(sigma_index_exact(2, 1, 0, 3) == Rational{0, 1});
  CHECK(sigma_index_exact(1, 1, 0, 3) == Rational{3, 4});
  CHECK(sigma_index_exact(1, 1, 1, 1) == Rational{3, 4});
  CHECK(sigma_index_exact(3, 2, 1, 3) == Rational{3, 4});
  for (long long p = 1; p <= 12; ++p)
    for (long long r = 1; r <= 12; ++r) {
      if (p < r || p > 2 * r) continue;
      for (int m = 0; m < 3; ++m)
        for (int d = 1; d <= 3; ++d) {
          const Rational s = sigma_index_exact(p, r, m, d);
          CHECK(std::gcd(s.num, s.den) <= 1);
          CHECK(s.value() == doctest::Approx(sigma_index(double(p) / double(r), m, d)).epsilon(1e-14));
        }
    }
  CHECK_THROWS_AS(sigma_index(0.5, 0, 3), DomainError);
  CHECK_THROWS_AS(sigma_index(2.5, 0, 3), DomainError);
  CHECK_THROWS_AS(sigma_index(1.5, -1, 3), DomainError);
  CHECK_THROWS_AS(sigma_index_exact(5, 2, 0, 3), DomainError);
}

TEST_CASE("symbol structure") {
  for (auto model : {ModelKind::Relaxation, ModelKind::FokkerPlanck, ModelKind::BoltzmannSurrogate}) {
    const auto L = assemble_L(model, enumerate_basis(2, 4));
    const std::vector<double> zero{0.0, 0.0};
    const auto b0 = assemble_symbol(L, zero);
    for (std::size_t i = 0; i < b0.rows(); ++i)
      for (std::size_t j = 0; j < b0.cols(); ++j) CHECK(b0(i, j) == Complex(L.matrix(i, j)));
    const std::vector<double> k{0.7, -1.3};
    const auto b = assemble_symbol(L, k);
    auto s = b;
    s += b.adjoint();
    for (std::size_t i = 0; i < s.rows(); ++i)
      for (std::size_t j = 0; j < s.cols(); ++j) CHECK(std::abs(s(i, j) - 2.0 * L.matrix(i, j)) < 1e-14);
  }
}

TEST_CASE("Model 1, N=2, k=1: norm of phi_1 strictly decreasing against an RK4 oracle") {
  const auto L = assemble_L(ModelKind::Relaxation, enumerate_basis(1, 2));
  const std::vector<double> k{1.0};
  const auto b = assemble_symbol(L, k);
  const auto t = uniform_grid(10.0, 0.1);
  const auto traj = evolve_mode(L, b, unit_c(3, 1), t, 1e-3);
  std::vector<Complex> ref = unit_c(3, 1);
  for (std::size_t n = 1; n < t.size(); ++n) {
    for (int s = 0; s < 100; ++s) ref = rk4_step<Complex>(b, ref, 0.0, 1e-3);
    CHECK(norm2(std::span<const Complex>(traj.u[n])) < norm2(std::span<const Complex>(traj.u[n - 1])));
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(traj.u[n][i] - ref[i]) < 1e-6);
  }
}

TEST_CASE("evolve_mode examples") {
  SUBCASE("kernel mode at k=0 is constant for every model") {
    for (auto model : {ModelKind::Relaxation, ModelKind::FokkerPlanck, ModelKind::BoltzmannSurrogate}) {
      const auto L = assemble_L(model, enumerate_basis(1, 5));
      const std::vector<double> k{0.0};
      const auto traj = evolve_mode(L, assemble_symbol(L, k), unit_c(6, 0), uniform_grid(5.0, 0.5), 0.01);
      for (const auto& u : traj.u)
        for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(u[i] - (i == 0 ? 1.0 : 0.0)) < 1e-14);
    }
  }
  SUBCASE("phi_1 at k=0 under relaxation decays as exp(-t)") {
    const auto L = assemble_L(ModelKind::Relaxation, enumerate_basis(1, 4));
    const std::vector<double> k{0.0};
    const auto t = uniform_grid(2.0, 0.25);
    const auto traj = evolve_mode(L, assemble_symbol(L, k), unit_c(5, 1), t, 1e-4);
    for (std::size_t n = 0; n < t.size(); ++n)
      CHECK(std::abs(norm2(std::span<const Complex>(traj.u[n])) - std::exp(-t[n])) < 1e-8);
  }
  SUBCASE("Duhamel source against fine RK4 of the variation-of-constants problem") {
    const auto L = assemble_L(ModelKind::Relaxation, enumerate_basis(1, 6));
    const std::vector<double> k{1.0};
    const auto b = assemble_symbol(L, k);
    auto src = [](double s) {
      auto v = unit_c(7, 2);
      v[2] *= std::exp(-s);
      return v;
    };
    const auto t = uniform_grid(4.0, 0.5);
    const auto traj = evolve_mode(L, b, std::vector<Complex>(7, 0.0), t, 1e-3, src);
    std::vector<Complex> ref(7, 0.0);
    const double h = 2e-4;
    double tt = 0.0;
    for (std::size_t n = 1; n < t.size(); ++n) {
      while (tt < t[n] - 1e-12) {
        ref = rk4_step<Complex>(b, ref, tt, h, src);
        tt += h;
      }
      for (std::size_t i = 0; i < 7; ++i) CHECK(std::abs(traj.u[n][i] - ref[i]) < 1e-6);
    }
  }
  SUBCASE("source with a kernel component is rejected") {
    const auto L = assemble_L(ModelKind::BoltzmannSurrogate, enumerate_basis(1, 4));
    const std::vector<double> k{1.0};
    auto src = [](double) { return unit_c(5, 1); };
    CHECK_THROWS_WITH_AS(evolve_mode(L, assemble_symbol(L, k), std::vector<Complex>(5, 0.0), uniform_grid(1, 0.5), 0.1, src),
                         doctest::Contains("momentum_0"), DomainError);
  }
}

TEST_CASE("contraction of sourceless mode evolution") {
  Xoshiro256 rng(7);
  for (auto model : {ModelKind::Relaxation, ModelKind::FokkerPlanck, ModelKind::BoltzmannSurrogate}) {
    const auto L = assemble_L(model, enumerate_basis(2, 4));
    for (int trial = 0; trial < 4; ++trial) {
      const std::vector<double> k{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
      const auto traj = evolve_mode(L, assemble_symbol(L, k), random_state(rng, L.basis->size()), uniform_grid(5.0, 0.1), 0.02);
      for (std::size_t n = 1; n < traj.u.size(); ++n)
        CHECK(norm2(std::span<const Complex>(traj.u[n])) <= norm2(std::span<const Complex>(traj.u[n - 1])) * (1.0 + 1e-7));
      CHECK(traj.stats.max_defect <= 1e-8);
    }
  }
}

TEST_CASE("energy functional examples") {
  const auto L = assemble_L(ModelKind::Relaxation, enumerate_basis(1, 4));
  KappaSet kap;
  const std::vector<double> k1{1.0};
  kap.kappa = 0.3;
  CHECK(energy_E(L, unit_c(5, 0), k1, kap) == doctest::Approx(1.0).epsilon(1e-15));
  auto u = unit_c(5, 0);
  u[1] = 1.0;
  kap.kappa = 0.0;
  CHECK(energy_E(L, u, k1, kap) == doctest::Approx(2.0).epsilon(1e-15));
  kap.kappa = 0.1;
  CHECK(energy_E(L, u, k1, kap) == doctest::Approx(2.0).epsilon(1e-15));

  u[1] = Complex(0.0, 1.0);
  const double expected = 2.0 + 0.1 * std::real(Complex(0, 1) * 1.0 * std::conj(u[1])) / 2.0;
  CHECK(energy_E(L, u, k1, kap) == doctest::Approx(expected).epsilon(1e-15));
  kap.kappa = 10.0;
  CHECK_THROWS_AS(energy_E(L, u, k1, kap), GuardViolation);
}

TEST_CASE("energy form reproduces E for random states") {
  Xoshiro256 rng(11);
  for (auto model : {ModelKind::FokkerPlanck, ModelKind::BoltzmannSurrogate}) {
    const auto L = assemble_L(model, enumerate_basis(2, 4));
    KappaSet kap = default_mode_kappas(model);
    kap.kappa = 0.4;
    kap.kappa3 = 0.3;
    const std::vector<double> k{0.6, -0.9};
    const auto q = energy_form(L, k, kap);
    for (int trial = 0; trial < 10; ++trial) {
      const auto u = random_state(rng, L.basis->size());
      const auto qu = matvec(q, std::span<const Complex>(u));
      const Complex form = dot(std::span<const Complex>(u), std::span<const Complex>(qu));
      CHECK(std::abs(form.imag()) < 1e-12 * std::abs(form));
      CHECK(form.real() == doctest::Approx(energy_E_unchecked(L, u, k, kap)).epsilon(1e-13));
    }
  }
}

TEST_CASE("interaction functional E_int") {
  SUBCASE("trivial examples") {
    const auto b1 = enumerate_basis(1, 4);
    const std::vector<double> k1{1.0};
    CHECK(std::abs(interaction_E_int(*b1, unit_c(b1->size(), 0), k1, 1.0, 1.0)) == 0.0);
    const auto b3 = enumerate_basis(3, 3);
    const std::vector<double> e1{1.0, 0.0, 0.0};
    CHECK(std::abs(interaction_E_int(*b3, unit_c(b3->size(), b3->unit(0)), e1, 0.5, 0.5)) == 0.0);
  }
  SUBCASE("d=1 hand-assembled value for phi_0 + phi_1 + phi_3") {
    const auto b = enumerate_basis(1, 5);
    auto u = unit_c(6, 0);
    u[1] = 1.0;
    u[3] = 1.0;
    const std::vector<double> k{1.0};
    // a = 1, b = 1, c = 0, {I−P}u = φ_3 with Λ = √6 and Γ = 0: only the κ₂ term survives.
    const Complex expected = Complex(0.0, 1.0) / 2.0;
    CHECK(std::abs(interaction_E_int(*b, u, k, 1.0, 1.0) - expected) < 1e-14);
  }
  SUBCASE("random complex states in d=2 against quadrature moments") {
    Xoshiro256 rng(3);
    const auto b = enumerate_basis(2, 5);
    const std::size_t d = 2;
    for (int trial = 0; trial < 5; ++trial) {
      const auto u = random_state(rng, b->size());
      const std::vector<double> k{rng.normal(), rng.normal()};
      const double k1 = 0.3, k2 = 0.07;
      const Complex a = quad_moment(*b, u, [](auto) { return 1.0; });
      std::vector<Complex> bv(d);
      for (std::size_t i = 0; i < d; ++i) bv[i] = quad_moment(*b, u, [i](auto x) { return x[i]; });
      const Complex c = quad_moment(*b, u, [](auto x) { return x[0] * x[0] + x[1] * x[1] - 2.0; }) / (2.0 * d);
      // {I−P}u = u − (a + b·ξ + c(|ξ|²−d))M^{1/2}; its moments are the moments of u minus those of Pu.
      auto micro_moment = [&](auto psi, auto psi_macro) {
        return quad_moment(*b, u, psi) - psi_macro;
      };
      Complex tot = 0.0;
      const double k2sum = k[0] * k[0] + k[1] * k[1];
      for (std::size_t i = 0; i < d; ++i) {
        // ⟨(|ξ|²−d−2)ξ_i, Pu⟩ = 0 because the odd part of Pu is b·ξ and E[(|ξ|²−4)ξ_i²] = 0 in d=2.
        const Complex lam = micro_moment([i](auto x) { return (x[0] * x[0] + x[1] * x[1] - 4.0) * x[i]; }, Complex(0.0));
        tot += Complex(0.0, k[i]) * c * std::conj(lam);
      }
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
          // ⟨ξ_iξ_j − δ_ij, Pu⟩ = 2c δ_ij.
          const Complex gam = micro_moment([i, j](auto x) { return x[i] * x[j] - (i == j ? 1.0 : 0.0); },
                                           i == j ? 2.0 * c : Complex(0.0));
          tot += k1 * (Complex(0.0, k[i]) * bv[j] + Complex(0.0, k[j]) * bv[i]) * std::conj(gam + (i == j ? 2.0 * c : 0.0));
        }
      for (std::size_t i = 0; i < d; ++i) tot += k2 * Complex(0.0, k[i]) * a * std::conj(bv[i]);
      tot /= 1.0 + k2sum;
      CHECK(std::abs(interaction_E_int(*b, u, k, k1, k2) - tot) < 1e-11 * std::max(1.0, std::abs(tot)));
    }
  }
}

TEST_CASE("mode inequality certificates") {
  SUBCASE("k=0 kernel mode certifies rate 0") {
    const auto L = assemble_L(ModelKind::Relaxation, enumerate_basis(1, 4));
    const std::vector<double> k{0.0};
    const auto traj = evolve_mode(L, assemble_symbol(L, k), unit_c(5, 0), uniform_grid(5.0, 0.1), 0.01);
    const auto rep = verify_mode_inequality(L, k, traj, KappaSet{});
    CHECK(rep.kernel_mode);
    CHECK(rep.rate == 0.0);
    CHECK(rep.worst_violation <= 0.0);
  }
  SUBCASE("Model 1, N=2, k=1 from phi_0: positive certificate bounded below by the closed-system eigenvalue scan") {
    const auto L = assemble_L(ModelKind::Relaxation, enumerate_basis(1, 2));
    const std::vector<double> k{1.0};
    KappaSet kap;
    kap.kappa = 0.5;
    const auto traj = evolve_mode(L, assemble_symbol(L, k), unit_c(3, 0), uniform_grid(20.0, 0.01), 0.001);
    const auto rep = verify_mode_inequality(L, k, traj, kap);
    const double mc = matrix_certificate(L, k, kap);
    CHECK(mc > 0.0);
    CHECK(rep.lambda > 0.0);
    CHECK(rep.lambda >= mc - 1e-2);
    CHECK(rep.lambda == doctest::Approx(rep.lambda_closed).epsilon(1e-10));
    CHECK(rep.worst_violation <= 1e-12);

    // Eigenvalue scan: −(dE/dt)/(ρE) over random states never drops below the matrix certificate.
    Xoshiro256 rng(5);
    const auto q = energy_form(L, k, kap);
    const auto b = assemble_symbol(L, k);
    for (int trial = 0; trial < 200; ++trial) {
      const auto u = random_state(rng, 3);
      const auto bu = matvec(b, std::span<const Complex>(u));
      const auto qu = matvec(q, std::span<const Complex>(u));
      const double de = 2.0 * std::real(dot(std::span<const Complex>(qu), std::span<const Complex>(bu)));
      const double e = std::real(dot(std::span<const Complex>(u), std::span<const Complex>(qu)));
      CHECK(-de / (0.5 * e) >= mc - 1e-10);
    }
  }
  SUBCASE("rate saturation across k for every model") {
    for (auto model : {ModelKind::Relaxation, ModelKind::FokkerPlanck, ModelKind::BoltzmannSurrogate}) {
      const auto L = assemble_L(model, enumerate_basis(1, 6));
      const std::vector<std::vector<double>> ks{{0.25}, {0.5}, {1.0}, {2.0}, {4.0}};
      const auto choice = choose_kappas(L, ks);
      REQUIRE(choice.feasible);
      double lo = 1e300, hi = 0.0;
      for (const auto& k : ks) {
        auto u0 = unit_c(7, 0);
        u0[2] = 0.5;
        const auto traj = evolve_mode(L, assemble_symbol(L, k), u0, uniform_grid(10.0, 0.01), 0.002);
        const auto rep = verify_mode_inequality(L, k, traj, choice.kappas);
        CHECK(rep.lambda > 0.0);
        CHECK(rep.lambda >= 0.9 * matrix_certificate(L, k, choice.kappas));
        lo = std::min(lo, rep.lambda);
        hi = std::max(hi, rep.lambda);
      }
      CHECK(hi / lo <= 3.0);
    }
  }
}

TEST_CASE("choose_kappas") {
  SUBCASE("Model 1 choice passes the guard on random states") {
    const auto L = assemble_L(ModelKind::Relaxation, enumerate_basis(1, 6));
    const std::vector<std::vector<double>> ks{{0.25}, {0.5}, {1.0}, {2.0}, {4.0}};
    const auto choice = choose_kappas(L, ks);
    CHECK(choice.feasible);
    Xoshiro256 rng(9);
    for (int trial = 0; trial < 100; ++trial) {
      const auto u = random_state(rng, 7);
      const std::vector<double> k{8.0 * rng.uniform() - 4.0};
      CHECK_NOTHROW(energy_E(L, u, k, choice.kappas));
    }
  }
  SUBCASE("Model 3 choice is feasible; the kappa2 < kappa1 ordering is reported") {
    const auto L = assemble_L(ModelKind::BoltzmannSurrogate, enumerate_basis(1, 6));
    const std::vector<std::vector<double>> ks{{0.25}, {0.5}, {1.0}, {2.0}, {4.0}};
    const auto choice = choose_kappas(L, ks);
    CHECK(choice.feasible);
    CHECK(choice.worst_certificate > 0.0);
    WARN_MESSAGE(choice.kappas.kappa2 < choice.kappas.kappa1, "optimal kappa2 is not below kappa1 for the d=1 surrogate");
  }
  SUBCASE("zero wavenumber sample returns defaults") {
    const auto L = assemble_L(ModelKind::BoltzmannSurrogate, enumerate_basis(1, 4));
    const auto choice = choose_kappas(L, {{0.0}});
    const auto def = default_mode_kappas(ModelKind::BoltzmannSurrogate);
    CHECK(choice.kappas.kappa1 == def.kappa1);
    CHECK(choice.kappas.kappa2 == def.kappa2);
    CHECK(choice.kappas.kappa3 == def.kappa3);
    CHECK_FALSE(choice.warning.empty());
  }
}

TEST_CASE("torus evolution") {
  const auto L = assemble_L(ModelKind::Relaxation, enumerate_basis(1, 6));
  KappaSet kap;
  kap.kappa = 0.5;
  const auto t = uniform_grid(30.0, 0.25);
  SUBCASE("cos(x) phi_0 decays exponentially and monotonically") {
    LatticeData u0;
    u0[{1}] = unit_c(7, 0);
    u0[{-1}] = unit_c(7, 0);
    for (auto& [k, v] : u0)
      for (auto& x : v) x *= 0.5;
    const auto res = torus_evolve(L, u0, t, kap, 0.01);
    CHECK(res.fit.rate > 0.0);
    CHECK(res.max_norm_increase <= 1e-12);
    CHECK(res.max_energy_increase <= 1e-8);

    // Two-mode oracle: both modes evolve independently, so the norm is √2 × the single-mode norm.
    const std::vector<double> k{1.0};
    const auto single = evolve_mode(L, assemble_symbol(L, k), u0.at({1}), t, 0.01);
    for (std::size_t n = 0; n < t.size(); ++n)
      CHECK(res.norm[n] == doctest::Approx(std::sqrt(2.0) * norm2(std::span<const Complex>(single.u[n]))).epsilon(1e-12));
  }
  SUBCASE("microscopic k=0 data decays at rate 1") {
    LatticeData u0;
    u0[{0}] = unit_c(7, 1);
    const auto res = torus_evolve(L, u0, t, kap, 0.001);
    CHECK(res.fit.rate == doctest::Approx(1.0).epsilon(1e-5));
  }
  SUBCASE("kernel mass at k=0 is rejected") {
    LatticeData u0;
    u0[{0}] = unit_c(7, 0);
    CHECK_THROWS_WITH_AS(torus_evolve(L, u0, t, kap, 0.01), doctest::Contains("mass"), DomainError);
  }
}

TEST_CASE("whole-space synthesis") {
  const auto L = assemble_L(ModelKind::Relaxation, enumerate_basis(1, 6));
  WholeSpaceSpec spec;
  spec.profile_vector = unit_c(7, 0);
  SUBCASE("t=0 norm equals the Gaussian integral") {
    const std::vector<double> t{0.0, 1.0};
    const auto curve = wholespace_curve_on_grid(L, spec, t);
    CHECK(curve[0] * curve[0] == doctest::Approx(1.0 / (2.0 * std::sqrt(std::numbers::pi))).epsilon(1e-12));
  }
  SUBCASE("algebraic slopes for alpha = 0 and alpha = 1") {
    const auto t = uniform_grid(500.0, 1.0);
    const auto r0 = wholespace_norm_curve(L, spec, t, 150.0, 500.0);
    CHECK(r0.fit.rate == doctest::Approx(-sigma_index(1.0, 0, 1)).epsilon(0.15));
    CHECK(r0.resolution_change < 0.01);
    spec.alpha = 1;
    const auto r1 = wholespace_norm_curve(L, spec, t, 150.0, 500.0);
    CHECK(r1.fit.rate == doctest::Approx(-sigma_index(1.0, 1, 1)).epsilon(0.15));
  }
  SUBCASE("unresolved k-grid is rejected") {
    const auto L3 = assemble_L(ModelKind::BoltzmannSurrogate, enumerate_basis(1, 4));
    spec.profile_vector = unit_c(5, 0);
    spec.k_step = 0.05;
    const auto t = uniform_grid(300.0, 5.0);
    CHECK_THROWS_AS(wholespace_norm_curve(L3, spec, t, 100.0, 300.0), NumericError);
  }
}

TEST_CASE("Duhamel bound") {
  const auto t = uniform_grid(12.0, 0.5);
  SUBCASE("zero source") {
    const auto L = assemble_L(ModelKind::Relaxation, enumerate_basis(1, 4));
    DuhamelSpec spec;
    spec.source_vector.assign(5, 0.0);
    const auto rep = duhamel_bound_check(L, spec, t);
    for (double v : rep.lhs) CHECK(v == 0.0);
    CHECK(rep.stable);
  }
  SUBCASE("phi_2 source under relaxation is bounded and resolution-stable") {
    const auto L = assemble_L(ModelKind::Relaxation, enumerate_basis(1, 6));
    DuhamelSpec spec;
    spec.source_vector.assign(7, 0.0);
    spec.source_vector[2] = 1.0;
    const auto rep = duhamel_bound_check(L, spec, t);
    CHECK(rep.sigma == 0.0);
    CHECK(rep.c_fit > 0.0);
    CHECK(std::isfinite(rep.c_fit));
    CHECK(rep.stable);
    for (std::size_t n = 0; n < t.size(); ++n) CHECK(rep.lhs[n] <= rep.c_fit * rep.rhs[n] * (1.0 + 1e-12));
  }
  SUBCASE("kernel source is rejected") {
    const auto L = assemble_L(ModelKind::Relaxation, enumerate_basis(1, 4));
    DuhamelSpec spec;
    spec.source_vector = {1.0, 0.0, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(duhamel_bound_check(L, spec, t), DomainError);
  }
  SUBCASE("inverse weight norm against adaptive quadrature") {
    const auto b = enumerate_basis(1, 160);
    std::vector<double> v(b->size(), 0.0);
    v[2] = 1.0;
    const double galerkin = weighted_inverse_norm(*b, WeightKind::QuadraticGrowth, v);
    // ∫(1+ξ²)^{−1}|H̃_2(ξ)|²M(ξ)dξ with H̃_2 = (ξ²−1)/√2, by a fine trapezoid sum.
    double s = 0.0;
    const double h = 1e-3;
    for (int j = -40000; j <= 40000; ++j) {
      const double x = h * j;
      const double p = (x * x - 1.0) / std::sqrt(2.0);
      s += h * p * p / (1.0 + x * x) * std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    }
    CHECK(std::abs(galerkin - std::sqrt(s)) < 1e-8);
  }
  SUBCASE("Gaussian profile L^q norms") {
    CHECK(gaussian_profile_lq_norm(0, 1.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(gaussian_profile_lq_norm(0, 2.0) ==
          doctest::Approx(std::sqrt(1.0 / (2.0 * std::sqrt(std::numbers::pi)))).epsilon(1e-10));
    // ∫|x|e^{−x²/2}dx/√(2π) = 2/√(2π).
    CHECK(gaussian_profile_lq_norm(1, 1.0) == doctest::Approx(2.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-8));
  }
}
