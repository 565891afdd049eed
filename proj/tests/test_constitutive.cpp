#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mixfem/analysis.hpp"
#include "mixfem/constitutive.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace mixfem;

namespace {

PowerSpec<double> spec1() { return PowerSpec<double>(0.5, {1.0}); }

GeneralizedPolynomial<double> law(double am1, double a0, double a1) {
  return GeneralizedPolynomial<double>(spec1(), Eigen::Vector3d(am1, a0, a1));
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

TEST_CASE("powers and exponents") {
  const auto p = spec1();
  CHECK(p.N() == 1);
  CHECK(p.s() == doctest::Approx(3.0));
  CHECK(p.s_conjugate() == doctest::Approx(1.5));
  CHECK(p.coefficient_count() == 3);
  CHECK(p.power(0) == -0.5);
  CHECK(p.power(1) == 0.0);
  CHECK(p.power(2) == 1.0);
  // s* (1 - alpha) = 3/4
  CHECK(p.s_conjugate() * (1 - p.alpha()) == doctest::Approx(0.75));

  const PowerSpec<double> q(0.3, {0.5, 1.5, 2.0});
  CHECK(q.s() == doctest::Approx(4.0));
  CHECK(q.s_conjugate() == doctest::Approx(4.0 / 3.0));

  CHECK_THROWS_AS(PowerSpec<double>(0.0, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(PowerSpec<double>(1.0, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(PowerSpec<double>(0.5, {}), std::invalid_argument);
  CHECK_THROWS_AS(PowerSpec<double>(0.5, {1.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(PowerSpec<double>(0.5, {-1.0}), std::invalid_argument);
}

TEST_CASE("coefficient vectors") {
  const auto a = CoefficientVector<double>::from_values({0.95, 1.0, 0.95});
  CHECK(a.lower == doctest::Approx(0.95));
  CHECK(a.upper == doctest::Approx(1.0));
  CHECK(a.admissible());
  CHECK(a.at(0.7) == a.values);

  const auto darcy = CoefficientVector<double>::from_values({0.0, 1.0, 0.0});
  CHECK_FALSE(darcy.admissible());
  CHECK_THROWS_AS(CoefficientVector<double>::from_values({1.0, -0.1, 1.0}), std::invalid_argument);
}

TEST_CASE("evaluation of F and F'") {
  const auto F = law(1, 1, 1);
  CHECK(eval_F(F, 1.0) == doctest::Approx(3.0));
  CHECK(eval_F(F, 4.0) == doctest::Approx(5.5));
  CHECK(eval_F_prime(F, 1.0) == doctest::Approx(0.5));
  CHECK(eval_F_prime(F, 4.0) == doctest::Approx(1.0 - 0.5 / 8.0));

  // Clamped at eps_reg: finite and equal to F(eps_reg).
  CHECK(std::isfinite(eval_F(F, 0.0)));
  CHECK(eval_F(F, 0.0) == eval_F(F, 1e-10));
  CHECK(eval_F(F, 1e-12) == doctest::Approx(1e5 + 1.0 + 1e-10));

  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    const double z = std::exp(-6.0 + 12.0 * unit(rng));
    const double step = 1e-6 * z;
    const double fd = (F.exact(z + step) - F.exact(z - step)) / (2 * step);
    CHECK(F.exact_derivative(z) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("flux and flux Jacobian") {
  const auto F = law(1, 1, 1);
  const Eigen::Vector2d m(1.0, 0.0);
  const Eigen::Vector2d g = flux(F, m);
  CHECK(g.x() == doctest::Approx(3.0));
  CHECK(g.y() == doctest::Approx(0.0));
  const Eigen::Matrix2d J = flux_jacobian(F, m);
  CHECK(J(0, 0) == doctest::Approx(3.5));
  CHECK(J(1, 1) == doctest::Approx(3.0));
  CHECK(J(0, 1) == doctest::Approx(0.0));
  CHECK(J(1, 0) == doctest::Approx(0.0));

  std::mt19937_64 rng(12);
  for (int k = 0; k < 200; ++k) {
    const Eigen::Vector2d y(4 * unit(rng) - 2, 4 * unit(rng) - 2);
    const Eigen::Matrix2d Jy = flux_jacobian(F, y);
    Eigen::Matrix2d fd;
    for (int c = 0; c < 2; ++c) {
      Eigen::Vector2d e = Eigen::Vector2d::Zero();
      e(c) = 1e-6;
      fd.col(c) = (flux(F, (y + e).eval()) - flux(F, (y - e).eval())) / 2e-6;
    }
    CHECK((Jy - fd).norm() <= 1e-6 * Jy.norm());
    CHECK((Jy - Jy.transpose()).norm() <= 1e-14 * Jy.norm());
    // Smallest eigenvalue is at least (1 - alpha) F(|y|).
    const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(Jy).eigenvalues().minCoeff();
    CHECK(lmin >= (1 - 0.5) * F(y.norm()) * (1 - 1e-12));
  }
}

TEST_CASE("lemma constants") {
  const auto c = LemmaConstants<double>::compute(spec1(), 1.0, 1.0);
  CHECK(c.C1 == doctest::Approx(8.0));
  CHECK(c.C2 == doctest::Approx(3.0));
  CHECK(c.C3 == doctest::Approx(0.0625));
  const auto c95 = LemmaConstants<double>::compute(spec1(), 0.95, 1.0);
  CHECK(c95.C3 == doctest::Approx(0.95 * 0.0625));
  CHECK_THROWS_AS(LemmaConstants<double>::compute(spec1(), 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("witnesses on hand-computed inputs") {
  const auto spec = spec1();
  const auto c = LemmaConstants<double>::compute(spec, 1.0, 1.0);
  WitnessInput<double> in;
  in.a = Eigen::Vector3d(1, 1, 1);
  in.a_prime = in.a;

  SUBCASE("monotone0") {
    in.y = Eigen::Vector2d(2, 0);
    in.y_prime = Eigen::Vector2d(1, 0);
    const auto w = lemma_witness(Inequality::Monotone0, spec, c, in);
    // (F(2) 2 - F(1) 1) * 1 = 2 (2^{-1/2} + 3) - 3
    CHECK(w.lhs == doctest::Approx(3.0 + std::sqrt(2.0)));
    CHECK(w.rhs == doctest::Approx(0.0625));
    CHECK(w.relation == Relation::GreaterEqual);
    CHECK(w.violation() < 0);
    const auto q = lemma_witness(Inequality::Quasimonotone, spec, c, in);
    CHECK(q.lhs == doctest::Approx(w.lhs));
    CHECK(q.rhs == doctest::Approx(w.rhs));
  }
  SUBCASE("dervF at w = 1") {
    in.w = 1.0;
    const auto lo = lemma_witness(Inequality::DervFLower, spec, c, in);
    CHECK(lo.lhs == doctest::Approx(-1.5));
    CHECK(lo.rhs == doctest::Approx(0.5));
    const auto hi = lemma_witness(Inequality::DervFUpper, spec, c, in);
    CHECK(hi.lhs == doctest::Approx(0.5));
    CHECK(hi.rhs == doctest::Approx(3.0));
  }
  SUBCASE("OrdF at w = 1") {
    in.w = 1.0;
    CHECK(lemma_witness(Inequality::OrdFLower, spec, c, in).lhs == doctest::Approx(3.0));
    CHECK(lemma_witness(Inequality::OrdFUpper, spec, c, in).rhs == doctest::Approx(9.0));
    // N a^* (w^-alpha + w^alpha_N) = 2 < F(1) = 3
    CHECK(lemma_witness(Inequality::OrdFUpperNarrow, spec, c, in).violation() > 0);
  }
  SUBCASE("cont1 and cont2") {
    in.y = Eigen::Vector2d(1, 0);
    in.y_prime = Eigen::Vector2d(0, 0);
    in.p = -0.5;
    const auto w1 = lemma_witness(Inequality::Cont1, spec, c, in);
    CHECK(w1.lhs == doctest::Approx(1.0));
    CHECK(w1.rhs == doctest::Approx(2.0));
    in.p = 1.0;
    in.y_prime = Eigen::Vector2d(-1, 0);
    const auto w2 = lemma_witness(Inequality::Cont2, spec, c, in);
    CHECK(w2.lhs == doctest::Approx(2.0));
    CHECK(w2.rhs == doctest::Approx(2.0 * 2.0 * 2.0));
    in.p = 0.5;
    CHECK_THROWS_AS(lemma_witness(Inequality::Cont1, spec, c, in), std::invalid_argument);
  }
  SUBCASE("Umono reduces to Lipchitz for equal coefficients") {
    in.y = Eigen::Vector2d(0.3, -1.2);
    in.y_prime = Eigen::Vector2d(0.5, 0.1);
    const auto u = lemma_witness(Inequality::Umono, spec, c, in);
    const auto l = lemma_witness(Inequality::Lipschitz, spec, c, in);
    CHECK(u.lhs == doctest::Approx(l.lhs));
    CHECK(u.rhs == doctest::Approx(l.rhs));
  }
  SUBCASE("singular inputs") {
    in.w = 0.0;
    CHECK_THROWS_AS(lemma_witness(Inequality::DervFLower, spec, c, in), std::domain_error);
    in.y.setZero();
    in.y_prime.setZero();
    CHECK_THROWS_AS(lemma_witness(Inequality::Monotone0, spec, c, in), std::domain_error);
  }
}

TEST_CASE("inequality suite passes and is falsifiable") {
  InequalitySuiteConfig cfg;
  cfg.trials = 2000;
  const auto rep = inequality_suite(spec1(), cfg);
  CHECK(rep.stats.size() == std::size(kAllInequalities));
  for (const auto& s : rep.stats) {
    INFO(name(s.kind));
    CHECK(s.trials == 2000);
    CHECK(s.violations == 0);
  }
  CHECK(rep.all_pass());
  CHECK(rep.format() == inequality_suite(spec1(), cfg).format());

  cfg.c3_scale = 1e3;
  cfg.kinds = {Inequality::Monotone0};
  const auto bad = inequality_suite(spec1(), cfg);
  CHECK(bad.stats.front().violations > 0);
  CHECK_FALSE(bad.all_pass());

  cfg.c3_scale = 1.0;
  cfg.kinds = {Inequality::OrdFUpperNarrow};
  CHECK(inequality_suite(spec1(), cfg).stats.front().violations > 0);
}

TEST_CASE("inequality suite on other exponent sets") {
  InequalitySuiteConfig cfg;
  cfg.trials = 1000;
  for (const auto& spec : {PowerSpec<double>(0.3, {0.5, 1.5}), PowerSpec<double>(0.8, {0.2}),
                           PowerSpec<double>(0.1, {2.0})}) {
    for (std::uint64_t seed : {1ull, 99ull}) {
      cfg.seed = seed;
      const auto rep = inequality_suite(spec, cfg);
      INFO(rep.format());
      CHECK(rep.all_pass());
    }
  }
}
