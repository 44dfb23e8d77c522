#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "qlattice/analytic_oracle.hpp"
#include "qlattice/free_dynamics.hpp"

using namespace qlattice;

TEST_CASE("propensity examples") {
  const auto rest = propensity_from_p(Rational(0));
  CHECK(rest.a == Rational(1, 4));
  CHECK(rest.b == Rational(1, 2));
  CHECK(rest.c == Rational(1, 4));
  CHECK(rest.e == Rational(1, 2));

  const auto light = propensity_from_p(Rational(1));
  CHECK(light.a == 1);
  CHECK(light.b == 0);
  CHECK(light.c == 0);

  const auto half = propensity_from_p(Rational(1, 2));
  CHECK(half.a == Rational(9, 16));
  CHECK(half.b == Rational(3, 8));
  CHECK(half.c == Rational(1, 16));
  CHECK(half.b * half.b == 4 * half.a * half.c);

  CHECK_THROWS_AS(propensity_from_p(1.01), DomainError);
  CHECK_THROWS_AS(propensity_from_p(Rational(-3, 2)), DomainError);
}

TEST_CASE("propensity invariants over random p") {
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<int> num(-1000, 1000);
  for (int i = 0; i < 1000; ++i) {
    const Rational p(num(gen), 1000);
    const auto prop = propensity_from_p(p);
    CHECK(prop.a + prop.b + prop.c == 1);
    CHECK(prop.a - prop.c == p);
    CHECK(prop.a + prop.c == prop.e);
    CHECK(prop.b * prop.b == 4 * prop.a * prop.c);
    CHECK(prop.a >= 0);
    CHECK(prop.b >= 0);
    CHECK(prop.c >= 0);
  }
}

TEST_CASE("step_from_uniform partitions the unit interval") {
  const auto prop = propensity_from_p(0.5);
  CHECK(step_from_uniform(prop, 0.0) == Step::Forward);
  CHECK(step_from_uniform(prop, 0.5624) == Step::Forward);
  CHECK(step_from_uniform(prop, 0.5626) == Step::Rest);
  CHECK(step_from_uniform(prop, 0.9374) == Step::Rest);
  CHECK(step_from_uniform(prop, 0.9376) == Step::Backward);
}

TEST_CASE("light-like walkers never deviate") {
  ParticleStream rng(5, 0);
  const auto fwd = propensity_from_p(1.0);
  const auto bwd = propensity_from_p(-1.0);
  for (int i = 0; i < 10000; ++i) {
    CHECK(sample_step(fwd, rng) == Step::Forward);
    CHECK(sample_step(bwd, rng) == Step::Backward);
  }
}

TEST_CASE("step frequencies at p = 0 within 4 sigma") {
  ParticleStream rng(17, 3);
  const auto prop = propensity_from_p(0.0);
  const long n = 1000000;
  std::array<long, 3> hits{};
  for (long i = 0; i < n; ++i) ++hits[static_cast<std::size_t>(velocity(sample_step(prop, rng)) + 1)];
  const std::array<double, 3> expect{0.25, 0.5, 0.25};
  for (std::size_t k = 0; k < 3; ++k) {
    const double sd = std::sqrt(n * expect[k] * (1 - expect[k]));
    CHECK(std::abs(static_cast<double>(hits[k]) - n * expect[k]) <= 4 * sd);
  }
}

TEST_CASE("walk examples") {
  ParticleStream rng(1, 1);
  const auto light = walk(propensity_from_p(1.0), 300, rng);
  CHECK(light.xi == 300);
  CHECK(light.sigma == 300);
  CHECK(light.tau == 300);
  CHECK_THROWS_AS(walk(propensity_from_p(0.0), 0, rng), DomainError);

  const auto two = evolve_from_origin(propensity_from_p(Rational(0)), 2);
  const auto prop = propensity_from_p(Rational(0));
  CHECK(two.at(0) == 2 * prop.a * prop.c + prop.b * prop.b);
  CHECK(two.at(0) == Rational(3, 8));
}

TEST_CASE("walk records are consistent") {
  for (std::uint64_t i = 0; i < 500; ++i) {
    ParticleStream rng(42, i);
    const double p = rng.uniform(-1.0, 1.0);
    const auto r = walk(propensity_from_p(p), 1 + static_cast<long>(i % 40), rng);
    CHECK(std::labs(r.xi) <= r.sigma);
    CHECK(r.sigma <= r.tau);
    CHECK((r.sigma - r.xi) % 2 == 0);
  }
}

TEST_CASE("p = 0.5 walk moments within 4 sigma") {
  const long n = 50000, tau = 300;
  const auto prop = propensity_from_p(0.5);
  double sum = 0, sum2 = 0;
  for (long i = 0; i < n; ++i) {
    ParticleStream rng(2024, static_cast<std::uint64_t>(i));
    const double x = static_cast<double>(walk(prop, tau, rng).xi);
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  const double b_tau = prop.b * tau;
  CHECK(std::abs(mean / tau - 0.5) <= 4 * std::sqrt(b_tau / n) / tau);
  // var of the sample variance of a near-Gaussian: 2 sigma^4 / n
  CHECK(std::abs(var - b_tau) <= 4 * std::sqrt(2.0 / n) * b_tau);
}

TEST_CASE("evolve_density examples") {
  const auto prop = propensity_from_p(Rational(0));
  const auto one = evolve_density(Density<Rational>::delta(0), prop);
  CHECK(one.first_site == -1);
  CHECK(one.at(-1) == Rational(1, 4));
  CHECK(one.at(0) == Rational(1, 2));
  CHECK(one.at(1) == Rational(1, 4));

  const Rational p(2, 7);
  const auto pr = propensity_from_p(p);
  const auto two = evolve_from_origin(pr, 2);
  CHECK(two.at(2) == pr.a * pr.a);
  CHECK(two.at(1) == 2 * pr.a * pr.b);
  CHECK(two.at(0) == 2 * pr.a * pr.c + pr.b * pr.b);
  CHECK(two.at(-1) == 2 * pr.b * pr.c);
  CHECK(two.at(-2) == pr.c * pr.c);
}

TEST_CASE("evolved density matches rho_pmf at tau = 20") {
  const auto rho = evolve_from_origin(propensity_from_p(0.3), 20);
  double worst = 0;
  for (long xi = -20; xi <= 20; ++xi) worst = std::max(worst, std::abs(rho.at(xi) - rho_pmf(xi, 20, 0.3)));
  CHECK(worst <= 1e-12);
}

TEST_CASE("p and -p give mirror-image laws exactly") {
  for (const Rational p : {Rational(1, 3), Rational(3, 4), Rational(-2, 5)}) {
    const auto fwd = evolve_from_origin(propensity_from_p(p), 9);
    const auto bwd = evolve_from_origin(propensity_from_p(Rational(-p)), 9);
    for (long xi = -9; xi <= 9; ++xi) CHECK(fwd.at(xi) == bwd.at(-xi));
  }
}

TEST_CASE("edge sites carry a^tau and c^tau") {
  const Rational p(1, 5);
  const auto pr = propensity_from_p(p);
  const auto rho = evolve_from_origin(pr, 11);
  CHECK(rho.at(11) == ipow(pr.a, 11));
  CHECK(rho.at(-11) == ipow(pr.c, 11));
  CHECK(rho.at(12) == 0);
  CHECK(rho.mass.sum() == 1);
}

TEST_CASE("evolve_density rejects invalid input") {
  const auto prop = propensity_from_p(0.2);
  Density<double> neg;
  neg.first_site = 0;
  neg.mass = Eigen::VectorXd::Zero(2);
  neg.mass << 1.5, -0.5;
  CHECK_THROWS_AS(evolve_density(neg, prop), DomainError);
  Density<double> light;
  light.first_site = 0;
  light.mass = Eigen::VectorXd::Constant(2, 0.3);
  CHECK_THROWS_AS(evolve_density(light, prop), DomainError);
}
