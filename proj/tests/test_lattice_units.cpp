#include <doctest.h>

#include <cmath>
#include <random>

#include "qlattice/constants.hpp"
#include "qlattice/exact.hpp"
#include "qlattice/lattice_units.hpp"

using namespace qlattice;

namespace {

bool rel_close(double x, double y, double tol) { return std::abs(x - y) <= tol * std::abs(y); }

}  // namespace

TEST_CASE("electron scale is half the Compton wavelength") {
  const auto s = lattice_scale_from_mass(constants::electron_mass);
  CHECK(s.X == doctest::Approx(1.2132e-12).epsilon(1e-4));
  CHECK(rel_close(2.0 * s.X, constants::electron_compton_wavelength, 1e-9));
  CHECK(rel_close(s.X / s.T, constants::speed_of_light, 1e-12));
}

TEST_CASE("doubling the mass halves X and T") {
  const auto a = lattice_scale_from_mass(constants::electron_mass);
  const auto b = lattice_scale_from_mass(2.0 * constants::electron_mass);
  CHECK(rel_close(b.X, a.X / 2.0, 1e-15));
  CHECK(rel_close(b.T, a.T / 2.0, 1e-15));
  CHECK(rel_close(b.X / b.T, a.X / a.T, 1e-15));
}

TEST_CASE("mass X^2 / T is h/2 for any mass") {
  for (double m : {1e-35, constants::electron_mass, 1.67262192e-27, 1e-20}) {
    const auto s = lattice_scale_from_mass(m);
    CHECK(rel_close(s.mass * s.X * s.X / s.T, constants::planck_h / 2.0, 1e-12));
  }
}

TEST_CASE("non-positive or non-finite mass is rejected") {
  CHECK_THROWS_AS(lattice_scale_from_mass(0.0), DomainError);
  CHECK_THROWS_AS(lattice_scale_from_mass(-1e-30), DomainError);
  CHECK_THROWS_AS(lattice_scale_from_mass(std::nan("")), DomainError);
}

TEST_CASE("uncertainty product") {
  const auto s = lattice_scale_from_mass(constants::electron_mass);
  const auto one = uncertainty_product(1, s);
  CHECK(rel_close(one.dv, constants::speed_of_light, 1e-15));
  CHECK(rel_close(one.dx, 2.0 * s.X, 1e-15));
  CHECK(rel_close(uncertainty_product(2, s).dv, constants::speed_of_light / 2.0, 1e-15));
  CHECK(rel_close(uncertainty_product(7, s).product, uncertainty_product(13, s).product, 1e-15));
  CHECK(rel_close(uncertainty_product(7, s).product, 2.0 * s.X * s.X / s.T, 1e-12));
  for (long n = 1; n <= 50; ++n) CHECK(uncertainty_product<Rational>(n).product == Rational(2));
  CHECK_THROWS_AS(uncertainty_product(0, s), DomainError);
  CHECK_THROWS_AS(uncertainty_product<double>(0), DomainError);
}

TEST_CASE("boost with beta = p brings the walker to rest") {
  for (double p : {-0.7, -0.2, 0.3, 0.9}) {
    const auto img = lorentz_transform(5, 20, p, Frame::make(p));
    CHECK(std::abs(img.p) < 1e-15);
    CHECK(img.b == doctest::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("beta = 0 is the identity") {
  const auto img = lorentz_transform(-3, 11, 0.4, Frame::make(0.0));
  CHECK(img.xi == -3.0);
  CHECK(img.tau == 11.0);
  CHECK(img.p == 0.4);
  CHECK(img.b == doctest::Approx((1 - 0.16) / 2));
}

TEST_CASE("b' tau' = b tau and the drift relation, exactly in rationals") {
  for (long tau = 1; tau <= 6; ++tau) {
    for (long xi = -tau + 1; xi <= tau; ++xi) {
      for (int ip = -3; ip <= 3; ++ip) {
        for (int ib = -4; ib <= 4; ++ib) {
          const Rational p = Rational(ip) / 4, beta = Rational(ib) / 5;
          const Rational x(xi), t(tau);
          if (Rational(1) - x / t * beta == 0) continue;
          const auto img = lorentz_transform<Rational>(x, t, p, beta);
          const Rational b = (1 - p * p) / 2;
          CHECK(img.b * img.tau == b * t);
          CHECK(img.xi - img.p * img.tau == (x - p * t) * (1 - p * beta) / (1 - x / t * beta));
        }
      }
    }
  }
}

TEST_CASE("b' tau' = b tau for 1000 random instances") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<long> tau_d(1, 100000);
  for (int i = 0; i < 1000; ++i) {
    const long tau = tau_d(gen);
    const long xi = std::uniform_int_distribution<long>(-tau, tau)(gen);
    const double p = u(gen);
    const double beta = 0.999 * u(gen);
    const auto img = lorentz_transform(xi, tau, p, Frame::make(beta));
    const double b = (1 - p * p) / 2;
    CHECK(rel_close(img.b * img.tau, b * static_cast<double>(tau), 1e-12));
  }
}

TEST_CASE("two boosts compose to one with the relativistic velocity sum") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-0.95, 0.95);
  for (int i = 0; i < 1000; ++i) {
    const double p = u(gen), b1 = u(gen), b2 = u(gen);
    const double twice = boost_velocity(boost_velocity(p, b1), b2);
    const double once = boost_velocity(p, (b1 + b2) / (1 + b1 * b2));
    CHECK(std::abs(twice - once) <= 1e-12);
  }
}

TEST_CASE("invalid frames and events are rejected") {
  CHECK_THROWS_AS(Frame::make(1.0), DomainError);
  CHECK_THROWS_AS(Frame::make(-1.2), DomainError);
  CHECK_THROWS_AS(lorentz_transform<double>(1.0, 0.0, 0.2, 0.1), DomainError);
  CHECK_THROWS_AS(lorentz_transform<double>(3.0, 2.0, 0.2, 0.1), DomainError);
  CHECK_THROWS_AS(lorentz_transform<double>(1.0, 2.0, 1.5, 0.1), DomainError);
}
