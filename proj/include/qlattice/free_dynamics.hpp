#pragma once

// Single-particle stochastic process: propensity algebra, one-step sampling,
// trajectory accumulators and the exact evolution of the position law.

#include <Eigen/Dense>

#include <cstdint>
#include <string>

#include "qlattice/errors.hpp"
#include "qlattice/exact.hpp"
#include "qlattice/rng.hpp"

namespace qlattice {

/// Transition law of the walk. p = a - c (momentum propensity),
/// e = a + c (energy propensity), a + b + c = 1.
template <class Scalar>
struct Propensity {
  Scalar p;
  Scalar e;
  Scalar a;
  Scalar b;
  Scalar c;
};

template <class Scalar>
Propensity<Scalar> propensity_from_p(const Scalar& p) {
  if (abs_value(p) > Scalar(1)) throw DomainError("propensity_from_p: |p| must be <= 1");
  const Scalar one(1);
  const Scalar half = one / Scalar(2);
  const Scalar up = (one + p) * half;
  const Scalar down = (one - p) * half;
  return {p, (one + p * p) * half, up * up, (one - p * p) * half, down * down};
}

/// Local velocity realization.
enum class Step : int { Backward = -1, Rest = 0, Forward = 1 };

constexpr int velocity(Step s) { return static_cast<int>(s); }

/// Partitions [0,1) as [0,a) -> +1, [a,a+b) -> 0, [a+b,1) -> -1.
inline Step step_from_uniform(const Propensity<double>& prop, double u) {
  if (u < prop.a) return Step::Forward;
  if (u < prop.a + prop.b) return Step::Rest;
  return Step::Backward;
}

/// Consumes exactly one uniform draw.
inline Step sample_step(const Propensity<double>& prop, ParticleStream& rng) {
  return step_from_uniform(prop, rng.uniform());
}

/// Accumulators since preparation: position (sum of velocities), cumulated
/// energy (sum of squared velocities) and elapsed steps.
struct WalkRecord {
  long xi = 0;
  long sigma = 0;
  long tau = 0;

  void advance(Step s) {
    const int v = velocity(s);
    xi += v;
    sigma += v * v;
    ++tau;
  }
};

WalkRecord walk(const Propensity<double>& prop, long n_steps, ParticleStream& rng);

/// Probability law over the window [first_site, first_site + size).
template <class Scalar>
struct Density {
  long first_site = 0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mass;

  long last_site() const { return first_site + static_cast<long>(mass.size()) - 1; }
  Scalar at(long xi) const {
    const long i = xi - first_site;
    return (i < 0 || i >= mass.size()) ? Scalar(0) : mass(i);
  }

  static Density delta(long xi = 0) {
    Density d;
    d.first_site = xi;
    d.mass = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Ones(1);
    return d;
  }
};

/// One application of rho'(xi) = a rho(xi-1) + b rho(xi) + c rho(xi+1).
/// The window grows by one site on each side.
template <class Scalar>
Density<Scalar> evolve_density(const Density<Scalar>& rho, const Propensity<Scalar>& prop) {
  const Eigen::Index n = rho.mass.size();
  if (n == 0) throw DomainError("evolve_density: empty density");
  if ((rho.mass.array() < Scalar(0)).any()) {
    throw DomainError("evolve_density: negative probability");
  }
  if constexpr (is_exact_v<Scalar>) {
    if (rho.mass.sum() != Scalar(1)) throw DomainError("evolve_density: mass must sum to 1");
  } else {
    if (abs_value(rho.mass.sum() - Scalar(1)) > Scalar(1e-12)) {
      throw DomainError("evolve_density: mass must sum to 1 within 1e-12");
    }
  }
  Density<Scalar> out;
  out.first_site = rho.first_site - 1;
  out.mass = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n + 2);
  out.mass.segment(2, n) += prop.a * rho.mass;
  out.mass.segment(1, n) += prop.b * rho.mass;
  out.mass.segment(0, n) += prop.c * rho.mass;
  return out;
}

/// tau applications starting from a delta at the origin.
template <class Scalar>
Density<Scalar> evolve_from_origin(const Propensity<Scalar>& prop, long tau) {
  auto rho = Density<Scalar>::delta(0);
  for (long t = 0; t < tau; ++t) rho = evolve_density(rho, prop);
  return rho;
}

}  // namespace qlattice
