#pragma once

// Conversion between physical and lattice units, the velocity/position
// uncertainty product, and the boost relations for the free-walk density.

#include <cmath>

#include "qlattice/constants.hpp"
#include "qlattice/errors.hpp"
#include "qlattice/exact.hpp"

namespace qlattice {

/// Fundamental spatial step X and time step T for a particle of given mass.
/// X / T = c and mass * X^2 / T = h / 2 (one-dimensional divisor).
struct LatticeScale {
  double mass;  // kg
  double X;     // m
  double T;     // s
};

LatticeScale lattice_scale_from_mass(double mass);

/// Uncertainty of the observed velocity and of the position after an
/// observation of N iterations. Lattice units: X = T = c = 1.
template <class Scalar>
struct Uncertainty {
  Scalar dv;
  Scalar dx;
  Scalar product;
};

template <class Scalar = double>
Uncertainty<Scalar> uncertainty_product(long n) {
  if (n < 1) throw DomainError("uncertainty_product: N must be >= 1");
  const Scalar dv = Scalar(1) / Scalar(n);
  const Scalar dx = Scalar(2 * n);
  return {dv, dx, dv * dx};
}

/// Same quantities in SI units: dv = c/N [m/s], dx = 2 N X [m], product = 2 X^2 / T.
Uncertainty<double> uncertainty_product(long n, const LatticeScale& scale);

/// Velocity V/c of a reference frame moving relative to the lattice.
class Frame {
 public:
  static Frame make(double beta) {
    if (!(std::abs(beta) < 1.0)) throw DomainError("Frame: |beta| must be < 1");
    return Frame(beta);
  }
  double beta() const { return beta_; }

 private:
  explicit Frame(double beta) : beta_(beta) {}
  double beta_;
};

/// Image of a lattice event and a walker's propensities in a boosted frame.
/// Coordinates are reals; they are never rounded back onto the lattice.
template <class Scalar>
struct LorentzImage {
  Scalar xi;
  Scalar tau;
  Scalar p;
  Scalar b;
};

template <class Scalar>
Scalar boost_velocity(const Scalar& p, const Scalar& beta) {
  return (p - beta) / (Scalar(1) - beta * p);
}

template <class Scalar>
LorentzImage<Scalar> lorentz_transform(const Scalar& xi, const Scalar& tau, const Scalar& p,
                                       const Scalar& beta) {
  if (!(abs_value(beta) < Scalar(1))) throw DomainError("lorentz_transform: |beta| must be < 1");
  if (!(tau > Scalar(0))) throw DomainError("lorentz_transform: tau must be > 0");
  if (abs_value(p) > Scalar(1)) throw DomainError("lorentz_transform: |p| must be <= 1");
  const Scalar q = xi / tau;
  if (abs_value(q) > Scalar(1)) throw DomainError("lorentz_transform: |xi/tau| must be <= 1");
  const Scalar one(1);
  const Scalar denom_q = one - q * beta;
  if (denom_q == Scalar(0)) throw DomainError("lorentz_transform: 1 - q*beta vanishes");
  const Scalar dilation = (one - p * beta) * (one - p * beta) / ((one - beta * beta) * denom_q);
  const Scalar b = (one - p * p) / Scalar(2);
  return {dilation * (xi - beta * tau), dilation * (tau - beta * xi), boost_velocity(p, beta),
          b * (one - beta * beta) / ((one - p * beta) * (one - p * beta))};
}

inline LorentzImage<double> lorentz_transform(long xi, long tau, double p, Frame frame) {
  return lorentz_transform<double>(static_cast<double>(xi), static_cast<double>(tau), p,
                                   frame.beta());
}

}  // namespace qlattice
