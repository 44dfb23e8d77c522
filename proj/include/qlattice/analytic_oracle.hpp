#pragma once

// Closed-form predictions: particle and site probability laws, their moments,
// ensemble densities, action and phase, interference densities, ring
// quantization, return times and the matter-wave frequency.
//
// Functions that are rational in their arguments are templated on Scalar so
// they can be evaluated exactly and compared with exhaustive enumeration.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "qlattice/errors.hpp"
#include "qlattice/exact.hpp"
#include "qlattice/free_dynamics.hpp"
#include "qlattice/lattice_units.hpp"

namespace qlattice {

/// A lattice event (xi, tau) with |xi| <= tau and tau >= 1.
struct SitePoint {
  long xi;
  long tau;

  static SitePoint make(long xi, long tau) {
    if (tau < 1) throw DomainError("SitePoint: tau must be >= 1");
    if (std::labs(xi) > tau) throw DomainError("SitePoint: |xi| must be <= tau");
    return {xi, tau};
  }
};

/// Emission sites and their probabilities.
struct SourceSet {
  std::vector<long> positions;
  std::vector<double> probs;

  static SourceSet make(std::vector<long> positions, std::vector<double> probs);
  static SourceSet single(long position = 0) { return make({position}, {1.0}); }
  /// Two sources at -delta/2 and +delta/2; p_plus is the probability of the
  /// source at +delta/2. delta must be even.
  static SourceSet two_slit(long delta, double p_plus);

  std::size_t size() const { return positions.size(); }
  long max_abs_position() const;
};

// ---------------------------------------------------------------------------
// Particle position law

template <class Scalar>
Scalar rho_pmf(long xi, long tau, const Scalar& p) {
  if (tau <= 0) throw DomainError("rho_pmf: tau must be > 0");
  if (abs_value(p) > Scalar(1)) throw DomainError("rho_pmf: |p| must be <= 1");
  if (std::labs(xi) > tau) return Scalar(0);
  const Scalar one(1);
  const Scalar up = (one + p) / Scalar(2);
  const Scalar down = (one - p) / Scalar(2);
  if constexpr (!is_exact_v<Scalar>) {
    if (tau > 500) {
      using std::exp;
      using std::lgamma;
      using std::log;
      Scalar log_mass = lgamma(Scalar(2 * tau + 1)) - lgamma(Scalar(tau + xi + 1)) -
                        lgamma(Scalar(tau - xi + 1));
      if (tau + xi > 0) log_mass += Scalar(tau + xi) * log(up);
      if (tau - xi > 0) log_mass += Scalar(tau - xi) * log(down);
      return exp(log_mass);
    }
  }
  return binomial<Scalar>(2 * tau, tau + xi) * ipow(up, tau + xi) * ipow(down, tau - xi);
}

/// Large-tau Gaussian limit: mean p*tau, variance b*tau.
inline double rho_gaussian_limit(double xi, double tau, double p) {
  if (!(tau > 0)) throw DomainError("rho_gaussian_limit: tau must be > 0");
  const double b = (1.0 - p * p) / 2.0;
  if (!(b > 0)) throw DomainError("rho_gaussian_limit: degenerate light-like propensity (b = 0)");
  const double d = xi - p * tau;
  return std::exp(-d * d / (2.0 * b * tau)) / std::sqrt(2.0 * std::numbers::pi * b * tau);
}

// ---------------------------------------------------------------------------
// Cumulated energy

/// Particle-side law: Binomial(tau, e).
template <class Scalar>
Scalar energy_pmf_particle(long sigma, long tau, const Scalar& p) {
  if (tau <= 0) throw DomainError("energy_pmf_particle: tau must be > 0");
  if (sigma < 0 || sigma > tau) return Scalar(0);
  const auto prop = propensity_from_p(p);
  return binomial<Scalar>(tau, sigma) * ipow(prop.e, sigma) * ipow(prop.b, tau - sigma);
}

namespace detail {

template <class Scalar>
Scalar bigint_ratio(const BigInt& num, const BigInt& den) {
  if constexpr (is_exact_v<Scalar>) {
    return Scalar(num) / Scalar(den);
  } else {
    return Rational(Rational(num) / Rational(den)).template convert_to<Scalar>();
  }
}

}  // namespace detail

/// Law of the cumulated energy of walkers seen at the site (xi, tau). It does
/// not depend on p. Support: |xi|, |xi|+2, ..., <= tau.
template <class Scalar = double>
Scalar energy_pmf_site(long sigma, SitePoint point) {
  const long x = std::labs(point.xi);
  const long tau = point.tau;
  if (sigma < x || sigma > tau || (sigma - x) % 2 != 0) return Scalar(0);
  const long k = (sigma + x) / 2;
  if constexpr (!is_exact_v<Scalar>) {
    if (tau > 500) {
      using std::exp;
      using std::lgamma;
      using std::log;
      auto lc = [](long n, long r) {
        return lgamma(Scalar(n + 1)) - lgamma(Scalar(r + 1)) - lgamma(Scalar(n - r + 1));
      };
      return exp(Scalar(tau - sigma) * log(Scalar(2)) + lc(tau, k) + lc(tau - k, tau - sigma) -
                 lc(2 * tau, tau + x));
    }
  }
  const BigInt num =
      (BigInt(1) << (tau - sigma)) * binomial_exact(tau, k) * binomial_exact(tau - k, tau - sigma);
  return detail::bigint_ratio<Scalar>(num, binomial_exact(2 * tau, tau + x));
}

template <class Scalar>
struct Moments {
  Scalar mean;
  Scalar variance;
};

template <class Scalar = double>
Scalar energy_site_mean(SitePoint point) {
  if (point.tau < 1) throw DomainError("energy_site_mean: tau must be >= 1");
  const Scalar xi(point.xi), tau(point.tau);
  return (xi * xi + tau * tau - tau) / (Scalar(2) * tau - Scalar(1));
}

template <class Scalar = double>
Scalar energy_site_variance(SitePoint point) {
  if (point.tau < 2) throw DomainError("energy_site_variance: tau must be >= 2");
  const Scalar xi(point.xi), tau(point.tau);
  const Scalar two_tau_m1 = Scalar(2) * tau - Scalar(1);
  return Scalar(2) * (xi * xi - tau * tau) * (xi * xi - (tau - 1) * (tau - 1)) /
         (two_tau_m1 * two_tau_m1 * (Scalar(2) * tau - Scalar(3)));
}

template <class Scalar = double>
Moments<Scalar> energy_site_moments(SitePoint point) {
  return {energy_site_mean<Scalar>(point), energy_site_variance<Scalar>(point)};
}

/// Gaussian continuum counterpart of energy_pmf_site.
double energy_site_gaussian_limit(double sigma, SitePoint point);

// ---------------------------------------------------------------------------
// Ensembles with uniformly distributed momentum propensity

template <class Scalar = double>
Scalar ensemble_density_free(SitePoint point) {
  if (std::labs(point.xi) > point.tau) return Scalar(0);
  return Scalar(1) / Scalar(2 * point.tau + 1);
}

/// (integral over [-1,1] of f(p) rho_tau(xi; p) dp) by composite Simpson.
double ensemble_density_quadrature(SitePoint point, const std::function<double(double)>& f_of_p,
                                   long panels = 100000);

template <class Scalar = double>
Scalar qm_density_single(long tau) {
  if (tau <= 0) throw DomainError("qm_density_single: tau must be > 0");
  return Scalar(1) / Scalar(2 * tau);
}

/// |Psi|^2 of a localized source in SI units: m X^2 / (h t).
double qm_density_single(double t, const LatticeScale& scale);

// ---------------------------------------------------------------------------
// Action and phase

template <class Scalar>
struct ActionValue {
  Scalar sigma_action;   // expected cumulated energy seen at the site
  Scalar phase_over_pi;  // sigma_action(xi) - sigma_action(0)

  double phase() const {
    return std::numbers::pi * static_cast<double>(phase_over_pi);
  }
};

template <class Scalar = double>
ActionValue<Scalar> action_value(SitePoint point) {
  if (point.tau < 1) throw DomainError("action_value: tau must be >= 1");
  const Scalar xi(point.xi), tau(point.tau);
  const Scalar denom = Scalar(2) * tau - Scalar(1);
  return {(xi * xi + tau * tau - tau) / denom, xi * xi / denom};
}

/// Free-particle wavefunction phase divided by pi, in lattice units.
template <class Scalar = double>
Scalar qm_phase_over_pi(SitePoint point) {
  const Scalar xi(point.xi);
  return xi * xi / Scalar(2 * point.tau);
}

// ---------------------------------------------------------------------------
// Interference

/// Steady-state density of the sample momentum q for the given sources,
/// (1 + sum_{i<j} 2 sqrt(P_i P_j) cos(pi |d_ij| q)) / 2.
double interference_momentum_pdf(double q, const SourceSet& sources);

/// Large-tau ensemble law at (xi, tau): interference_momentum_pdf(xi/tau) / tau.
double interference_density(SitePoint point, const SourceSet& sources);

/// Quantum-mechanical density of a multi-source preparation in SI units.
double qm_density_multi(double x, double t, const SourceSet& sources, const LatticeScale& scale);

/// Quantized steady-state momentum on a ring of circumference ell:
/// q = (2/ell) round(p ell / 2).
struct RingMode {
  long n;
  long ell;
  double q() const { return 2.0 * static_cast<double>(n) / static_cast<double>(ell); }
};

RingMode ring_momentum(double p, long ell);

// ---------------------------------------------------------------------------
// Return times and matter-wave frequency

/// Probability of the first return after 2n steps, 2 b^{2n} (n/3 - 4/9 + 13/9 4^{-n}).
template <class Scalar>
Scalar return_time_pmf(long n, const Propensity<Scalar>& prop) {
  if (n < 1) throw DomainError("return_time_pmf: n must be >= 1");
  const Scalar bb = prop.b * prop.b;
  return Scalar(2) * ipow(bb, n) *
         (Scalar(n) / Scalar(3) - Scalar(4) / Scalar(9) +
          Scalar(13) / Scalar(9) * ipow(Scalar(1) / Scalar(4), n));
}

template <class Scalar>
struct ReturnTimeSums {
  Scalar total;     // sum_n P(n)
  Scalar weighted;  // sum_n n P(n)
  Scalar frequency() const { return total / weighted; }
};

/// Closed forms of sum P(n) and sum n P(n) for 0 <= b < 1.
template <class Scalar>
ReturnTimeSums<Scalar> return_time_sums(const Scalar& b) {
  if (b < Scalar(0) || !(b < Scalar(1))) throw DomainError("return_time_sums: need 0 <= b < 1");
  const Scalar one(1);
  const Scalar big = b * b;
  const Scalar quarter = big / Scalar(4);
  const Scalar g = one - big;
  const Scalar h = one - quarter;
  const Scalar total = Scalar(2) * (big / (Scalar(3) * g * g) - Scalar(4) * big / (Scalar(9) * g) +
                                    Scalar(13) * quarter / (Scalar(9) * h));
  const Scalar weighted =
      Scalar(2) * (big * (one + big) / (Scalar(3) * g * g * g) -
                   Scalar(4) * big / (Scalar(9) * g * g) + Scalar(13) * quarter / (Scalar(9) * h * h));
  return {total, weighted};
}

/// Direct truncated summation of the same series.
template <class Scalar>
ReturnTimeSums<Scalar> return_time_series(const Scalar& b, long n_terms) {
  Propensity<Scalar> prop{};
  prop.b = b;
  Scalar total(0), weighted(0);
  for (long n = 1; n <= n_terms; ++n) {
    const Scalar pn = return_time_pmf(n, prop);
    total += pn;
    weighted += Scalar(n) * pn;
  }
  return {total, weighted};
}

namespace detail {

constexpr double frequency_den_quartic(double e) {
  return (((5.0 * e - 20.0) * e + 29.0) * e - 18.0) * e + 6.0;
}
constexpr double frequency_den_quadratic(double e) { return (e - 2.0) * e - 1.0; }

// Grid sign check with a Lipschitz margin: |quartic'| <= 156 and
// |quadratic'| <= 4 on [0,1], so a grid minimum above L*h/2 proves no root.
constexpr bool frequency_denominator_has_no_root_in_unit_interval() {
  constexpr int n = 1000;
  constexpr double h = 1.0 / n;
  for (int i = 0; i <= n; ++i) {
    const double e = i * h;
    if (!(frequency_den_quartic(e) > 156.0 * h / 2.0)) return false;
    if (!(frequency_den_quadratic(e) < -4.0 * h / 2.0)) return false;
  }
  return true;
}

static_assert(frequency_denominator_has_no_root_in_unit_interval(),
              "matter-wave frequency denominator must not vanish on [0,1]");

}  // namespace detail

/// Reciprocal mean return time as a function of the energy propensity e.
template <class Scalar>
Scalar matter_wave_frequency(const Scalar& e) {
  if (e < Scalar(0) || e > Scalar(1)) throw DomainError("matter_wave_frequency: e must be in [0,1]");
  const Scalar one(1);
  const Scalar num = e * (Scalar(2) - e) * (-one - e) * (Scalar(3) - e) *
                     ((((e - Scalar(4)) * e + Scalar(5)) * e - Scalar(2)) * e + one);
  const Scalar den = ((e - Scalar(2)) * e - one) *
                     ((((Scalar(5) * e - Scalar(20)) * e + Scalar(29)) * e - Scalar(18)) * e +
                      Scalar(6));
  return num / den;
}

// ---------------------------------------------------------------------------
// Continuum-limit residuals

struct ContinuityResiduals {
  double continuity;  // max |dP/dtau + d(P dS/dxi)/dxi|
  double hjb;         // max |dS/dtau + (dS/dxi)^2 / 2|
};

/// Central-difference residuals of the continuity and Hamilton-Jacobi
/// relations for P = f(xi/tau)/tau and the phase part S = xi^2 / (2 tau) of
/// the continuum action, evaluated on |xi| <= 0.9 tau. h is the difference
/// step in lattice units.
ContinuityResiduals continuity_residuals(const std::function<double(double)>& f_of_p, long tau,
                                         double h = 1.0, int grid_points = 181);

}  // namespace qlattice
