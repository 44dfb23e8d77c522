#include "qlattice/analytic_oracle.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace qlattice {

SourceSet SourceSet::make(std::vector<long> positions, std::vector<double> probs) {
  if (positions.empty()) throw DomainError("SourceSet: at least one source is required");
  if (positions.size() != probs.size()) {
    throw DomainError("SourceSet: positions and probabilities differ in length");
  }
  if (std::set<long>(positions.begin(), positions.end()).size() != positions.size()) {
    throw DomainError("SourceSet: source positions must be distinct");
  }
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("SourceSet: probabilities must lie in [0,1]");
  }
  if (std::abs(std::accumulate(probs.begin(), probs.end(), 0.0) - 1.0) > 1e-12) {
    throw DomainError("SourceSet: probabilities must sum to 1");
  }
  return SourceSet{std::move(positions), std::move(probs)};
}

SourceSet SourceSet::two_slit(long delta, double p_plus) {
  if (delta <= 0 || delta % 2 != 0) throw DomainError("two_slit: delta must be positive and even");
  return make({delta / 2, -delta / 2}, {p_plus, 1.0 - p_plus});
}

long SourceSet::max_abs_position() const {
  long m = 0;
  for (long s : positions) m = std::max(m, std::labs(s));
  return m;
}

double energy_site_gaussian_limit(double sigma, SitePoint point) {
  const double var = energy_site_variance<double>(point);
  if (!(var > 0)) throw DomainError("energy_site_gaussian_limit: zero variance at this site");
  const double d = sigma - energy_site_mean<double>(point);
  return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

double ensemble_density_quadrature(SitePoint point, const std::function<double(double)>& f_of_p,
                                   long panels) {
  if (panels < 2) throw DomainError("ensemble_density_quadrature: need at least 2 panels");
  if (panels % 2 != 0) ++panels;
  const double h = 2.0 / static_cast<double>(panels);
  auto g = [&](long i) {
    const double p = std::clamp(-1.0 + h * static_cast<double>(i), -1.0, 1.0);
    return f_of_p(p) * rho_pmf<double>(point.xi, point.tau, p);
  };
  double sum = g(0) + g(panels);
  for (long i = 1; i < panels; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * g(i);
  return sum * h / 3.0;
}

double qm_density_single(double t, const LatticeScale& scale) {
  if (!(t > 0)) throw DomainError("qm_density_single: t must be > 0");
  return scale.mass * scale.X * scale.X / (constants::planck_h * t);
}

double interference_momentum_pdf(double q, const SourceSet& sources) {
  if (sources.size() == 0) throw DomainError("interference: empty source set");
  double s = 1.0;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    for (std::size_t j = i + 1; j < sources.size(); ++j) {
      const double d = static_cast<double>(std::labs(sources.positions[i] - sources.positions[j]));
      s += 2.0 * std::sqrt(sources.probs[i] * sources.probs[j]) * std::cos(std::numbers::pi * d * q);
    }
  }
  return s / 2.0;
}

double interference_density(SitePoint point, const SourceSet& sources) {
  if (sources.size() == 0) throw DomainError("interference_density: empty source set");
  if (point.tau < 1) throw DomainError("interference_density: tau must be >= 1");
  if (std::labs(point.xi) > point.tau) throw DomainError("interference_density: |xi| > tau");
  const double tau = static_cast<double>(point.tau);
  return interference_momentum_pdf(static_cast<double>(point.xi) / tau, sources) / tau;
}

double qm_density_multi(double x, double t, const SourceSet& sources, const LatticeScale& scale) {
  if (sources.size() == 0) throw DomainError("qm_density_multi: empty source set");
  if (!(t > 0)) throw DomainError("qm_density_multi: t must be > 0");
  const double h = constants::planck_h;
  double s = 1.0;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    for (std::size_t j = i + 1; j < sources.size(); ++j) {
      const double dx =
          std::abs(static_cast<double>(sources.positions[i] - sources.positions[j])) * scale.X;
      s += 2.0 * std::sqrt(sources.probs[i] * sources.probs[j]) *
           std::cos(2.0 * std::numbers::pi * scale.mass * dx * x / (h * t));
    }
  }
  return scale.mass * scale.X * scale.X / (h * t) * s;
}

RingMode ring_momentum(double p, long ell) {
  if (ell < 2) throw DomainError("ring_momentum: ell must be >= 2");
  if (std::abs(p) > 1.0) throw DomainError("ring_momentum: |p| must be <= 1");
  return {std::lround(p * static_cast<double>(ell) / 2.0), ell};
}

ContinuityResiduals continuity_residuals(const std::function<double(double)>& f_of_p, long tau,
                                         double h, int grid_points) {
  if (tau < 1) throw DomainError("continuity_residuals: tau must be >= 1");
  if (!(h > 0)) throw DomainError("continuity_residuals: step must be > 0");
  if (grid_points < 2) throw DomainError("continuity_residuals: need at least 2 grid points");
  const double t0 = static_cast<double>(tau);
  auto density = [&](double xi, double t) { return f_of_p(xi / t) / t; };
  auto phase = [](double xi, double t) { return xi * xi / (2.0 * t); };
  auto phase_slope = [&](double xi, double t) {
    return (phase(xi + h, t) - phase(xi - h, t)) / (2.0 * h);
  };
  auto flux = [&](double xi, double t) { return density(xi, t) * phase_slope(xi, t); };

  ContinuityResiduals r{0.0, 0.0};
  const double span = 0.9 * t0;
  for (int i = 0; i < grid_points; ++i) {
    const double xi = -span + 2.0 * span * i / (grid_points - 1);
    const double dp_dt = (density(xi, t0 + h) - density(xi, t0 - h)) / (2.0 * h);
    const double dflux = (flux(xi + h, t0) - flux(xi - h, t0)) / (2.0 * h);
    const double ds_dt = (phase(xi, t0 + h) - phase(xi, t0 - h)) / (2.0 * h);
    const double ds_dx = phase_slope(xi, t0);
    r.continuity = std::max(r.continuity, std::abs(dp_dt + dflux));
    r.hjb = std::max(r.hjb, std::abs(ds_dt + 0.5 * ds_dx * ds_dx));
  }
  return r;
}

}  // namespace qlattice
