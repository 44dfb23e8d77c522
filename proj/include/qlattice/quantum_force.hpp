#pragma once

// Site registers, lambda-mu bosons and the interfering walk, in full mode
// (lattice memory built up by successive emissions) and trained mode
// (registers and boson momenta drawn from their steady state).

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qlattice/analytic_oracle.hpp"
#include "qlattice/ensemble.hpp"

namespace qlattice {

/// Boson type. A register mu at site xi was written by a walker whose
/// apparent source is xi - mu; the visiting walker's is xi - lambda. The key
/// is the ordered pair of apparent sources, so mu - lambda = delta().
struct BosonKey {
  long particle_source = 0;
  long register_source = 0;

  long delta() const { return particle_source - register_source; }
  auto operator<=>(const BosonKey&) const = default;
};

struct ParticleBoson {
  BosonKey key;
  double momentum = 0.0;
  long k = 0;
};

/// k += 1, momentum *= 1 - 1/(2k).
ParticleBoson decay_particle_boson(ParticleBoson b);

/// Cumulative decay factor after k steps, (2k)! / ((k!)^2 4^k), obtained by
/// repeating decay_particle_boson.
double particle_decay_factor(long k);

/// sum_k P12 (1 - P12)^k particle_decay_factor(k), truncated once a term
/// drops below tol.
double boson_mean_series(double p12, double tol = 1e-15);

struct SiteBoson {
  BosonKey key;
  double w = 0.0;
  double w0_scaled = 0.0;
  long ell = 0;
};

/// ell += 1, w *= 1 - (w0_scaled / ell)^2.
SiteBoson decay_site_boson(SiteBoson b);

/// Applies `steps` decays. The first kSiteReplay lifetimes (and any lifetime
/// where a factor can be negative) are replayed one by one; beyond that the
/// remaining product is taken in closed form through gamma-function ratios.
inline constexpr long kSiteReplay = 4096;
SiteBoson advance_site_boson(SiteBoson b, std::int64_t steps);

/// Memory of one lattice site. Residents are decayed lazily: synced is the
/// lattice clock up to which they have been decayed.
struct SiteState {
  std::optional<long> register_value;
  std::map<BosonKey, SiteBoson> residents;
  std::int64_t synced = 0;

  void catch_up(std::int64_t now);
};

struct InterferingParticle {
  long position = 0;  // wrapped on a ring
  long lambda = 0;
  long tau = 0;
  double p = 0.0;
  std::map<BosonKey, ParticleBoson> carried;
};

/// p minus the carried momenta, clamped to [-1, 1].
double effective_momentum(const InterferingParticle& particle);

enum class VisitEvent { Initialized, Match, Exchange, Skipped };

/// Register/counter exchange at the particle's current site.
VisitEvent visit(InterferingParticle& particle, SiteState& site);

/// A resident site boson, for dumps.
struct BosonRecord {
  long xi = 0;
  long tau = 0;
  SiteBoson boson;
};

// ---------------------------------------------------------------------------
// Full mode

struct FullRunSpec {
  SourceSet sources = SourceSet::single();
  long n_particles = 100;
  long n_steps = 300;
  std::uint64_t seed = 1;
  MomentumLaw momentum = MomentumLaw::uniform_law();
  long emission_gap = 0;  // extra lattice ticks between emissions
  long ring_ell = 0;      // 0: infinite line; otherwise ring circumference
};

struct FullRunResult {
  EnsembleHistogram histogram;
  std::vector<BosonRecord> site_bosons;  // resident at the end of the run
  std::vector<double> q_estimates;       // displacement / n_steps per particle
  long exchanges = 0;
};

/// Sequential emissions over a shared lattice of spacetime sites (xi, tau).
/// Per iteration: tau += 1, p_t, step, xi and lambda update, carried bosons
/// decay, lattice bosons decay, visit.
FullRunResult run_full(const FullRunSpec& spec);

// ---------------------------------------------------------------------------
// Trained mode

enum class LatticeMode { Full, Trained };

struct TrainedLatticeSpec {
  SourceSet sources = SourceSet::two_slit(2, 0.5);
  LatticeMode mode = LatticeMode::Trained;
  long n_particles = 50000;
  long n_steps = 300;
  std::uint64_t seed = 1;
  MomentumLaw momentum = MomentumLaw::uniform_law();
  unsigned threads = default_threads();
};

/// Independent walkers in a trained lattice. Each step the register met is
/// drawn from the source probabilities; a mismatch creates a particle boson
/// at its steady-state momentum sin(pi d q) / (pi d), q = lambda / tau, and
/// swaps the apparent source.
EnsembleHistogram run_trained(const TrainedLatticeSpec& spec);

struct RingSpec {
  long ell = 50;
  double p = 0.33;
  long n_particles = 200;
  long n_steps = 10000;
  std::uint64_t seed = 1;
  LatticeMode mode = LatticeMode::Trained;
  long ring_sources = 16;  // trained mode: apparent sources spaced by ell
  unsigned threads = default_threads();
};

struct RingResult {
  EnsembleHistogram histogram;  // sites 0 .. ell-1
  std::vector<double> q_estimates;

  double mean_q() const;
};

RingResult run_ring(const RingSpec& spec);

/// Scenario label used in output metadata.
std::string scenario_name(const SourceSet& sources);

}  // namespace qlattice
