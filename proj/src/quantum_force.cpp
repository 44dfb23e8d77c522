#include "qlattice/quantum_force.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <unordered_map>

namespace qlattice {

ParticleBoson decay_particle_boson(ParticleBoson b) {
  ++b.k;
  b.momentum *= 1.0 - 1.0 / (2.0 * static_cast<double>(b.k));
  return b;
}

double particle_decay_factor(long k) {
  if (k < 0) throw DomainError("particle_decay_factor: k must be >= 0");
  ParticleBoson b{{}, 1.0, 0};
  while (b.k < k) b = decay_particle_boson(b);
  return b.momentum;
}

double boson_mean_series(double p12, double tol) {
  if (!(p12 > 0.0 && p12 <= 1.0)) throw DomainError("boson_mean_series: P12 must be in (0,1]");
  double sum = 0.0;
  double survive = 1.0;  // (1 - P12)^k
  ParticleBoson b{{}, 1.0, 0};
  for (;;) {
    const double term = p12 * survive * b.momentum;
    sum += term;
    if (term < tol) break;
    survive *= 1.0 - p12;
    b = decay_particle_boson(b);
  }
  return sum;
}

SiteBoson decay_site_boson(SiteBoson b) {
  ++b.ell;
  const double r = b.w0_scaled / static_cast<double>(b.ell);
  b.w *= 1.0 - r * r;
  return b;
}

SiteBoson advance_site_boson(SiteBoson b, std::int64_t steps) {
  if (steps < 0) throw DomainError("advance_site_boson: negative step count");
  const double x = std::abs(b.w0_scaled);
  const double replay_until = std::max<double>(static_cast<double>(kSiteReplay), std::ceil(x) + 1.0);
  while (steps > 0 && static_cast<double>(b.ell) < replay_until) {
    b = decay_site_boson(b);
    --steps;
  }
  if (steps == 0) return b;
  const double l0 = static_cast<double>(b.ell);
  const double l1 = l0 + static_cast<double>(steps);
  b.ell += static_cast<long>(steps);
  if (b.w == 0.0 || x == 0.0) return b;
  // prod_{l=l0+1}^{l1} (l-x)(l+x)/l^2 through gamma ratios, all factors positive here.
  auto partial = [x](double l) {
    return boost::math::tgamma_delta_ratio(l + 1.0 - x, x) / boost::math::tgamma_delta_ratio(l + 1.0, x);
  };
  b.w *= partial(l1) / partial(l0);
  return b;
}

void SiteState::catch_up(std::int64_t now) {
  if (now <= synced) return;
  for (auto& [key, b] : residents) b = advance_site_boson(b, now - synced);
  synced = now;
}

double effective_momentum(const InterferingParticle& particle) {
  double p = particle.p;
  for (const auto& [key, b] : particle.carried) p -= b.momentum;
  return std::clamp(p, -1.0, 1.0);
}

VisitEvent visit(InterferingParticle& particle, SiteState& site) {
  if (particle.tau <= 0) return VisitEvent::Skipped;
  if (!site.register_value) {
    site.register_value = particle.lambda;
    return VisitEvent::Initialized;
  }
  const long mu = *site.register_value;
  const long lambda = particle.lambda;
  if (mu == lambda) return VisitEvent::Match;

  const BosonKey key{particle.position - lambda, particle.position - mu};
  const double q = static_cast<double>(lambda) / static_cast<double>(particle.tau);
  const auto resident = site.residents.find(key);
  const double transferred = resident != site.residents.end() ? resident->second.w : 0.0;
  particle.carried[key] = ParticleBoson{key, transferred, 0};
  site.residents[key] = SiteBoson{key, q, static_cast<double>(mu - lambda) * q, 0};
  site.register_value = lambda;
  particle.lambda = mu;
  return VisitEvent::Exchange;
}

namespace {

std::vector<double> cumulative(const std::vector<double>& probs) {
  std::vector<double> cum(probs.size());
  std::partial_sum(probs.begin(), probs.end(), cum.begin());
  return cum;
}

std::size_t draw_index(const std::vector<double>& cum, double u) {
  for (std::size_t i = 0; i + 1 < cum.size(); ++i) {
    if (u < cum[i]) return i;
  }
  return cum.size() - 1;
}

long wrap(long x, long ell) {
  const long r = x % ell;
  return r < 0 ? r + ell : r;
}

// Spacetime sites of a line (hashed) or a ring (dense ell x (n_steps + 1)).
class Lattice {
 public:
  Lattice(long ring_ell, long n_steps) : ell_(ring_ell), n_steps_(n_steps) {
    if (ell_ > 0) dense_.resize(static_cast<std::size_t>(ell_ * (n_steps_ + 1)));
  }

  SiteState& at(long xi, long tau, std::int64_t clock) {
    if (ell_ > 0) {
      auto& s = dense_[static_cast<std::size_t>(tau * ell_ + xi)];
      if (!s.register_value && s.residents.empty()) s.synced = clock;
      return s;
    }
    const auto key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(xi)) << 32) |
                     static_cast<std::uint32_t>(tau);
    auto [it, inserted] = sparse_.try_emplace(key);
    if (inserted) it->second.synced = clock;
    return it->second;
  }

  std::vector<BosonRecord> residents(std::int64_t clock) {
    std::vector<BosonRecord> out;
    auto collect = [&](long xi, long tau, SiteState& s) {
      s.catch_up(clock);
      for (const auto& [key, b] : s.residents) out.push_back({xi, tau, b});
    };
    if (ell_ > 0) {
      for (long tau = 0; tau <= n_steps_; ++tau) {
        for (long xi = 0; xi < ell_; ++xi) {
          collect(xi, tau, dense_[static_cast<std::size_t>(tau * ell_ + xi)]);
        }
      }
    } else {
      for (auto& [key, s] : sparse_) {
        collect(static_cast<std::int32_t>(key >> 32), static_cast<long>(key & 0xffffffffu), s);
      }
      std::sort(out.begin(), out.end(), [](const BosonRecord& a, const BosonRecord& b) {
        return std::tie(a.tau, a.xi, a.boson.key) < std::tie(b.tau, b.xi, b.boson.key);
      });
    }
    return out;
  }

 private:
  long ell_;
  long n_steps_;
  std::vector<SiteState> dense_;
  std::unordered_map<std::uint64_t, SiteState> sparse_;
};

void check_run_size(long n_particles, long n_steps, const char* who) {
  if (n_particles < 1) throw DomainError(std::string(who) + ": n_particles must be >= 1");
  if (n_steps < 1) throw DomainError(std::string(who) + ": n_steps must be >= 1");
}

}  // namespace

FullRunResult run_full(const FullRunSpec& spec) {
  check_run_size(spec.n_particles, spec.n_steps, "run_full");
  if (spec.emission_gap < 0) throw DomainError("run_full: emission_gap must be >= 0");
  if (spec.ring_ell != 0 && spec.ring_ell < 2) throw DomainError("run_full: ring ell must be >= 2");
  const bool ring = spec.ring_ell > 0;
  if (!ring && spec.n_steps > 0x7fffffffL) throw CapacityError("run_full: n_steps too large");

  const long reach = spec.n_steps + spec.sources.max_abs_position();
  FullRunResult result;
  result.histogram = ring ? EnsembleHistogram::window(0, spec.ring_ell - 1)
                          : EnsembleHistogram::window(-reach, reach);
  Lattice lattice(spec.ring_ell, spec.n_steps);
  const auto cum = cumulative(spec.sources.probs);
  std::int64_t clock = 0;

  for (long i = 0; i < spec.n_particles; ++i) {
    ParticleStream rng(spec.seed, static_cast<std::uint64_t>(i));
    const long source = spec.sources.positions[draw_index(cum, rng.uniform())];
    InterferingParticle particle;
    particle.position = ring ? wrap(source, spec.ring_ell) : source;
    particle.p = spec.momentum.draw(rng);
    long displacement = 0;
    for (long t = 1; t <= spec.n_steps; ++t) {
      ++particle.tau;
      const int v = velocity(sample_step(propensity_from_p(effective_momentum(particle)), rng));
      particle.position += v;
      if (ring) particle.position = wrap(particle.position, spec.ring_ell);
      particle.lambda += v;
      displacement += v;
      for (auto& [key, b] : particle.carried) b = decay_particle_boson(b);
      ++clock;
      auto& site = lattice.at(particle.position, particle.tau, clock);
      site.catch_up(clock);
      if (visit(particle, site) == VisitEvent::Exchange) ++result.exchanges;
    }
    result.histogram.add(particle.position);
    result.q_estimates.push_back(static_cast<double>(displacement) /
                                 static_cast<double>(spec.n_steps));
    clock += spec.emission_gap;
  }
  result.site_bosons = lattice.residents(clock);
  result.histogram.n_particles = spec.n_particles;
  result.histogram.n_steps = spec.n_steps;
  result.histogram.scenario = (ring ? "ring" : scenario_name(spec.sources)) + std::string("-full");
  result.histogram.seed = spec.seed;
  return result;
}

namespace {

// Walker in a trained lattice. Carried bosons are kept as a short list,
// at most one per (apparent source, register source) pair.
struct TrainedWalker {
  const std::vector<double>& positions;  // apparent source positions
  const std::vector<double>& cum;
  const std::vector<double>& decay;  // decay[k] = 1 - 1/(2k)
  bool q_from_displacement;          // ring: q is the unwrapped displacement over tau

  struct Carried {
    std::size_t from;
    std::size_t to;
    double momentum;
    long k;
  };

  long walk(ParticleStream& rng, std::size_t source, double p, long n_steps) const {
    std::vector<Carried> carried;
    std::size_t apparent = source;
    long displacement = 0;
    for (long tau = 1; tau <= n_steps; ++tau) {
      double pt = p;
      for (const auto& c : carried) pt -= c.momentum;
      pt = std::clamp(pt, -1.0, 1.0);
      displacement += velocity(sample_step(propensity_from_p(pt), rng));
      for (auto& c : carried) c.momentum *= decay[static_cast<std::size_t>(++c.k)];
      const std::size_t met = draw_index(cum, rng.uniform());
      if (met == apparent) continue;
      const double lambda = q_from_displacement
                                ? static_cast<double>(displacement)
                                : positions[source] + static_cast<double>(displacement) -
                                      positions[apparent];
      const double q = lambda / static_cast<double>(tau);
      const double d = std::abs(positions[met] - positions[apparent]);
      const Carried fresh{apparent, met, std::sin(std::numbers::pi * d * q) / (std::numbers::pi * d), 0};
      auto it = std::find_if(carried.begin(), carried.end(), [&](const Carried& c) {
        return c.from == apparent && c.to == met;
      });
      if (it != carried.end()) {
        *it = fresh;
      } else {
        carried.push_back(fresh);
      }
      apparent = met;
    }
    return displacement;
  }
};

std::vector<double> decay_table(long n_steps) {
  std::vector<double> t(static_cast<std::size_t>(n_steps) + 1, 1.0);
  for (long k = 1; k <= n_steps; ++k) t[static_cast<std::size_t>(k)] = 1.0 - 1.0 / (2.0 * static_cast<double>(k));
  return t;
}

}  // namespace

EnsembleHistogram run_trained(const TrainedLatticeSpec& spec) {
  check_run_size(spec.n_particles, spec.n_steps, "run_trained");
  if (spec.mode == LatticeMode::Full) {
    FullRunSpec full;
    full.sources = spec.sources;
    full.n_particles = spec.n_particles;
    full.n_steps = spec.n_steps;
    full.seed = spec.seed;
    full.momentum = spec.momentum;
    return run_full(full).histogram;
  }
  const long reach = spec.n_steps + spec.sources.max_abs_position();
  const std::vector<double> positions(spec.sources.positions.begin(), spec.sources.positions.end());
  const auto cum = cumulative(spec.sources.probs);
  const auto decay = decay_table(spec.n_steps);
  const TrainedWalker walker{positions, cum, decay, false};
  auto hist = shard_particles(
      spec.n_particles, EnsembleHistogram::window(-reach, reach), spec.threads,
      [&](long index, EnsembleHistogram& h) {
        ParticleStream rng(spec.seed, static_cast<std::uint64_t>(index));
        const std::size_t source = draw_index(cum, rng.uniform());
        const double p = spec.momentum.draw(rng);
        h.add(spec.sources.positions[source] + walker.walk(rng, source, p, spec.n_steps));
      });
  hist.n_particles = spec.n_particles;
  hist.n_steps = spec.n_steps;
  hist.scenario = scenario_name(spec.sources) + "-trained";
  hist.seed = spec.seed;
  return hist;
}

double RingResult::mean_q() const {
  if (q_estimates.empty()) throw DomainError("RingResult: no estimates");
  return std::accumulate(q_estimates.begin(), q_estimates.end(), 0.0) /
         static_cast<double>(q_estimates.size());
}

RingResult run_ring(const RingSpec& spec) {
  check_run_size(spec.n_particles, spec.n_steps, "run_ring");
  if (spec.ell < 2) throw DomainError("run_ring: ell must be >= 2");
  if (std::abs(spec.p) > 1.0) throw DomainError("run_ring: |p| must be <= 1");
  RingResult result;
  if (spec.mode == LatticeMode::Full) {
    FullRunSpec full;
    full.n_particles = spec.n_particles;
    full.n_steps = spec.n_steps;
    full.seed = spec.seed;
    full.momentum = MomentumLaw::fixed(spec.p);
    full.ring_ell = spec.ell;
    auto r = run_full(full);
    result.histogram = std::move(r.histogram);
    result.q_estimates = std::move(r.q_estimates);
    return result;
  }
  if (spec.ring_sources < 2) throw DomainError("run_ring: ring_sources must be >= 2");
  std::vector<double> positions(static_cast<std::size_t>(spec.ring_sources));
  for (std::size_t j = 0; j < positions.size(); ++j) {
    positions[j] = static_cast<double>(j) * static_cast<double>(spec.ell);
  }
  const auto cum = cumulative(std::vector<double>(positions.size(), 1.0 / static_cast<double>(positions.size())));
  const auto decay = decay_table(spec.n_steps);
  const TrainedWalker walker{positions, cum, decay, true};
  result.q_estimates.assign(static_cast<std::size_t>(spec.n_particles), 0.0);
  result.histogram = shard_particles(
      spec.n_particles, EnsembleHistogram::window(0, spec.ell - 1), spec.threads,
      [&](long index, EnsembleHistogram& h) {
        ParticleStream rng(spec.seed, static_cast<std::uint64_t>(index));
        const std::size_t source = draw_index(cum, rng.uniform());
        const long displacement = walker.walk(rng, source, spec.p, spec.n_steps);
        h.add(wrap(displacement, spec.ell));
        result.q_estimates[static_cast<std::size_t>(index)] =
            static_cast<double>(displacement) / static_cast<double>(spec.n_steps);
      });
  result.histogram.n_particles = spec.n_particles;
  result.histogram.n_steps = spec.n_steps;
  result.histogram.scenario = "ring-trained";
  result.histogram.seed = spec.seed;
  return result;
}

std::string scenario_name(const SourceSet& sources) {
  switch (sources.size()) {
    case 1: return "single";
    case 2: return "two-slit";
    default: return "multi-slit";
  }
}

}  // namespace qlattice
