#pragma once

// Ensembles of independent walkers and the histogram of their arrival sites.

#include <algorithm>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "qlattice/errors.hpp"
#include "qlattice/free_dynamics.hpp"
#include "qlattice/rng.hpp"

namespace qlattice {

/// Arrival counts over the dense window [lo, lo + counts.size()).
struct EnsembleHistogram {
  long lo = 0;
  std::vector<std::int64_t> counts;
  long n_particles = 0;
  long n_steps = 0;
  std::string scenario;
  std::uint64_t seed = 0;

  static EnsembleHistogram window(long lo, long hi) {
    if (hi < lo) throw DomainError("EnsembleHistogram: empty window");
    EnsembleHistogram h;
    h.lo = lo;
    h.counts.assign(static_cast<std::size_t>(hi - lo + 1), 0);
    return h;
  }

  long hi() const { return lo + static_cast<long>(counts.size()) - 1; }
  bool contains(long xi) const { return xi >= lo && xi <= hi(); }
  std::int64_t count(long xi) const {
    return contains(xi) ? counts[static_cast<std::size_t>(xi - lo)] : 0;
  }
  void add(long xi) {
    if (!contains(xi)) throw DomainError("EnsembleHistogram: site outside window");
    ++counts[static_cast<std::size_t>(xi - lo)];
  }
  std::int64_t total() const {
    std::int64_t s = 0;
    for (auto c : counts) s += c;
    return s;
  }
  void merge(const EnsembleHistogram& other) {
    if (other.lo != lo || other.counts.size() != counts.size()) {
      throw DomainError("EnsembleHistogram: merging different windows");
    }
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  }
  double frequency(long xi) const {
    return n_particles > 0 ? static_cast<double>(count(xi)) / static_cast<double>(n_particles) : 0.0;
  }
};

/// Law of the momentum propensity drawn at preparation.
struct MomentumLaw {
  bool uniform = true;
  double p = 0.0;

  static MomentumLaw uniform_law() { return {true, 0.0}; }
  static MomentumLaw fixed(double p) {
    if (std::abs(p) > 1.0) throw DomainError("MomentumLaw: |p| must be <= 1");
    return {false, p};
  }
  /// Consumes one draw in uniform mode, none in fixed mode.
  double draw(ParticleStream& rng) const { return uniform ? rng.uniform(-1.0, 1.0) : p; }
};

inline unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Runs body(index, histogram) for every particle index, sharding disjoint
/// index ranges across threads and summing the shard histograms. Each
/// particle owns its random stream, so the result does not depend on the
/// thread count.
template <class Body>
EnsembleHistogram shard_particles(long n_particles, const EnsembleHistogram& empty,
                                  unsigned threads, Body body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(
                                                         std::max(1L, n_particles))));
  std::vector<EnsembleHistogram> shards(threads, empty);
  auto run_range = [&](unsigned s) {
    const long begin = n_particles * static_cast<long>(s) / static_cast<long>(threads);
    const long end = n_particles * static_cast<long>(s + 1) / static_cast<long>(threads);
    for (long i = begin; i < end; ++i) body(i, shards[s]);
  };
  if (threads == 1) {
    run_range(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned s = 0; s < threads; ++s) pool.emplace_back(run_range, s);
    for (auto& t : pool) t.join();
  }
  EnsembleHistogram out = empty;
  for (const auto& h : shards) out.merge(h);
  return out;
}

struct FreeEnsembleSpec {
  long n_particles = 50000;
  long n_steps = 300;
  std::uint64_t seed = 1;
  MomentumLaw momentum = MomentumLaw::uniform_law();
  unsigned threads = default_threads();
};

/// Independent walkers prepared at the origin; counts arrival sites at
/// tau = n_steps over the window [-n_steps, n_steps].
EnsembleHistogram run_free_ensemble(const FreeEnsembleSpec& spec);

}  // namespace qlattice
