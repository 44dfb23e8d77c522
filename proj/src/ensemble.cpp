#include "qlattice/ensemble.hpp"

namespace qlattice {

EnsembleHistogram run_free_ensemble(const FreeEnsembleSpec& spec) {
  if (spec.n_particles < 1) throw DomainError("run_free_ensemble: n_particles must be >= 1");
  if (spec.n_steps < 1) throw DomainError("run_free_ensemble: n_steps must be >= 1");
  auto empty = EnsembleHistogram::window(-spec.n_steps, spec.n_steps);
  const auto fixed_prop = propensity_from_p(spec.momentum.p);
  auto hist = shard_particles(spec.n_particles, empty, spec.threads,
                              [&](long index, EnsembleHistogram& h) {
                                ParticleStream rng(spec.seed, static_cast<std::uint64_t>(index));
                                const auto prop = spec.momentum.uniform
                                                      ? propensity_from_p(spec.momentum.draw(rng))
                                                      : fixed_prop;
                                h.add(walk(prop, spec.n_steps, rng).xi);
                              });
  hist.n_particles = spec.n_particles;
  hist.n_steps = spec.n_steps;
  hist.scenario = spec.momentum.uniform ? "free-uniform" : "free-fixed";
  hist.seed = spec.seed;
  return hist;
}

}  // namespace qlattice
