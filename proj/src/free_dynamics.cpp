#include "qlattice/free_dynamics.hpp"

namespace qlattice {

WalkRecord walk(const Propensity<double>& prop, long n_steps, ParticleStream& rng) {
  if (n_steps < 1) throw DomainError("walk: n_steps must be >= 1");
  WalkRecord rec;
  for (long n = 0; n < n_steps; ++n) rec.advance(sample_step(prop, rng));
  return rec;
}

}  // namespace qlattice
