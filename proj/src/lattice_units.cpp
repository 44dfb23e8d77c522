#include "qlattice/lattice_units.hpp"

#include <string>

namespace qlattice {

LatticeScale lattice_scale_from_mass(double mass) {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw DomainError("lattice_scale_from_mass: mass must be positive, got " +
                      std::to_string(mass));
  }
  using namespace constants;
  const double x = planck_h / (2.0 * mass * speed_of_light);
  const double t = planck_h / (2.0 * mass * speed_of_light * speed_of_light);
  return {mass, x, t};
}

Uncertainty<double> uncertainty_product(long n, const LatticeScale& scale) {
  if (n < 1) throw DomainError("uncertainty_product: N must be >= 1");
  const double dv = constants::speed_of_light / static_cast<double>(n);
  const double dx = 2.0 * static_cast<double>(n) * scale.X;
  return {dv, dx, dv * dx};
}

}  // namespace qlattice
