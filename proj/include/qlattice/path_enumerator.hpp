#pragma once

// Exhaustive oracles over walk paths with exact rational arithmetic.

#include <map>
#include <string>
#include <vector>

#include "qlattice/analytic_oracle.hpp"
#include "qlattice/exact.hpp"

namespace qlattice {

inline constexpr long kMaxLiteralTau = 12;
inline constexpr long kMaxCompositionTau = 100;
inline constexpr long kMaxReturnN = 10;

using ExactLaw = std::map<long, Rational>;

/// A class of paths sharing the move counts (n_a forward, n_b rest,
/// n_c backward), with the number of such paths.
struct PathWeight {
  long n_a = 0;
  long n_b = 0;
  long n_c = 0;
  BigInt paths = 0;

  long tau() const { return n_a + n_b + n_c; }
  long xi() const { return n_a - n_c; }
  long sigma() const { return n_a + n_c; }
  /// Probability of the whole class under the propensity.
  Rational weight(const Propensity<Rational>& prop) const;
};

/// Path classes obtained by walking all 3^tau paths one by one.
std::vector<PathWeight> walk_all_paths(long tau);

/// Path classes ending at xi, counted with multinomials; n_c runs over
/// max(0, -xi) .. floor((tau - xi) / 2).
std::vector<PathWeight> site_compositions(long xi, long tau);

/// Exact law of the position after tau steps, by literal enumeration.
ExactLaw enumerate_site_distribution(long tau, const Rational& p);

/// Same law from site_compositions; runs up to kMaxCompositionTau.
ExactLaw count_site_distribution(long tau, const Rational& p);

/// Conditional law of the cumulated energy among paths reaching the site.
/// Empty for unreachable sites.
ExactLaw enumerate_energy_at_site(SitePoint point, const Rational& p);

/// (1/2) * integral over [-1,1] of the position law, integrating the
/// polynomial (1+p)^(tau+xi) (1-p)^(tau-xi) term by term.
ExactLaw integrate_ensemble(long tau);

/// First-return probabilities at time 2n for n = 1..max_n. A path counts if
/// it moves on its first step, avoids the origin strictly in between and is
/// back at the origin at step 2n.
ExactLaw enumerate_return_times(long max_n, const Rational& p);

struct CertificationEntry {
  std::string name;
  long instances = 0;
  Rational max_deviation = 0;
  bool exact() const { return max_deviation == 0; }
};

struct CertificationReport {
  long max_tau = 0;
  std::vector<Rational> p_values;
  std::vector<CertificationEntry> entries;
  bool all_exact() const;
};

/// Compares every exact closed form against enumeration for all tau <= max_tau,
/// |xi| <= tau and the given p values.
CertificationReport certify(long max_tau, const std::vector<Rational>& p_values);

/// Default p grid {0, +-1/4, +-1/2, +-3/4}.
std::vector<Rational> default_certification_grid();

}  // namespace qlattice
