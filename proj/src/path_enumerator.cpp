#include "qlattice/path_enumerator.hpp"

#include <array>
#include <cctype>
#include <cstdint>
#include <functional>

namespace qlattice {

Rational parse_rational(const std::string& text) {
  std::string s;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  }
  if (s.empty()) throw DomainError("parse_rational: empty string");
  auto parse_int = [&](const std::string& digits) {
    if (digits.empty()) throw DomainError("parse_rational: malformed number '" + text + "'");
    std::size_t i = (digits[0] == '-' || digits[0] == '+') ? 1 : 0;
    if (i == digits.size()) throw DomainError("parse_rational: malformed number '" + text + "'");
    for (std::size_t j = i; j < digits.size(); ++j) {
      if (!std::isdigit(static_cast<unsigned char>(digits[j]))) {
        throw DomainError("parse_rational: malformed number '" + text + "'");
      }
    }
    BigInt v(digits.substr(i));
    return digits[0] == '-' ? BigInt(-v) : v;
  };
  if (auto slash = s.find('/'); slash != std::string::npos) {
    const BigInt den = parse_int(s.substr(slash + 1));
    if (den == 0) throw DomainError("parse_rational: zero denominator");
    return Rational(parse_int(s.substr(0, slash))) / Rational(den);
  }
  const bool negative = s[0] == '-';
  if (s[0] == '-' || s[0] == '+') s.erase(0, 1);
  const auto dot = s.find('.');
  std::string whole = s.substr(0, dot);
  std::string frac = dot == std::string::npos ? "" : s.substr(dot + 1);
  if (whole.empty() && frac.empty()) throw DomainError("parse_rational: malformed number '" + text + "'");
  for (const auto* part : {&whole, &frac}) {
    if (!part->empty() && !std::isdigit(static_cast<unsigned char>(part->front()))) {
      throw DomainError("parse_rational: malformed number '" + text + "'");
    }
  }
  if (whole.empty()) whole = "0";
  Rational r(parse_int(whole));
  if (!frac.empty()) {
    BigInt scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    r += Rational(parse_int(frac)) / Rational(scale);
  }
  return negative ? Rational(-r) : r;
}

Rational PathWeight::weight(const Propensity<Rational>& prop) const {
  return Rational(paths) * ipow(prop.a, n_a) * ipow(prop.b, n_b) * ipow(prop.c, n_c);
}

std::vector<PathWeight> walk_all_paths(long tau) {
  if (tau < 0) throw DomainError("walk_all_paths: tau must be >= 0");
  if (tau > kMaxLiteralTau) {
    throw CapacityError("walk_all_paths: tau > " + std::to_string(kMaxLiteralTau) +
                        " (3^tau paths); use site_compositions");
  }
  // tally[n_a][n_c]
  std::array<std::array<std::uint64_t, kMaxLiteralTau + 1>, kMaxLiteralTau + 1> tally{};
  std::function<void(long, long, long)> dfs = [&](long depth, long n_a, long n_c) {
    if (depth == tau) {
      ++tally[n_a][n_c];
      return;
    }
    dfs(depth + 1, n_a + 1, n_c);
    dfs(depth + 1, n_a, n_c);
    dfs(depth + 1, n_a, n_c + 1);
  };
  dfs(0, 0, 0);

  std::vector<PathWeight> out;
  for (long n_a = 0; n_a <= tau; ++n_a) {
    for (long n_c = 0; n_a + n_c <= tau; ++n_c) {
      if (tally[n_a][n_c] == 0) continue;
      out.push_back({n_a, tau - n_a - n_c, n_c, BigInt(tally[n_a][n_c])});
    }
  }
  return out;
}

std::vector<PathWeight> site_compositions(long xi, long tau) {
  if (tau < 0) throw DomainError("site_compositions: tau must be >= 0");
  if (tau > kMaxCompositionTau) {
    throw CapacityError("site_compositions: tau > " + std::to_string(kMaxCompositionTau));
  }
  std::vector<PathWeight> out;
  if (std::labs(xi) > tau) return out;
  const long lo = std::max(0L, -xi);
  const long hi = (tau - xi) / 2;
  for (long n_c = lo; n_c <= hi; ++n_c) {
    const long n_a = n_c + xi;
    const long n_b = tau - n_a - n_c;
    // tau! / (n_a! n_b! n_c!)
    out.push_back({n_a, n_b, n_c, binomial_exact(tau, n_a) * binomial_exact(tau - n_a, n_c)});
  }
  return out;
}

ExactLaw enumerate_site_distribution(long tau, const Rational& p) {
  const auto prop = propensity_from_p(p);
  ExactLaw law;
  for (const auto& w : walk_all_paths(tau)) law[w.xi()] += w.weight(prop);
  return law;
}

ExactLaw count_site_distribution(long tau, const Rational& p) {
  const auto prop = propensity_from_p(p);
  ExactLaw law;
  for (long xi = -tau; xi <= tau; ++xi) {
    Rational total = 0;
    for (const auto& w : site_compositions(xi, tau)) total += w.weight(prop);
    law[xi] = total;
  }
  return law;
}

namespace {

ExactLaw energy_law(const std::vector<PathWeight>& classes, long xi,
                    const Propensity<Rational>& prop) {
  ExactLaw law;
  Rational total = 0;
  for (const auto& w : classes) {
    if (w.xi() != xi) continue;
    const Rational wt = w.weight(prop);
    law[w.sigma()] += wt;
    total += wt;
  }
  if (total == 0) return {};
  for (auto& [sigma, v] : law) v /= total;
  return law;
}

Rational law_mean(const ExactLaw& law) {
  Rational m = 0;
  for (const auto& [k, v] : law) m += Rational(k) * v;
  return m;
}

Rational law_variance(const ExactLaw& law) {
  const Rational m = law_mean(law);
  Rational s = 0;
  for (const auto& [k, v] : law) s += (Rational(k) - m) * (Rational(k) - m) * v;
  return s;
}

Rational abs_diff(const Rational& x, const Rational& y) { return abs_value(Rational(x - y)); }

}  // namespace

ExactLaw enumerate_energy_at_site(SitePoint point, const Rational& p) {
  return energy_law(walk_all_paths(point.tau), point.xi, propensity_from_p(p));
}

ExactLaw integrate_ensemble(long tau) {
  if (tau < 1) throw DomainError("integrate_ensemble: tau must be >= 1");
  if (tau > kMaxLiteralTau) {
    throw CapacityError("integrate_ensemble: tau > " + std::to_string(kMaxLiteralTau));
  }
  ExactLaw law;
  const Rational norm = Rational(1) / Rational(BigInt(1) << (2 * tau + 1));
  for (long xi = -tau; xi <= tau; ++xi) {
    // Coefficients of (1+p)^(tau+xi) (1-p)^(tau-xi) in increasing powers of p.
    const long m = tau + xi;
    const long n = tau - xi;
    std::vector<BigInt> coef(static_cast<std::size_t>(m + n + 1), BigInt(0));
    for (long i = 0; i <= m; ++i) {
      for (long j = 0; j <= n; ++j) {
        BigInt term = binomial_exact(m, i) * binomial_exact(n, j);
        if (j % 2 == 1) term = -term;
        coef[static_cast<std::size_t>(i + j)] += term;
      }
    }
    // integral of p^k over [-1,1] is 2/(k+1) for even k, 0 for odd k.
    Rational integral = 0;
    for (std::size_t k = 0; k < coef.size(); k += 2) {
      integral += Rational(coef[k]) * Rational(2) / Rational(static_cast<long>(k) + 1);
    }
    law[xi] = Rational(binomial_exact(2 * tau, tau + xi)) * norm * integral;
  }
  return law;
}

ExactLaw enumerate_return_times(long max_n, const Rational& p) {
  if (max_n < 1) throw DomainError("enumerate_return_times: max_n must be >= 1");
  if (max_n > kMaxReturnN) {
    throw CapacityError("enumerate_return_times: max_n > " + std::to_string(kMaxReturnN));
  }
  const auto prop = propensity_from_p(p);
  const long len = 2 * max_n;
  const long width = 2 * len + 1;
  // count[pos + len][n_a][n_c] of live paths that have not yet returned.
  std::vector<std::uint64_t> live(static_cast<std::size_t>(width * (len + 1) * (len + 1)), 0);
  auto at = [&](std::vector<std::uint64_t>& v, long pos, long n_a, long n_c) -> std::uint64_t& {
    return v[static_cast<std::size_t>(((pos + len) * (len + 1) + n_a) * (len + 1) + n_c)];
  };
  at(live, 1, 1, 0) = 1;
  at(live, -1, 0, 1) = 1;

  ExactLaw law;
  for (long n = 1; n <= max_n; ++n) law[n] = 0;
  for (long t = 2; t <= len; ++t) {
    std::vector<std::uint64_t> next(live.size(), 0);
    for (long pos = -(t - 1); pos <= t - 1; ++pos) {
      if (pos == 0) continue;
      for (long n_a = 0; n_a < t; ++n_a) {
        for (long n_c = 0; n_a + n_c < t; ++n_c) {
          const std::uint64_t cnt = at(live, pos, n_a, n_c);
          if (cnt == 0) continue;
          const std::array<std::array<long, 3>, 3> moves{
              {{pos + 1, n_a + 1, n_c}, {pos, n_a, n_c}, {pos - 1, n_a, n_c + 1}}};
          for (const auto& [np, na, nc] : moves) {
            if (np != 0) {
              at(next, np, na, nc) += cnt;
            } else if (t % 2 == 0) {
              const PathWeight w{na, t - na - nc, nc, BigInt(cnt)};
              law[t / 2] += w.weight(prop);
            }
          }
        }
      }
    }
    live.swap(next);
  }
  return law;
}

bool CertificationReport::all_exact() const {
  for (const auto& e : entries) {
    if (!e.exact()) return false;
  }
  return !entries.empty();
}

std::vector<Rational> default_certification_grid() {
  std::vector<Rational> grid;
  for (long k = -3; k <= 3; ++k) grid.push_back(Rational(k) / Rational(4));
  return grid;
}

CertificationReport certify(long max_tau, const std::vector<Rational>& p_values) {
  if (max_tau < 1) throw DomainError("certify: max_tau must be >= 1");
  if (max_tau > kMaxLiteralTau) {
    throw CapacityError("certify: max_tau > " + std::to_string(kMaxLiteralTau));
  }
  if (p_values.empty()) throw DomainError("certify: empty p grid");

  CertificationEntry position_law{"position law", 0, 0}, path_count{"path count", 0, 0},
      energy_entry{"site energy law", 0, 0}, p_indep{"site energy law p-independence", 0, 0},
      energy_mean{"site energy mean", 0, 0}, energy_variance{"site energy variance", 0, 0},
      ensemble_entry{"ensemble density", 0, 0}, ret{"first return, n<=2", 0, 0};
  auto track = [](CertificationEntry& e, const Rational& dev) {
    ++e.instances;
    if (dev > e.max_deviation) e.max_deviation = dev;
  };

  for (long tau = 1; tau <= max_tau; ++tau) {
    const auto classes = walk_all_paths(tau);
    const auto ensemble = integrate_ensemble(tau);
    for (long xi = -tau; xi <= tau; ++xi) {
      track(ensemble_entry, abs_diff(ensemble.at(xi), ensemble_density_free<Rational>(SitePoint{xi, tau})));
    }
    for (std::size_t ip = 0; ip < p_values.size(); ++ip) {
      const Rational& p = p_values[ip];
      const auto prop = propensity_from_p(p);
      ExactLaw literal;
      for (const auto& w : classes) literal[w.xi()] += w.weight(prop);
      const auto counted = count_site_distribution(tau, p);
      for (long xi = -tau; xi <= tau; ++xi) {
        const Rational lit = literal.count(xi) ? literal.at(xi) : Rational(0);
        track(position_law, abs_diff(lit, rho_pmf<Rational>(xi, tau, p)));
        track(path_count, abs_diff(lit, counted.at(xi)));

        const SitePoint point{xi, tau};
        const auto law = energy_law(classes, xi, prop);
        if (law.empty()) continue;
        for (long sigma = 0; sigma <= tau; ++sigma) {
          const Rational v = law.count(sigma) ? law.at(sigma) : Rational(0);
          track(energy_entry, abs_diff(v, energy_pmf_site<Rational>(sigma, point)));
        }
        track(energy_mean, abs_diff(law_mean(law), energy_site_mean<Rational>(point)));
        if (tau >= 2) track(energy_variance, abs_diff(law_variance(law), energy_site_variance<Rational>(point)));
        if (ip > 0) {
          const auto first = energy_law(classes, xi, propensity_from_p(p_values.front()));
          if (!first.empty()) track(p_indep, first == law ? Rational(0) : Rational(1));
        }
      }
    }
  }
  for (const auto& p : p_values) {
    const auto prop = propensity_from_p(p);
    const auto returns = enumerate_return_times(2, p);
    for (long n = 1; n <= 2; ++n) track(ret, abs_diff(returns.at(n), return_time_pmf(n, prop)));
  }

  CertificationReport report;
  report.max_tau = max_tau;
  report.p_values = p_values;
  report.entries = {position_law, path_count, energy_entry, p_indep, energy_mean, energy_variance, ensemble_entry, ret};
  return report;
}

}  // namespace qlattice
