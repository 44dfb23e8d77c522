#include "qlattice/compare.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace qlattice {

SiteLaw SiteLaw::tabulate(long lo, long hi, const std::function<double(long)>& f) {
  if (hi < lo) throw DomainError("SiteLaw: empty window");
  SiteLaw law;
  law.lo = lo;
  law.prob.resize(hi - lo + 1);
  for (long xi = lo; xi <= hi; ++xi) law.prob(xi - lo) = f(xi);
  return law;
}

SiteLaw SiteLaw::normalized() const {
  const double s = prob.sum();
  if (!(s > 0)) throw DomainError("SiteLaw: cannot normalize a law with zero mass");
  return {lo, prob / s};
}

double total_variation(const Eigen::VectorXd& freq, const Eigen::VectorXd& prob) {
  if (freq.size() != prob.size()) throw DomainError("total_variation: size mismatch");
  return 0.5 * (freq - prob).cwiseAbs().sum();
}

namespace {

double chi2_survival(double statistic, long dof) {
  if (dof < 1) return 1.0;
  if (!std::isfinite(statistic)) return 0.0;
  boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

}  // namespace

ChiSquare pooled_chi_square(const Eigen::VectorXd& counts, const Eigen::VectorXd& prob,
                            double min_expected) {
  if (counts.size() != prob.size()) throw DomainError("pooled_chi_square: size mismatch");
  const double n = counts.sum();
  std::vector<std::pair<double, double>> cells;  // (expected, observed)
  double stray = 0.0;                            // arrivals where nothing is expected
  for (Eigen::Index i = 0; i < counts.size(); ++i) {
    if (prob(i) > 0) {
      cells.emplace_back(n * prob(i), counts(i));
    } else {
      stray += counts(i);
    }
  }
  ChiSquare out;
  if (stray > 0) {
    out.statistic = std::numeric_limits<double>::infinity();
    out.p_value = 0.0;
    return out;
  }
  std::sort(cells.begin(), cells.end());
  std::vector<std::pair<double, double>> pooled;
  std::pair<double, double> acc{0.0, 0.0};
  for (const auto& c : cells) {
    acc.first += c.first;
    acc.second += c.second;
    if (acc.first >= min_expected) {
      pooled.push_back(acc);
      acc = {0.0, 0.0};
    }
  }
  if (acc.first > 0 || acc.second > 0) {
    if (pooled.empty()) {
      pooled.push_back(acc);
    } else {
      pooled.back().first += acc.first;
      pooled.back().second += acc.second;
    }
  }
  for (const auto& [e, o] : pooled) out.statistic += (o - e) * (o - e) / e;
  out.dof = static_cast<long>(pooled.size()) - 1;
  out.p_value = chi2_survival(out.statistic, out.dof);
  return out;
}

ComparisonReport compare(const EnsembleHistogram& hist, const SiteLaw& expected,
                         const CompareOptions& options) {
  if (expected.lo != hist.lo || expected.prob.size() != static_cast<Eigen::Index>(hist.counts.size())) {
    throw DomainError("compare: histogram window [" + std::to_string(hist.lo) + ", " +
                      std::to_string(hist.hi()) + "] differs from law window [" +
                      std::to_string(expected.lo) + ", " + std::to_string(expected.hi()) + "]");
  }
  if ((expected.prob.array() < 0).any()) throw DomainError("compare: negative expected probability");
  if (std::abs(expected.prob.sum() - 1.0) > 1e-6) {
    throw DomainError("compare: expected law sums to " + std::to_string(expected.prob.sum()) +
                      ", not 1 within 1e-6");
  }
  if (hist.n_particles < 1 || hist.total() != hist.n_particles) {
    throw DomainError("compare: histogram total differs from its particle count");
  }

  ComparisonReport r;
  r.lo = hist.lo;
  r.n = hist.n_particles;
  r.expected = expected.prob;
  const auto m = expected.prob.size();
  Eigen::VectorXd counts(m);
  for (Eigen::Index i = 0; i < m; ++i) counts(i) = static_cast<double>(hist.counts[i]);
  const double n = static_cast<double>(r.n);
  r.frequency = counts / n;
  r.std_residual = Eigen::VectorXd::Zero(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double p = expected.prob(i);
    const double var = n * p * (1.0 - p);
    if (var > 0) {
      r.std_residual(i) = (counts(i) - n * p) / std::sqrt(var);
    } else if (counts(i) != n * p) {
      r.std_residual(i) = std::numeric_limits<double>::infinity();
    }
  }
  r.max_std_residual = r.std_residual.cwiseAbs().maxCoeff();
  r.tv = total_variation(r.frequency, r.expected);
  const auto chi = pooled_chi_square(counts, expected.prob, options.min_expected);
  r.chi2 = chi.statistic;
  r.dof = chi.dof;
  r.chi2_p_value = chi.p_value;
  r.tv_threshold = options.tv_threshold;
  r.alpha = options.alpha;
  r.tv_pass = r.tv <= options.tv_threshold;
  r.chi2_pass = r.chi2_p_value >= options.alpha;
  r.pass = r.tv_pass && (r.chi2_pass || !options.require_chi2);
  return r;
}

double calibrate_tv_threshold(const Eigen::VectorXd& prob, long n, std::uint64_t seed, int replicas,
                              double quantile) {
  if (n < 1) throw DomainError("calibrate_tv_threshold: n must be >= 1");
  if (replicas < 1) throw DomainError("calibrate_tv_threshold: replicas must be >= 1");
  if (!(quantile >= 0 && quantile <= 1)) throw DomainError("calibrate_tv_threshold: bad quantile");
  std::vector<double> tvs;
  for (int r = 0; r < replicas; ++r) {
    ParticleStream rng(seed, static_cast<std::uint64_t>(r));
    Eigen::VectorXd freq = Eigen::VectorXd::Zero(prob.size());
    // Multinomial draw by conditional binomials.
    long left = n;
    double mass_left = 1.0;
    for (Eigen::Index i = 0; i < prob.size() && left > 0; ++i) {
      const double pi = std::clamp(prob(i) / mass_left, 0.0, 1.0);
      const long k = (i + 1 == prob.size()) ? left : std::binomial_distribution<long>(left, pi)(rng);
      freq(i) = static_cast<double>(k) / static_cast<double>(n);
      left -= k;
      mass_left -= prob(i);
      if (mass_left <= 0) mass_left = std::numeric_limits<double>::min();
    }
    tvs.push_back(total_variation(freq, prob));
  }
  std::sort(tvs.begin(), tvs.end());
  const double pos = quantile * static_cast<double>(tvs.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(i);
  return i + 1 < tvs.size() ? tvs[i] + frac * (tvs[i + 1] - tvs[i]) : tvs[i];
}

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("pearson: need two equal-length samples");
  const Eigen::ArrayXd dx = x.array() - x.mean();
  const Eigen::ArrayXd dy = y.array() - y.mean();
  const double den = std::sqrt((dx * dx).sum() * (dy * dy).sum());
  if (!(den > 0)) throw DomainError("pearson: constant sample");
  return (dx * dy).sum() / den;
}

double fit_visibility(const EnsembleHistogram& hist, double delta, long tau) {
  if (tau < 1) throw DomainError("fit_visibility: tau must be >= 1");
  const long lo = std::max(hist.lo, -tau);
  const long hi = std::min(hist.hi(), tau);
  if (hi - lo < 2) throw DomainError("fit_visibility: window too small");
  const Eigen::Index m = hi - lo + 1;
  Eigen::MatrixXd design(m, 2);
  Eigen::VectorXd freq(m);
  for (long xi = lo; xi <= hi; ++xi) {
    const Eigen::Index i = xi - lo;
    design(i, 0) = 1.0;
    design(i, 1) = std::cos(std::numbers::pi * delta * static_cast<double>(xi) / static_cast<double>(tau));
    freq(i) = hist.frequency(xi);
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(freq);
  if (!(coef(0) != 0)) throw DomainError("fit_visibility: degenerate fit");
  return coef(1) / coef(0);
}

Binned bin_sites(const EnsembleHistogram& hist, const SiteLaw& law, int n_bins) {
  if (law.lo != hist.lo || law.prob.size() != static_cast<Eigen::Index>(hist.counts.size())) {
    throw DomainError("bin_sites: histogram and law windows differ");
  }
  const auto m = static_cast<long>(hist.counts.size());
  if (n_bins < 1 || n_bins > m) throw DomainError("bin_sites: n_bins must be in [1, window size]");
  Binned b{Eigen::VectorXd::Zero(n_bins), Eigen::VectorXd::Zero(n_bins)};
  for (long i = 0; i < m; ++i) {
    const auto bin = static_cast<Eigen::Index>(i * n_bins / m);
    b.observed(bin) += static_cast<double>(hist.counts[static_cast<std::size_t>(i)]);
    b.expected(bin) += law.prob(i);
  }
  return b;
}

ChiSquare two_sample_chi_square(const EnsembleHistogram& a, const EnsembleHistogram& b,
                                double min_count) {
  const long lo = std::min(a.lo, b.lo);
  const long hi = std::max(a.hi(), b.hi());
  std::vector<std::pair<double, double>> cells;
  for (long xi = lo; xi <= hi; ++xi) {
    const double ca = static_cast<double>(a.count(xi));
    const double cb = static_cast<double>(b.count(xi));
    if (ca + cb > 0) cells.emplace_back(ca, cb);
  }
  const double na = static_cast<double>(a.total());
  const double nb = static_cast<double>(b.total());
  if (!(na > 0 && nb > 0)) throw DomainError("two_sample_chi_square: empty histogram");
  std::sort(cells.begin(), cells.end(), [](const auto& x, const auto& y) {
    return std::make_pair(x.first + x.second, x.first) < std::make_pair(y.first + y.second, y.first);
  });
  std::vector<std::pair<double, double>> pooled;
  std::pair<double, double> acc{0.0, 0.0};
  for (const auto& c : cells) {
    acc.first += c.first;
    acc.second += c.second;
    if (acc.first + acc.second >= min_count) {
      pooled.push_back(acc);
      acc = {0.0, 0.0};
    }
  }
  if (acc.first + acc.second > 0) {
    if (pooled.empty()) {
      pooled.push_back(acc);
    } else {
      pooled.back().first += acc.first;
      pooled.back().second += acc.second;
    }
  }
  const double ka = std::sqrt(nb / na);
  const double kb = std::sqrt(na / nb);
  ChiSquare out;
  for (const auto& [oa, ob] : pooled) {
    const double d = ka * oa - kb * ob;
    out.statistic += d * d / (oa + ob);
  }
  out.dof = static_cast<long>(pooled.size()) - 1;
  out.p_value = chi2_survival(out.statistic, out.dof);
  return out;
}

}  // namespace qlattice
