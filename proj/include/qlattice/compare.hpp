#pragma once

// Goodness of fit between an arrival histogram and a predicted site law.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

#include "qlattice/ensemble.hpp"

namespace qlattice {

/// Probabilities over the window [lo, lo + prob.size()).
struct SiteLaw {
  long lo = 0;
  Eigen::VectorXd prob;

  long hi() const { return lo + static_cast<long>(prob.size()) - 1; }
  double at(long xi) const {
    const long i = xi - lo;
    return (i < 0 || i >= prob.size()) ? 0.0 : prob(i);
  }

  static SiteLaw tabulate(long lo, long hi, const std::function<double(long)>& f);
  /// Rescaled to unit mass.
  SiteLaw normalized() const;
};

struct CompareOptions {
  double tv_threshold = 1.0;
  double alpha = 0.01;          // chi-square rejection level
  bool require_chi2 = true;     // pass also needs the chi-square test
  double min_expected = 5.0;    // pooling target per chi-square bin
};

struct ComparisonReport {
  long lo = 0;
  Eigen::VectorXd expected;      // probabilities
  Eigen::VectorXd frequency;     // observed / n
  Eigen::VectorXd std_residual;  // (O - nP) / sqrt(nP(1-P)); 0 where P = 0 and O = 0
  long n = 0;
  double tv = 0.0;
  double chi2 = 0.0;
  long dof = 0;
  double chi2_p_value = 1.0;
  double max_std_residual = 0.0;
  double tv_threshold = 1.0;
  double alpha = 0.01;
  bool tv_pass = false;
  bool chi2_pass = false;
  bool pass = false;
};

double total_variation(const Eigen::VectorXd& freq, const Eigen::VectorXd& prob);

/// Pearson chi-square with cells pooled in order of (expected, observed)
/// until each pooled cell expects at least min_expected counts. The result
/// does not depend on the order of the cells.
struct ChiSquare {
  double statistic = 0.0;
  long dof = 0;
  double p_value = 1.0;
};
ChiSquare pooled_chi_square(const Eigen::VectorXd& counts, const Eigen::VectorXd& prob,
                            double min_expected = 5.0);

/// Throws DomainError if the windows differ or the law does not sum to 1
/// within 1e-6.
ComparisonReport compare(const EnsembleHistogram& hist, const SiteLaw& expected,
                         const CompareOptions& options = {});

/// quantile of the TV distance between multinomial(n, prob) samples and prob,
/// over `replicas` seeded draws.
double calibrate_tv_threshold(const Eigen::VectorXd& prob, long n, std::uint64_t seed,
                              int replicas = 100, double quantile = 0.99);

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Least-squares fit of the frequency to A + B cos(pi delta xi / tau) over
/// |xi| <= tau; returns B / A.
double fit_visibility(const EnsembleHistogram& hist, double delta, long tau);

struct Binned {
  Eigen::VectorXd observed;  // counts
  Eigen::VectorXd expected;  // probabilities
};

/// Groups consecutive sites into n_bins bins of (nearly) equal width.
Binned bin_sites(const EnsembleHistogram& hist, const SiteLaw& law, int n_bins);

/// Two-sample chi-square homogeneity test, cells pooled until each holds
/// at least min_count combined arrivals.
ChiSquare two_sample_chi_square(const EnsembleHistogram& a, const EnsembleHistogram& b,
                                double min_count = 10.0);

}  // namespace qlattice
