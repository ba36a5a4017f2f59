#pragma once

#include "specbeam/distribution.hpp"

#include <cstdint>
#include <vector>

namespace specbeam {

/// Total variation distance, 1/2 * sum |a - b|. Index sets must match.
double tv_distance(const std::vector<double>& a, const std::vector<double>& b);
double tv_distance(const Distribution& a, const Distribution& b);

/// Normalizes raw counts into an empirical pmf.
std::vector<double> empirical_pmf(const std::vector<std::uint64_t>& counts);

/// Result of comparing empirical counts against an exact distribution. The
/// pass verdict is the TV gate; the chi-square statistic (zero-mass cells
/// skipped) is reported alongside.
struct MatchResult {
  double tv = 0.0;
  double chi_square = 0.0;
  int dof = 0;
  std::uint64_t trials = 0;
  double tolerance = 0.0;
  bool pass = false;
};

MatchResult distribution_match_test(const std::vector<std::uint64_t>& counts,
                                    const Distribution& exact, double tv_tol,
                                    std::uint64_t min_trials);

/// One-sided sign test: probability of at least `wins` successes in
/// wins + losses fair coin flips (ties dropped by the caller).
double sign_test_p_value(int wins, int losses);

/// Sample mean and its normal-approximation 95% confidence half-width.
struct MeanCi {
  double mean = 0.0;
  double half_width = 0.0;
};
MeanCi mean_ci(const std::vector<double>& xs);

}  // namespace specbeam
