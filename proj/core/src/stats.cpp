#include "specbeam/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace specbeam {

double tv_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("tv_distance: index set mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(a[i] - b[i]);
  return 0.5 * total;
}

double tv_distance(const Distribution& a, const Distribution& b) {
  return tv_distance(a.weights(), b.weights());
}

std::vector<double> empirical_pmf(const std::vector<std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (std::uint64_t c : counts) total += c;
  if (total == 0) throw std::invalid_argument("empirical_pmf: no samples");
  std::vector<double> pmf(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    pmf[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  return pmf;
}

MatchResult distribution_match_test(const std::vector<std::uint64_t>& counts,
                                    const Distribution& exact, double tv_tol,
                                    std::uint64_t min_trials) {
  if (counts.size() != exact.size()) {
    throw std::invalid_argument("distribution_match_test: index set mismatch");
  }
  std::uint64_t total = 0;
  for (std::uint64_t c : counts) total += c;
  if (total < min_trials) {
    throw std::invalid_argument("distribution_match_test: undersized sample");
  }

  MatchResult r;
  r.trials = total;
  r.tolerance = tv_tol;
  r.tv = tv_distance(empirical_pmf(counts), exact.weights());

  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = exact[i] * static_cast<double>(total);
    if (exact[i] <= 0.0) {
      if (counts[i] > 0) r.chi_square = std::numeric_limits<double>::infinity();
      continue;  // zero-mass cells are skipped
    }
    const double diff = static_cast<double>(counts[i]) - expected;
    r.chi_square += diff * diff / expected;
    r.dof += 1;
  }
  if (r.dof > 0) r.dof -= 1;
  r.pass = r.tv <= tv_tol;
  return r;
}

double sign_test_p_value(int wins, int losses) {
  if (wins < 0 || losses < 0) throw std::invalid_argument("sign_test_p_value: negative counts");
  const int n = wins + losses;
  if (n == 0) return 1.0;
  // P(X >= wins) for X ~ Binomial(n, 1/2), summed in log space.
  double p = 0.0;
  double log_choose = 0.0;  // log C(n, k), updated incrementally
  const double log_half = std::log(0.5);
  for (int k = 0; k <= n; ++k) {
    if (k >= wins) p += std::exp(log_choose + n * log_half);
    log_choose += std::log(static_cast<double>(n - k)) - std::log(static_cast<double>(k + 1));
  }
  return std::min(p, 1.0);
}

MeanCi mean_ci(const std::vector<double>& xs) {
  MeanCi r;
  if (xs.empty()) return r;
  double sum = 0.0;
  for (double x : xs) sum += x;
  r.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return r;
  double sq = 0.0;
  for (double x : xs) sq += (x - r.mean) * (x - r.mean);
  const double var = sq / static_cast<double>(xs.size() - 1);
  r.half_width = 1.96 * std::sqrt(var / static_cast<double>(xs.size()));
  return r;
}

}  // namespace specbeam
