#include "specbeam/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace specbeam {

Distribution Distribution::from_weights(std::vector<double> weights) {
  if (weights.empty()) {
    throw std::invalid_argument("Distribution: empty weight vector");
  }
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w)) {
      throw std::invalid_argument("Distribution: weights must be finite and non-negative");
    }
    total += w;
  }
  if (total <= 0.0) {
    throw DegenerateSupportError("Distribution: zero total mass");
  }
  for (double& w : weights) w /= total;
  return Distribution(std::move(weights));
}

Distribution Distribution::from_log_weights(const std::vector<double>& log_weights) {
  if (log_weights.empty()) {
    throw std::invalid_argument("Distribution: empty log-weight vector");
  }
  double max_lw = -std::numeric_limits<double>::infinity();
  for (double lw : log_weights) max_lw = std::max(max_lw, lw);
  if (std::isinf(max_lw) && max_lw < 0) {
    throw DegenerateSupportError("Distribution: all log weights are -inf");
  }
  std::vector<double> w(log_weights.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double lw = log_weights[i];
    w[i] = std::isinf(lw) && lw < 0 ? 0.0 : std::exp(lw - max_lw);
  }
  return from_weights(std::move(w));
}

std::size_t Distribution::support_size() const {
  std::size_t n = 0;
  for (double w : w_) n += (w > 0.0);
  return n;
}

std::size_t Distribution::sample(Rng& rng) const {
  const double u = rng.next_double();
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < w_.size(); ++i) {
    if (w_[i] <= 0.0) continue;
    cum += w_[i];
    last_positive = i;
    if (u < cum) return i;
  }
  return last_positive;  // float round-off at the tail
}

Cdf::Cdf(const Distribution& d) : cum_(d.size()) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    acc += d[i];
    cum_[i] = acc;
  }
}

std::size_t Cdf::sample(Rng& rng) const {
  const double u = rng.next_double();
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  std::size_t i = static_cast<std::size_t>(it - cum_.begin());
  if (i >= cum_.size()) i = cum_.size() - 1;
  return i;
}

}  // namespace specbeam
