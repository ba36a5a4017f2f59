#pragma once

#include "specbeam/rng.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace specbeam {

/// Thrown when a joint distribution ends up with zero total mass (every
/// candidate continuation pruned to probability zero).
struct DegenerateSupportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A finite probability vector over a dense index set (a vocabulary, or a
/// flattened beam x vocabulary space).
///
/// Invariants: entries are non-negative, the total is 1 within 1e-9, and at
/// least one entry is strictly positive.
class Distribution {
 public:
  Distribution() = default;

  /// Normalizes a non-negative weight vector. Throws DegenerateSupportError
  /// when the total mass is zero and std::invalid_argument on negatives.
  static Distribution from_weights(std::vector<double> weights);

  /// Stable exp-normalization of log weights; -inf marks zero probability.
  /// Throws DegenerateSupportError when every entry is -inf.
  static Distribution from_log_weights(const std::vector<double>& log_weights);

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  const std::vector<double>& weights() const { return w_; }

  std::size_t support_size() const;

  /// Draws one index with probability proportional to its weight. Linear
  /// scan; use Cdf for tight sampling loops.
  std::size_t sample(Rng& rng) const;

  bool operator==(const Distribution& other) const { return w_ == other.w_; }

 private:
  explicit Distribution(std::vector<double> normalized) : w_(std::move(normalized)) {}
  std::vector<double> w_;
};

/// Cumulative table for repeated sampling from one Distribution.
class Cdf {
 public:
  explicit Cdf(const Distribution& d);
  std::size_t sample(Rng& rng) const;

 private:
  std::vector<double> cum_;
};

}  // namespace specbeam
