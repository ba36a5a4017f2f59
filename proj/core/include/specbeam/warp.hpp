#pragma once

#include "specbeam/distribution.hpp"

#include <optional>

namespace specbeam {

/// Probability-mass concentration transform: optional top-k followed by
/// optional top-p (nucleus). An empty spec is the identity.
struct WarpSpec {
  std::optional<int> top_k;
  std::optional<double> top_p;

  bool is_identity() const { return !top_k && !top_p; }
};

/// Keeps the k largest entries (ties broken toward the lowest index), zeroes
/// the rest and renormalizes. Identity when k covers the whole support.
Distribution warp_top_k(const Distribution& d, int k);

/// Keeps the shortest descending-order prefix whose cumulative mass reaches
/// p (inclusive at exact equality), then renormalizes. p = 1 is the identity.
Distribution warp_top_p(const Distribution& d, double p);

/// Applies top-k then top-p.
Distribution apply_warp(const WarpSpec& spec, const Distribution& d);

/// Where a warp acts when a distribution spans several beams: on the
/// flattened joint vector (default) or per beam row before joint
/// renormalization. Exposed so the two readings can be measured against
/// each other.
enum class JointWarpMode { kFlattenedJoint, kPerBeam };

}  // namespace specbeam
