#include "specbeam/warp.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace specbeam {

namespace {

// Indices sorted by weight descending, ties by lowest index.
std::vector<std::size_t> descending_order(const Distribution& d) {
  std::vector<std::size_t> idx(d.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::stable_sort(idx.begin(), idx.end(),
                   [&d](std::size_t a, std::size_t b) { return d[a] > d[b]; });
  return idx;
}

}  // namespace

Distribution warp_top_k(const Distribution& d, int k) {
  if (k < 1) throw std::invalid_argument("warp_top_k: k must be >= 1");
  if (static_cast<std::size_t>(k) >= d.support_size()) return d;

  const auto order = descending_order(d);
  std::vector<double> kept(d.size(), 0.0);
  for (int i = 0; i < k; ++i) kept[order[static_cast<std::size_t>(i)]] = d[order[static_cast<std::size_t>(i)]];
  return Distribution::from_weights(std::move(kept));
}

Distribution warp_top_p(const Distribution& d, double p) {
  if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("warp_top_p: p must be in (0, 1]");
  if (p >= 1.0) return d;

  const auto order = descending_order(d);
  std::vector<double> kept(d.size(), 0.0);
  double cum = 0.0;
  for (std::size_t i : order) {
    if (d[i] <= 0.0) break;
    kept[i] = d[i];
    cum += d[i];
    if (cum >= p) break;
  }
  return Distribution::from_weights(std::move(kept));
}

Distribution apply_warp(const WarpSpec& spec, const Distribution& d) {
  Distribution out = d;
  if (spec.top_k) out = warp_top_k(out, *spec.top_k);
  if (spec.top_p) out = warp_top_p(out, *spec.top_p);
  return out;
}

}  // namespace specbeam
