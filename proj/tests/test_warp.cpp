#include "doctest.h"

#include "specbeam/rng.hpp"
#include "specbeam/warp.hpp"

#include <cmath>

using namespace specbeam;

namespace {

void check_close(const Distribution& d, const std::vector<double>& expect, double tol = 1e-12) {
  REQUIRE(d.size() == expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) {
    CHECK(d[i] == doctest::Approx(expect[i]).epsilon(tol));
  }
}

Distribution random_dist(Rng& rng, int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (double& x : w) x = rng.next_gamma(0.8);
  return Distribution::from_weights(std::move(w));
}

}  // namespace

TEST_CASE("warp_top_k examples") {
  const Distribution d = Distribution::from_weights({0.5, 0.3, 0.2});
  check_close(warp_top_k(d, 3), {0.5, 0.3, 0.2});
  check_close(warp_top_k(d, 2), {0.625, 0.375, 0.0});

  const Distribution tie = Distribution::from_weights({0.4, 0.4, 0.2});
  check_close(warp_top_k(tie, 1), {1.0, 0.0, 0.0});  // tie broken by lowest index

  CHECK_THROWS_AS(warp_top_k(d, 0), std::invalid_argument);
}

TEST_CASE("warp_top_k: k covering the support is the identity") {
  const Distribution d = Distribution::from_weights({0.7, 0.3, 0.0});
  CHECK(warp_top_k(d, 2).weights() == d.weights());
  CHECK(warp_top_k(d, 5).weights() == d.weights());
}

TEST_CASE("warp_top_p examples") {
  const Distribution d = Distribution::from_weights({0.6, 0.3, 0.1});
  CHECK(warp_top_p(d, 1.0).weights() == d.weights());
  check_close(warp_top_p(d, 0.8), {2.0 / 3.0, 1.0 / 3.0, 0.0});

  const Distribution boundary = Distribution::from_weights({0.5, 0.25, 0.25});
  check_close(warp_top_p(boundary, 0.5), {1.0, 0.0, 0.0});  // inclusive boundary

  CHECK_THROWS_AS(warp_top_p(d, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(warp_top_p(d, 1.5), std::invalid_argument);
}

TEST_CASE("apply_warp composes top-k then top-p") {
  Rng rng(5);
  const Distribution d = random_dist(rng, 6);

  CHECK(apply_warp(WarpSpec{}, d).weights() == d.weights());

  const WarpSpec spec{10, 0.8};
  const Distribution composed = apply_warp(spec, d);
  const Distribution manual = warp_top_p(warp_top_k(d, 10), 0.8);
  CHECK(composed.weights() == manual.weights());
  // k exceeds the vocab, so this equals plain top-p
  CHECK(composed.weights() == warp_top_p(d, 0.8).weights());
}

TEST_CASE("warp properties on random distributions") {
  Rng rng(42);
  for (int i = 0; i < 200; ++i) {
    const int n = 3 + static_cast<int>(rng.next_below(10));
    const Distribution d = random_dist(rng, n);
    WarpSpec spec;
    if (i % 3 != 0) spec.top_k = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    if (i % 2 == 0) spec.top_p = 0.3 + 0.7 * rng.next_double();

    const Distribution w = apply_warp(spec, d);

    // valid distribution
    double sum = 0.0;
    for (std::size_t c = 0; c < w.size(); ++c) {
      CHECK(w[c] >= 0.0);
      sum += w[c];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));

    // support containment and monotone mass
    for (std::size_t c = 0; c < w.size(); ++c) {
      if (w[c] > 0.0) {
        CHECK(d[c] > 0.0);
        CHECK(w[c] >= d[c] - 1e-15);
      }
    }
    if (spec.top_k) {
      const Distribution k_only = warp_top_k(d, *spec.top_k);
      for (std::size_t c = 0; c < w.size(); ++c) {
        if (w[c] > 0.0) CHECK(k_only[c] > 0.0);
      }
    }

    // top-k alone is idempotent
    if (spec.top_k) {
      const Distribution once = warp_top_k(d, *spec.top_k);
      CHECK(warp_top_k(once, *spec.top_k).weights() == once.weights());
    }
  }
}

TEST_CASE("warp_top_p is not idempotent after renormalization") {
  // Renormalizing lifts the kept entries, so a second application can keep a
  // strictly smaller prefix. Pinned counterexample:
  const Distribution d = Distribution::from_weights({0.49, 0.30, 0.21});
  const Distribution once = warp_top_p(d, 0.5);
  check_close(once, {0.49 / 0.79, 0.30 / 0.79, 0.0});
  const Distribution twice = warp_top_p(once, 0.5);
  check_close(twice, {1.0, 0.0, 0.0});
  CHECK(once.support_size() == 2);
  CHECK(twice.support_size() == 1);
}
