#include "doctest.h"

#include "specbeam/verifier.hpp"
#include "specbeam/beam_ref.hpp"
#include "specbeam/stats.hpp"

#include <cmath>

using namespace specbeam;

namespace {

Distribution random_dist(Rng& rng, int n, double conc = 0.8) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (double& x : w) x = rng.next_gamma(conc);
  return Distribution::from_weights(std::move(w));
}

BeamSet relikelihood(const Model& m, const TokenSeq& prompt, const BeamSet& beams) {
  std::vector<Beam> out;
  for (const Beam& b : beams) {
    const std::span<const Token> cont = std::span<const Token>(b.tokens).subspan(prompt.size());
    out.push_back(Beam{b.tokens, cont.empty() ? 0.0 : sequence_log_prob(m, prompt, cont)});
  }
  return BeamSet(std::move(out));
}

}  // namespace

TEST_CASE("residual_update: disjoint support leaves p-prime unchanged") {
  const Distribution p = Distribution::from_weights({0.5, 0.5, 0.0});
  const std::vector<double> q{0.0, 0.0, 1.0};
  const auto r = residual_update(p, q);
  REQUIRE(r.has_value());
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK((*r)[i] == doctest::Approx(p[i]).epsilon(1e-12));
  }
}

TEST_CASE("residual_update: arithmetic example") {
  const Distribution p = Distribution::from_weights({0.5, 0.5, 0.0});
  const std::vector<double> q{0.5, 0.25, 0.25};
  const auto r = residual_update(p, q);
  REQUIRE(r.has_value());
  CHECK((*r)[0] == doctest::Approx(0.0));
  CHECK((*r)[1] == doctest::Approx(1.0));
  CHECK((*r)[2] == doctest::Approx(0.0));
}

TEST_CASE("residual_update: degenerate marker when p-prime <= q everywhere") {
  const Distribution p = Distribution::from_weights({0.4, 0.6});
  CHECK_FALSE(residual_update(p, p.weights()).has_value());
  CHECK_THROWS_AS(residual_update(p, std::vector<double>{0.5}), std::invalid_argument);
}

TEST_CASE("residual_update: iterated chain matches acceptance_alphas bit for bit") {
  Rng rng(91);
  const Distribution p = random_dist(rng, 8);
  const Distribution q = random_dist(rng, 8);
  std::vector<Distribution> chain;
  acceptance_alphas(p, q.weights(), 4, &chain);

  Distribution cur = p;
  for (std::size_t j = 0; j < chain.size(); ++j) {
    CHECK(cur.weights() == chain[j].weights());
    const auto next = residual_update(cur, q.weights());
    if (!next) break;
    cur = *next;
  }
}

TEST_CASE("verify_layer: aligned pair accepts up to the cutoff") {
  const Distribution p = Distribution::from_weights({0.4, 0.3, 0.2, 0.1});
  std::vector<LayerCandidate> candidates{{0, 0.4, -1}, {1, 0.3, -1}, {2, 0.2, -1}};
  Rng rng(92);
  const LayerOutcome out = verify_layer(candidates, p, p.weights(), 2, rng);
  CHECK(out.layer_accepted);
  CHECK(out.accepted == std::vector<int>{0, 1});  // third rejected by cutoff
  CHECK_FALSE(out.residual_cell.has_value());
  CHECK(out.fill_cells.empty());
  CHECK(out.degenerate_residual_hits == 0);
}

TEST_CASE("verify_layer: zero-mass candidates are all rejected and corrected") {
  // p-prime is zero at every draft cell
  const Distribution p = Distribution::from_weights({0.0, 0.0, 0.6, 0.4});
  const std::vector<double> q{0.5, 0.5, 0.0, 0.0};
  std::vector<LayerCandidate> candidates{{0, 0.5, -1}, {1, 0.5, -1}, {0, 0.5, -1}};
  Rng rng(93);
  const LayerOutcome out = verify_layer(candidates, p, q, 2, rng);
  CHECK_FALSE(out.layer_accepted);
  CHECK(out.accepted.empty());
  REQUIRE(out.residual_cell.has_value());
  CHECK(*out.residual_cell >= 2);  // sampled from p's support
  CHECK(out.fill_cells.size() == 1);
  CHECK(out.fill_cells[0] >= 2);
}

TEST_CASE("verify_layer: exact exhaustion still counts as accepted") {
  const Distribution p = Distribution::from_weights({0.5, 0.5});
  std::vector<LayerCandidate> candidates{{0, 0.5, -1}, {1, 0.5, -1}};
  Rng rng(94);
  const LayerOutcome out = verify_layer(candidates, p, p.weights(), 2, rng);
  CHECK(out.layer_accepted);
  CHECK(out.accepted.size() == 2);
}

TEST_CASE("verify_layer: p-prime resets to the layer joint after each acceptance") {
  Rng rng(95);
  const Distribution p = random_dist(rng, 6);
  const Distribution q = random_dist(rng, 6);
  const Cdf q_cdf(q);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<LayerCandidate> candidates;
    for (int d = 0; d < 4; ++d) {
      const std::size_t cell = q_cdf.sample(rng);
      candidates.push_back(LayerCandidate{cell, q[cell], -1});
    }
    LayerTrace trace;
    verify_layer(candidates, p, q.weights(), 3, rng, AcceptRule::kTargetOverDraft, &trace);
    CHECK(trace.p_prime_before[0].weights() == p.weights());
    for (std::size_t i = 1; i < trace.p_prime_before.size(); ++i) {
      if (trace.accepted[i - 1]) {
        CHECK(trace.p_prime_before[i].weights() == p.weights());
      }
    }
  }
}

TEST_CASE("verify_layer: rejects invalid inputs") {
  const Distribution p = Distribution::from_weights({0.5, 0.5});
  Rng rng(96);
  CHECK_THROWS_AS(verify_layer({}, p, p.weights(), 0, rng), std::invalid_argument);
  CHECK_THROWS_AS(verify_layer({LayerCandidate{0, 0.0, -1}}, p, p.weights(), 1, rng),
                  std::invalid_argument);
}

TEST_CASE("run_verification: identical models accept every layer") {
  const ModelPair pair = make_model_pair(97, Vocabulary{5, {}}, 1, 0.0);
  const TokenSeq prompt{0, 1};
  PolicyParams policy;
  policy.threshold = 1.0;
  policy.w_min = 3;
  for (int trial = 0; trial < 50; ++trial) {
    Rng rng(1000 + static_cast<std::uint64_t>(trial));
    const BeamSet input({Beam{prompt, 0.0}});
    DraftForest forest = grow_draft_forest(pair.small, input, 3, 3, WarpSpec{10, 0.8}, rng);
    CallCounter counter;
    const VerificationResult vr =
        run_verification(forest, pair.large, input, WarpSpec{10, 0.8}, policy, rng, &counter);
    CHECK(vr.l_last == 4);  // gamma + 1
    CHECK(counter.calls == 1);
    CHECK(vr.outputs.size() == 3);
    for (const VerifiedBeam& b : vr.outputs) {
      CHECK(b.source == VerifiedBeam::Source::kBonus);
    }
  }
}

TEST_CASE("run_verification: gamma 1 reduces to one layer plus the bonus logic") {
  const ModelPair pair = make_model_pair(98, Vocabulary{5, {}}, 1, 0.4);
  const TokenSeq prompt{2};
  PolicyParams policy;
  policy.threshold = 0.7;
  policy.w_min = 1;
  Rng rng(99);
  const BeamSet input({Beam{prompt, 0.0}});
  DraftForest forest = grow_draft_forest(pair.small, input, 3, 1, WarpSpec{}, rng);
  CallCounter counter;
  const VerificationResult vr =
      run_verification(forest, pair.large, input, WarpSpec{}, policy, rng, &counter);
  CHECK(counter.calls == 1);
  CHECK(vr.l_last >= 1);
  CHECK(vr.l_last <= 2);
  CHECK(vr.outputs.size() ==
        static_cast<std::size_t>(vr.layers.back().decision.target_width));
}

TEST_CASE("run_verification: output parent chains contain no rejected nodes") {
  const ModelPair pair = make_model_pair(101, Vocabulary{6, {}}, 1, 0.5);
  const TokenSeq prompt{0};
  PolicyParams policy;
  policy.threshold = 0.7;
  policy.w_min = 2;
  for (int trial = 0; trial < 30; ++trial) {
    Rng rng(2000 + static_cast<std::uint64_t>(trial));
    const BeamSet input({Beam{prompt, 0.0}});
    DraftForest forest = grow_draft_forest(pair.small, input, 4, 3, WarpSpec{10, 0.8}, rng);
    const VerificationResult vr =
        run_verification(forest, pair.large, input, WarpSpec{10, 0.8}, policy, rng);
    CHECK(vr.outputs.size() ==
          static_cast<std::size_t>(vr.layers.back().decision.target_width));
    for (const VerifiedBeam& b : vr.outputs) {
      int cur = b.node >= 0 ? forest.node(b.node).parent : b.parent_node;
      while (cur != -1) {
        CHECK_FALSE(forest.node(cur).rejected);
        cur = forest.node(cur).parent;
      }
    }
    // large log-likelihoods match recomputation from scratch
    for (const VerifiedBeam& b : vr.outputs) {
      const std::span<const Token> cont = std::span<const Token>(b.tokens).subspan(prompt.size());
      CHECK(std::abs(b.large_log_lik - sequence_log_prob(pair.large, prompt, cont)) <= 1e-9);
    }
  }
}

TEST_CASE("run_verification: rejects mismatched input beams") {
  const ModelPair pair = make_model_pair(103, Vocabulary{4, {}}, 1, 0.2);
  Rng rng(104);
  const BeamSet input({Beam{TokenSeq{0}, 0.0}});
  DraftForest forest = grow_draft_forest(pair.small, input, 2, 1, WarpSpec{}, rng);
  const BeamSet other({Beam{TokenSeq{1}, 0.0}});
  PolicyParams policy;
  CHECK_THROWS_AS(run_verification(forest, pair.large, other, WarpSpec{}, policy, rng),
                  std::invalid_argument);
}

TEST_CASE("verify_layer: single-layer outputs follow the target joint") {
  // Small statistical check of the distribution; the full-tolerance version
  // runs in the acceptance suite.
  const ModelPair pair = make_model_pair(105, Vocabulary{4, {}}, 1, 0.3);
  const TokenSeq prompt{0};
  Rng setup_rng(106);
  const BeamSet base = exact_beam_sample(pair.large, BeamSet({Beam{prompt, 0.0}}), 2, 2,
                                         WarpSpec{}, setup_rng);
  const BeamSet large_beams = relikelihood(pair.large, prompt, base);
  const BeamSet small_beams = relikelihood(pair.small, prompt, base);
  const Distribution p_joint = beam_step_distribution(pair.large, large_beams, WarpSpec{});
  const Distribution p_exact = enumerate_step_oracle(pair.large, large_beams, WarpSpec{});
  const Distribution q_joint = beam_step_distribution(pair.small, small_beams, WarpSpec{});
  const Cdf q_cdf(q_joint);

  const int trials = 20000;
  std::vector<std::uint64_t> counts(p_exact.size(), 0);
  Rng rng(107);
  for (int t = 0; t < trials; ++t) {
    std::vector<LayerCandidate> candidates;
    for (int d = 0; d < 3; ++d) {
      const std::size_t cell = q_cdf.sample(rng);
      candidates.push_back(LayerCandidate{cell, q_joint[cell], -1});
    }
    const LayerOutcome out = verify_layer(candidates, p_joint, q_joint.weights(), 2, rng);
    std::size_t first;
    if (!out.accepted.empty()) {
      first = candidates[static_cast<std::size_t>(out.accepted[0])].cell;
    } else {
      first = *out.residual_cell;
    }
    counts[first] += 1;
  }
  const MatchResult match = distribution_match_test(counts, p_exact, 0.03, 10000);
  CHECK(match.pass);
}
