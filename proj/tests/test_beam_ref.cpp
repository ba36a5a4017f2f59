#include "doctest.h"

#include "specbeam/beam_ref.hpp"
#include "specbeam/stats.hpp"

#include <cmath>
#include <map>

using namespace specbeam;

namespace {

Model uniform_model(int vocab, int order) {
  std::size_t rows = 1;
  for (int i = 0; i < order; ++i) rows *= static_cast<std::size_t>(vocab);
  std::vector<Distribution> table(
      rows, Distribution::from_weights(std::vector<double>(static_cast<std::size_t>(vocab), 1.0)));
  return Model(Vocabulary{vocab, {}}, order, std::move(table));
}

BeamSet beams_with_lls(const Model& m, const TokenSeq& prompt, std::vector<TokenSeq> suffixes) {
  std::vector<Beam> beams;
  for (TokenSeq& s : suffixes) {
    TokenSeq tokens = prompt;
    tokens.insert(tokens.end(), s.begin(), s.end());
    const double ll = s.empty() ? 0.0 : sequence_log_prob(m, prompt, s);
    beams.push_back(Beam{std::move(tokens), ll});
  }
  return BeamSet(std::move(beams));
}

}  // namespace

TEST_CASE("beam_step_distribution: single beam reduces to the conditional") {
  const Model m = make_markov_model(31, Vocabulary{5, {}}, 1, 0.9);
  const BeamSet beams({Beam{TokenSeq{2, 4}, -1.7}});  // prefix likelihood cancels
  const Distribution joint = beam_step_distribution(m, beams, WarpSpec{});
  const Distribution& row = m.next(TokenSeq{2, 4});
  REQUIRE(joint.size() == row.size());
  for (std::size_t t = 0; t < row.size(); ++t) {
    CHECK(joint[t] == doctest::Approx(row[t]).epsilon(1e-12));
  }
}

TEST_CASE("beam_step_distribution: symmetric beams over uniform rows are uniform") {
  const Model m = uniform_model(4, 0);
  const BeamSet beams({Beam{TokenSeq{0}, -2.0}, Beam{TokenSeq{1}, -2.0}});
  const Distribution joint = beam_step_distribution(m, beams, WarpSpec{});
  for (std::size_t c = 0; c < joint.size(); ++c) {
    CHECK(joint[c] == doctest::Approx(1.0 / 8.0).epsilon(1e-12));
  }
}

TEST_CASE("beam_step_distribution: matches the enumeration oracle") {
  for (int i = 0; i < 10; ++i) {
    const Model m = make_markov_model(300 + static_cast<std::uint64_t>(i),
                                      Vocabulary{4 + (i % 3), {}}, 1, 0.8);
    Rng rng(17 + static_cast<std::uint64_t>(i));
    const TokenSeq prompt{0};
    const BeamSet beams =
        exact_beam_sample(m, BeamSet({Beam{prompt, 0.0}}), 2, 2, WarpSpec{}, rng);
    WarpSpec warp;
    if (i % 2 == 0) warp.top_p = 0.85;
    const Distribution impl = beam_step_distribution(m, beams, warp);
    const Distribution oracle =
        enumerate_step_oracle(m, beams, warp, JointWarpMode::kFlattenedJoint, prompt.size());
    REQUIRE(impl.size() == oracle.size());
    for (std::size_t c = 0; c < impl.size(); ++c) {
      CHECK(std::abs(impl[c] - oracle[c]) <= 1e-9);
    }
  }
}

TEST_CASE("beam_step_distribution: degenerate joint mass is an error") {
  const Model m = make_markov_model(3, Vocabulary{4, {}}, 0, 1.0);
  const double neg_inf = -std::numeric_limits<double>::infinity();
  const BeamSet beams({Beam{TokenSeq{0}, neg_inf}});
  CHECK_THROWS_AS(beam_step_distribution(m, beams, WarpSpec{}), DegenerateSupportError);
}

TEST_CASE("enumerate_step_oracle: size cap and trivial cases") {
  const Model m = uniform_model(4, 0);
  const BeamSet one({Beam{TokenSeq{1}, 0.0}});
  const Distribution d = enumerate_step_oracle(m, one, WarpSpec{});
  for (std::size_t t = 0; t < d.size(); ++t) CHECK(d[t] == doctest::Approx(0.25));

  WarpSpec greedy;
  greedy.top_k = 1;
  const Distribution g = enumerate_step_oracle(m, one, greedy);
  CHECK(g.support_size() == 1);
  CHECK(g[0] == doctest::Approx(1.0));

  std::vector<Beam> wide(40, Beam{TokenSeq{0}, 0.0});
  // 40 beams with a 4096-cell budget: 40 * 4 = 160 is fine, but a large
  // vocabulary pushes past the cap.
  const Model big = uniform_model(128, 0);
  std::vector<Beam> too_many(33, Beam{TokenSeq{0}, 0.0});
  CHECK_THROWS_AS(enumerate_step_oracle(big, BeamSet(too_many), WarpSpec{}),
                  std::invalid_argument);
}

TEST_CASE("exact_beam_sample: width 1 matches multinomial sampling in distribution") {
  const Model m = make_markov_model(77, Vocabulary{4, {}}, 1, 0.9);
  const TokenSeq prompt{1};
  const int trials = 100000;

  std::map<TokenSeq, int> beam_counts, multi_counts;
  Rng seeder(5);
  for (int t = 0; t < trials; ++t) {
    Rng r1 = seeder.child(2 * static_cast<std::uint64_t>(t));
    Rng r2 = seeder.child(2 * static_cast<std::uint64_t>(t) + 1);
    const BeamSet out = exact_beam_sample(m, BeamSet({Beam{prompt, 0.0}}), 1, 2, WarpSpec{}, r1);
    beam_counts[out[0].tokens] += 1;
    multi_counts[multinomial_sample(m, prompt, 2, WarpSpec{}, r2).tokens] += 1;
  }
  double tv = 0.0;
  for (Token a = 0; a < 4; ++a) {
    for (Token b = 0; b < 4; ++b) {
      const TokenSeq key{1, a, b};
      const double pa = beam_counts.count(key) ? beam_counts[key] / double(trials) : 0.0;
      const double pb = multi_counts.count(key) ? multi_counts[key] / double(trials) : 0.0;
      tv += std::abs(pa - pb);
    }
  }
  CHECK(tv / 2.0 < 0.01);
}

TEST_CASE("exact_beam_sample: greedy warp with width 1 is deterministic decoding") {
  const Model m = make_markov_model(9, Vocabulary{5, {}}, 1, 0.6);
  WarpSpec greedy;
  greedy.top_k = 1;
  Rng r1(1), r2(2);
  const BeamSet a = exact_beam_sample(m, BeamSet({Beam{TokenSeq{0}, 0.0}}), 1, 4, greedy, r1);
  const BeamSet b = exact_beam_sample(m, BeamSet({Beam{TokenSeq{0}, 0.0}}), 1, 4, greedy, r2);
  CHECK(a[0].tokens == b[0].tokens);  // independent of the rng

  // and it is the argmax chain
  TokenSeq ctx{0};
  for (int step = 0; step < 4; ++step) {
    const Distribution& row = m.next(ctx);
    Token best = 0;
    for (Token t = 1; t < 5; ++t) {
      if (row[static_cast<std::size_t>(t)] > row[static_cast<std::size_t>(best)]) best = t;
    }
    ctx.push_back(best);
  }
  CHECK(a[0].tokens == ctx);
}

TEST_CASE("exact_beam_sample: fixed seed reproduces the beam set") {
  const Model m = make_markov_model(11, Vocabulary{6, {}}, 1, 1.0);
  Rng r1(33), r2(33);
  const BeamSet a =
      exact_beam_sample(m, BeamSet({Beam{TokenSeq{2}, 0.0}}), 3, 5, WarpSpec{10, 0.8}, r1);
  const BeamSet b =
      exact_beam_sample(m, BeamSet({Beam{TokenSeq{2}, 0.0}}), 3, 5, WarpSpec{10, 0.8}, r2);
  REQUIRE(a.width() == b.width());
  for (std::size_t i = 0; i < a.width(); ++i) {
    CHECK(a[i].tokens == b[i].tokens);
    CHECK(a[i].log_likelihood == b[i].log_likelihood);
  }
}

TEST_CASE("exact_beam_sample: likelihood bookkeeping matches recomputation") {
  const Model m = make_markov_model(47, Vocabulary{5, {}}, 2, 0.8);
  Rng rng(4);
  const TokenSeq prompt{1, 3};
  const BeamSet out =
      exact_beam_sample(m, BeamSet({Beam{prompt, 0.0}}), 4, 6, WarpSpec{10, 0.8}, rng);
  for (const Beam& b : out) {
    const std::span<const Token> cont = std::span<const Token>(b.tokens).subspan(prompt.size());
    CHECK(std::abs(b.log_likelihood - sequence_log_prob(m, prompt, cont)) <= 1e-9);
  }
}

TEST_CASE("multinomial_sample: uniform frequencies within 3 sigma") {
  const Model m = uniform_model(4, 0);
  const int trials = 100000;
  std::vector<int> counts(4, 0);
  Rng seeder(21);
  for (int t = 0; t < trials; ++t) {
    Rng r = seeder.child(static_cast<std::uint64_t>(t));
    const Beam b = multinomial_sample(m, TokenSeq{0}, 1, WarpSpec{}, r);
    counts[static_cast<std::size_t>(b.tokens.back())] += 1;
  }
  const double p = 0.25;
  const double sigma = std::sqrt(p * (1 - p) * trials);
  for (int c : counts) {
    CHECK(std::abs(c - p * trials) <= 3.0 * sigma);
  }
}

TEST_CASE("multinomial_sample: steps=1 draws from the warped first conditional") {
  const Model m = make_markov_model(61, Vocabulary{6, {}}, 1, 0.7);
  WarpSpec greedy;
  greedy.top_k = 1;
  Rng rng(7);
  const Beam b = multinomial_sample(m, TokenSeq{4}, 1, greedy, rng);
  REQUIRE(b.tokens.size() == 2);
  const Distribution warped = apply_warp(greedy, m.next(TokenSeq{4}));
  CHECK(warped[static_cast<std::size_t>(b.tokens.back())] == doctest::Approx(1.0));
  // log-likelihood is the raw (unwarped) conditional
  CHECK(b.log_likelihood ==
        doctest::Approx(std::log(m.next(TokenSeq{4})[static_cast<std::size_t>(b.tokens.back())])));
}

TEST_CASE("deterministic_beam_search: top-W selection, rng-free") {
  const Model m = make_markov_model(67, Vocabulary{5, {}}, 1, 0.7);
  const BeamSet start({Beam{TokenSeq{0}, 0.0}});
  const BeamSet a = deterministic_beam_search(m, start, 2, 3, WarpSpec{});
  const BeamSet b = deterministic_beam_search(m, start, 2, 3, WarpSpec{});
  REQUIRE(a.width() == 2);
  for (std::size_t i = 0; i < a.width(); ++i) CHECK(a[i].tokens == b[i].tokens);

  // one step by hand: the two largest joint cells in order
  const Distribution joint = beam_step_distribution(m, start, WarpSpec{});
  const BeamSet one = deterministic_beam_search(m, start, 2, 1, WarpSpec{});
  CHECK(joint[static_cast<std::size_t>(one[0].tokens.back())] >=
        joint[static_cast<std::size_t>(one[1].tokens.back())]);

  // a greedy warp narrows the surviving width to its support
  WarpSpec greedy;
  greedy.top_k = 1;
  const BeamSet narrow = deterministic_beam_search(m, start, 3, 2, greedy);
  CHECK(narrow.width() == 1);
}

TEST_CASE("beam_step_distribution: per-beam warp differs from flattened joint warp") {
  const Model m = make_markov_model(83, Vocabulary{6, {}}, 1, 0.5);
  Rng rng(9);
  const BeamSet beams = beams_with_lls(m, TokenSeq{0}, {{1, 2}, {3, 4}});
  const WarpSpec warp{2, 0.9};
  const Distribution flat =
      beam_step_distribution(m, beams, warp, JointWarpMode::kFlattenedJoint);
  const Distribution per_beam = beam_step_distribution(m, beams, warp, JointWarpMode::kPerBeam);
  CHECK(flat.weights() != per_beam.weights());
  // identical when the warp is the identity
  const Distribution f0 = beam_step_distribution(m, beams, WarpSpec{}, JointWarpMode::kFlattenedJoint);
  const Distribution p0 = beam_step_distribution(m, beams, WarpSpec{}, JointWarpMode::kPerBeam);
  CHECK(f0.weights() == p0.weights());
}
