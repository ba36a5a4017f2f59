#include "specbeam/beam_ref.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace specbeam {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

}  // namespace

Distribution joint_from_rows(const std::vector<double>& beam_log_liks,
                             const std::vector<Distribution>& rows, int vocab,
                             const WarpSpec& warp, JointWarpMode mode) {
  const std::size_t width = beam_log_liks.size();
  std::vector<double> lw(width * static_cast<std::size_t>(vocab), kNegInf);
  for (std::size_t i = 0; i < width; ++i) {
    const Distribution row =
        mode == JointWarpMode::kPerBeam ? apply_warp(warp, rows[i]) : rows[i];
    for (int t = 0; t < vocab; ++t) {
      lw[joint_cell(static_cast<int>(i), t, vocab)] =
          beam_log_liks[i] + safe_log(row[static_cast<std::size_t>(t)]);
    }
  }
  Distribution joint = Distribution::from_log_weights(lw);
  if (mode == JointWarpMode::kFlattenedJoint) joint = apply_warp(warp, joint);
  return joint;
}

Distribution beam_step_distribution(const Model& model, const BeamSet& beams,
                                    const WarpSpec& warp, JointWarpMode mode,
                                    CallCounter* counter) {
  std::vector<TokenSeq> contexts;
  contexts.reserve(beams.width());
  for (const Beam& b : beams) contexts.push_back(b.tokens);
  const std::vector<Distribution> rows = batch_next_distributions(model, contexts, counter);

  std::vector<double> lls;
  lls.reserve(beams.width());
  for (const Beam& b : beams) lls.push_back(b.log_likelihood);
  return joint_from_rows(lls, rows, model.vocab().size, warp, mode);
}

BeamSet exact_beam_sample(const Model& model, const BeamSet& input, int width, int steps,
                          const WarpSpec& warp, Rng& rng, JointWarpMode mode,
                          CallCounter* counter) {
  if (width < 1) throw std::invalid_argument("exact_beam_sample: width must be >= 1");
  if (steps < 1) throw std::invalid_argument("exact_beam_sample: steps must be >= 1");

  const int vocab = model.vocab().size;
  BeamSet current = input;
  for (int step = 0; step < steps; ++step) {
    const Distribution joint = beam_step_distribution(model, current, warp, mode, counter);
    const Cdf cdf(joint);
    std::vector<Beam> next;
    next.reserve(static_cast<std::size_t>(width));
    for (int w = 0; w < width; ++w) {
      const JointIndex ji = joint_unflatten(cdf.sample(rng), vocab);
      const Beam& parent = current[static_cast<std::size_t>(ji.beam_index)];
      Beam child = parent;
      child.log_likelihood += model.log_next(parent.tokens, ji.token);
      child.tokens.push_back(ji.token);
      next.push_back(std::move(child));
    }
    current = BeamSet(std::move(next));
  }
  return current;
}

BeamSet deterministic_beam_search(const Model& model, const BeamSet& input, int width,
                                  int steps, const WarpSpec& warp, JointWarpMode mode,
                                  CallCounter* counter) {
  if (width < 1) throw std::invalid_argument("deterministic_beam_search: width must be >= 1");
  if (steps < 1) throw std::invalid_argument("deterministic_beam_search: steps must be >= 1");

  const int vocab = model.vocab().size;
  BeamSet current = input;
  for (int step = 0; step < steps; ++step) {
    const Distribution joint = beam_step_distribution(model, current, warp, mode, counter);
    std::vector<std::size_t> cells;
    cells.reserve(joint.size());
    for (std::size_t c = 0; c < joint.size(); ++c) {
      if (joint[c] > 0.0) cells.push_back(c);
    }
    std::stable_sort(cells.begin(), cells.end(),
                     [&joint](std::size_t a, std::size_t b) { return joint[a] > joint[b]; });
    if (cells.size() > static_cast<std::size_t>(width)) cells.resize(static_cast<std::size_t>(width));

    std::vector<Beam> next;
    next.reserve(cells.size());
    for (std::size_t cell : cells) {
      const JointIndex ji = joint_unflatten(cell, vocab);
      const Beam& parent = current[static_cast<std::size_t>(ji.beam_index)];
      Beam child = parent;
      child.log_likelihood += model.log_next(parent.tokens, ji.token);
      child.tokens.push_back(ji.token);
      next.push_back(std::move(child));
    }
    current = BeamSet(std::move(next));
  }
  return current;
}

Beam multinomial_sample(const Model& model, const TokenSeq& prefix, int steps,
                        const WarpSpec& warp, Rng& rng, CallCounter* counter) {
  if (steps < 1) throw std::invalid_argument("multinomial_sample: steps must be >= 1");
  Beam beam{prefix, 0.0};
  for (int s = 0; s < steps; ++s) {
    if (counter != nullptr) counter->calls += 1;
    const Distribution& row = model.next(beam.tokens);
    const Distribution warped = apply_warp(warp, row);
    const Token t = static_cast<Token>(warped.sample(rng));
    beam.log_likelihood += safe_log(row[static_cast<std::size_t>(t)]);
    beam.tokens.push_back(t);
  }
  return beam;
}

Distribution enumerate_step_oracle(const Model& model, const BeamSet& beams,
                                   const WarpSpec& warp, JointWarpMode mode,
                                   std::size_t conditioning_len) {
  const int vocab = model.vocab().size;
  const std::size_t cells = beams.width() * static_cast<std::size_t>(vocab);
  if (cells > 4096) throw std::invalid_argument("enumerate_step_oracle: W * |V| exceeds 4096");
  if (conditioning_len > beams.length()) {
    throw std::invalid_argument("enumerate_step_oracle: conditioning prefix exceeds beam length");
  }

  // Fresh likelihood evaluations conditioned on the shared prompt. With
  // conditioning_len = 0 the leading factor is included; it is common to all
  // beams and cancels in the joint normalization.
  std::vector<double> lls;
  std::vector<Distribution> rows;
  lls.reserve(beams.width());
  rows.reserve(beams.width());
  for (const Beam& b : beams) {
    const std::span<const Token> all(b.tokens);
    const auto prefix = all.first(conditioning_len);
    const auto continuation = all.subspan(conditioning_len);
    lls.push_back(continuation.empty() ? 0.0 : sequence_log_prob(model, prefix, continuation));
    rows.push_back(model.next(b.tokens));
  }
  return joint_from_rows(lls, rows, vocab, warp, mode);
}

}  // namespace specbeam
