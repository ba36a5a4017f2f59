#pragma once

#include "specbeam/beam.hpp"
#include "specbeam/model.hpp"
#include "specbeam/warp.hpp"

namespace specbeam {

/// Assembles a warped joint over (beam, token) cells from per-beam
/// log-likelihoods and conditional rows. In flattened mode the warp acts on
/// the normalized joint vector; in per-beam mode each row is warped before
/// joint normalization. Throws DegenerateSupportError on zero total mass.
Distribution joint_from_rows(const std::vector<double>& beam_log_liks,
                             const std::vector<Distribution>& rows, int vocab,
                             const WarpSpec& warp,
                             JointWarpMode mode = JointWarpMode::kFlattenedJoint);

/// The joint step distribution over (beam, token) cells: each cell's weight
/// is the beam's likelihood times the model's conditional, jointly
/// normalized and then warped. Computed in log domain, one model row per
/// beam (one batched call). Throws DegenerateSupportError when every cell
/// has zero mass.
Distribution beam_step_distribution(const Model& model, const BeamSet& beams,
                                    const WarpSpec& warp,
                                    JointWarpMode mode = JointWarpMode::kFlattenedJoint,
                                    CallCounter* counter = nullptr);

/// Stochastic beam decoding: at each step samples `width` joint cells
/// independently with replacement from the warped joint and extends the
/// matching beams, updating likelihoods incrementally.
BeamSet exact_beam_sample(const Model& model, const BeamSet& input, int width, int steps,
                          const WarpSpec& warp, Rng& rng,
                          JointWarpMode mode = JointWarpMode::kFlattenedJoint,
                          CallCounter* counter = nullptr);

/// Autoregressive sampling from the warped conditional, one token per step.
Beam multinomial_sample(const Model& model, const TokenSeq& prefix, int steps,
                        const WarpSpec& warp, Rng& rng, CallCounter* counter = nullptr);

/// Deterministic top-W beam search baseline: at each step keeps the `width`
/// highest-probability cells of the warped joint (ties toward the lowest
/// cell index, no replacement). Kept as an unverified baseline; the
/// distribution-matching machinery targets stochastic beam sampling. When a
/// warp leaves fewer than `width` cells, the surviving support decides the
/// width.
BeamSet deterministic_beam_search(const Model& model, const BeamSet& input, int width,
                                  int steps, const WarpSpec& warp,
                                  JointWarpMode mode = JointWarpMode::kFlattenedJoint,
                                  CallCounter* counter = nullptr);

/// Test oracle: the same object as beam_step_distribution, but built by
/// direct enumeration with fresh likelihood evaluations (no incremental
/// reuse). conditioning_len marks the shared prompt whose probability is the
/// conditioning event, exactly as the beams' stored likelihoods treat it.
/// Capped at width * vocab <= 4096 cells.
Distribution enumerate_step_oracle(const Model& model, const BeamSet& beams,
                                   const WarpSpec& warp,
                                   JointWarpMode mode = JointWarpMode::kFlattenedJoint,
                                   std::size_t conditioning_len = 0);

}  // namespace specbeam
