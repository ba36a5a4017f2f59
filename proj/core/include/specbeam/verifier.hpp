#pragma once

#include "specbeam/beam.hpp"
#include "specbeam/draft_forest.hpp"
#include "specbeam/width_policy.hpp"

#include <optional>
#include <vector>

namespace specbeam {

/// Direction of the acceptance ratio. kTargetOverDraft — accept with
/// probability min(1, p'(x) / q(x)) — is the form that reproduces the large
/// model's beam distribution and is used everywhere. kDraftOverTarget is the
/// inverted form, kept behind this switch so tests can demonstrate that it
/// skews the output distribution.
enum class AcceptRule { kTargetOverDraft, kDraftOverTarget };

/// norm(max(p' - q, 0)). Returns nullopt when the pre-normalization mass
/// falls below 1e-12 (p' <= q everywhere), in which case acceptance of the
/// preceding draft was certain and the caller treats rejection as a
/// float-noise event.
std::optional<Distribution> residual_update(const Distribution& p_prime,
                                            const std::vector<double>& q);

/// One draft candidate of a layer: its cell in the layer's joint index
/// space, the warped joint probability it was drafted at, and (inside a
/// forest) its node id.
struct LayerCandidate {
  std::size_t cell = 0;
  double q_prob = 0.0;
  int node = -1;
};

/// Optional instrumentation: the live p' before each examined candidate and
/// the accept decision, for reset-discipline checks.
struct LayerTrace {
  std::vector<Distribution> p_prime_before;
  std::vector<bool> accepted;
};

/// Result of verifying one layer: which candidates were accepted (in
/// examination order), plus the correction samples when the drafts fell
/// short of the target.
struct LayerOutcome {
  std::vector<int> accepted;  // indices into the candidate list
  std::optional<std::size_t> residual_cell;
  std::vector<std::size_t> fill_cells;
  bool layer_accepted = false;
  int target_width = 0;
  int degenerate_residual_hits = 0;
};

/// Sequential accept/reject of a layer's candidates against the target
/// joint. Accepting resets p' to p_joint; rejecting subtracts the draft
/// joint from p' and renormalizes. Once the target is reached the remaining
/// candidates are rejected. If the drafts fall short, one beam is sampled
/// from the evolved p' and the remainder from p_joint, and the layer is
/// reported as not accepted (it becomes the last layer of the iteration).
LayerOutcome verify_layer(const std::vector<LayerCandidate>& candidates,
                          const Distribution& p_joint, const std::vector<double>& q_joint,
                          int target_width, Rng& rng,
                          AcceptRule rule = AcceptRule::kTargetOverDraft,
                          LayerTrace* trace = nullptr);

/// Policy knobs for a verification pass. fixed_target bypasses the dynamic
/// width computation (used by the single-output baseline mode).
struct PolicyParams {
  double threshold = 0.7;
  int w_min = 1;
  std::optional<int> fixed_target;
  AcceptRule rule = AcceptRule::kTargetOverDraft;
};

/// An output beam of one verified iteration.
struct VerifiedBeam {
  TokenSeq tokens;
  double large_log_lik = 0.0;
  int node = -1;         // forest node id for accepted drafts, -1 for fresh samples
  int parent_node = -1;  // the node this beam extends
  Token token = -1;      // the new token
  int layer = 0;
  enum class Source { kDraft, kResidual, kFill, kBonus };
  Source source = Source::kDraft;
};

/// Cache-lineage anchor of an output beam: itself for accepted drafts, the
/// parent it extends for fresh samples.
inline int lineage_anchor(const VerifiedBeam& b) { return b.node >= 0 ? b.node : b.parent_node; }

/// Per produced layer: the width decision that governed it and what the
/// drafts delivered. Bonus layers carry no decision statistics.
struct LayerReport {
  WidthDecision decision;
  int candidate_count = 0;
  int accepted_from_drafts = 0;
  bool accepted = false;
  bool is_bonus = false;
};

struct VerificationResult {
  int l_last = 0;
  std::vector<VerifiedBeam> outputs;
  std::vector<LayerReport> layers;  // one per produced layer, bonus included
  LineageInfo lineages;
};

/// Verifies a draft forest against the large model: one batched model call
/// over all forest nodes (DFS-linearized trees with topology masks), then
/// layer-by-layer width decisions and accept/reject. Prunes candidates whose
/// parents were rejected, stops at the first short layer, and samples a full
/// bonus layer when every draft layer is accepted. Marks rejected nodes in
/// the forest.
VerificationResult run_verification(DraftForest& forest, const Model& large,
                                    const BeamSet& input_large, const WarpSpec& warp,
                                    const PolicyParams& policy, Rng& rng,
                                    CallCounter* counter = nullptr,
                                    JointWarpMode mode = JointWarpMode::kFlattenedJoint);

}  // namespace specbeam
