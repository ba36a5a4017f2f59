#include "specbeam/verifier.hpp"

#include "specbeam/beam_ref.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace specbeam {

namespace {
constexpr double kDegenerateMass = 1e-12;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }
}  // namespace

std::optional<Distribution> residual_update(const Distribution& p_prime,
                                            const std::vector<double>& q) {
  if (q.size() != p_prime.size()) {
    throw std::invalid_argument("residual_update: index set mismatch");
  }
  std::vector<double> residual(q.size());
  double mass = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    residual[i] = std::max(p_prime[i] - q[i], 0.0);
    mass += residual[i];
  }
  if (mass < kDegenerateMass) return std::nullopt;
  return Distribution::from_weights(std::move(residual));
}

LayerOutcome verify_layer(const std::vector<LayerCandidate>& candidates,
                          const Distribution& p_joint, const std::vector<double>& q_joint,
                          int target_width, Rng& rng, AcceptRule rule, LayerTrace* trace) {
  if (target_width < 1) throw std::invalid_argument("verify_layer: target width must be >= 1");
  if (q_joint.size() != p_joint.size()) {
    throw std::invalid_argument("verify_layer: index set mismatch");
  }

  LayerOutcome out;
  out.target_width = target_width;

  Distribution p_prime = p_joint;
  for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
    if (static_cast<int>(out.accepted.size()) == target_width) break;  // reject remaining
    const LayerCandidate& cand = candidates[ci];
    if (!(cand.q_prob > 0.0)) {
      throw std::invalid_argument("verify_layer: candidate with zero draft probability");
    }
    if (trace != nullptr) trace->p_prime_before.push_back(p_prime);

    const double p_val = p_prime[cand.cell];
    double ratio;
    if (rule == AcceptRule::kTargetOverDraft) {
      ratio = std::min(1.0, p_val / cand.q_prob);
    } else {
      ratio = p_val > 0.0 ? std::min(1.0, cand.q_prob / p_val) : 1.0;
    }

    const bool accept = rng.next_double() < ratio;
    if (trace != nullptr) trace->accepted.push_back(accept);
    if (accept) {
      out.accepted.push_back(static_cast<int>(ci));
      p_prime = p_joint;
    } else {
      auto residual = residual_update(p_prime, q_joint);
      if (!residual) {
        // Rejection despite a degenerate residual is a float-noise event:
        // acceptance was certain, so restart from the layer joint.
        out.degenerate_residual_hits += 1;
        p_prime = p_joint;
      } else {
        p_prime = std::move(*residual);
      }
    }
  }

  out.layer_accepted = static_cast<int>(out.accepted.size()) == target_width;
  if (!out.layer_accepted) {
    out.residual_cell = p_prime.sample(rng);
    const Cdf p_cdf(p_joint);
    while (static_cast<int>(out.accepted.size()) + 1 +
               static_cast<int>(out.fill_cells.size()) < target_width) {
      out.fill_cells.push_back(p_cdf.sample(rng));
    }
  }
  return out;
}

VerificationResult run_verification(DraftForest& forest, const Model& large,
                                    const BeamSet& input_large, const WarpSpec& warp,
                                    const PolicyParams& policy, Rng& rng,
                                    CallCounter* counter, JointWarpMode mode) {
  const int vocab = large.vocab().size;
  const int gamma = forest.gamma();
  if (input_large.width() != forest.input().width()) {
    throw std::invalid_argument("run_verification: input beams do not match the forest roots");
  }
  for (std::size_t i = 0; i < input_large.width(); ++i) {
    if (input_large[i].tokens != forest.input()[i].tokens) {
      throw std::invalid_argument("run_verification: input beams do not match the forest roots");
    }
  }

  // One batched large-model call over every forest node, assembled from the
  // DFS linearization and topology mask of each tree.
  const std::size_t n_nodes = forest.nodes().size();
  std::vector<int> batch_node_ids;
  std::vector<TokenSeq> batch_contexts;
  batch_node_ids.reserve(n_nodes);
  batch_contexts.reserve(n_nodes);
  for (int root_id : forest.layer(0)) {
    const TopologyMask tm = topology_mask(forest, root_id);
    std::vector<TokenSeq> contexts = masked_contexts(forest, tm);
    for (std::size_t i = 0; i < tm.dfs_order.size(); ++i) {
      batch_node_ids.push_back(tm.dfs_order[i]);
      batch_contexts.push_back(std::move(contexts[i]));
    }
  }
  std::vector<Distribution> batch_rows = batch_next_distributions(large, batch_contexts, counter);

  std::vector<const Distribution*> node_row(n_nodes, nullptr);
  for (std::size_t i = 0; i < batch_node_ids.size(); ++i) {
    node_row[static_cast<std::size_t>(batch_node_ids[i])] = &batch_rows[i];
  }

  // Large-model log-likelihood of every node, accumulated along the tree.
  std::vector<double> node_ll(n_nodes, 0.0);
  for (std::size_t i = 0; i < forest.layer(0).size(); ++i) {
    node_ll[static_cast<std::size_t>(forest.layer(0)[i])] = input_large[i].log_likelihood;
  }
  for (int l = 1; l <= gamma; ++l) {
    for (int id : forest.layer(l)) {
      const ForestNode& n = forest.node(id);
      const double step = (*node_row[static_cast<std::size_t>(n.parent)])[static_cast<std::size_t>(n.token)];
      node_ll[static_cast<std::size_t>(id)] = node_ll[static_cast<std::size_t>(n.parent)] + safe_log(step);
    }
  }

  const int draft_width = gamma >= 1 ? static_cast<int>(forest.layer(1).size()) : 0;
  const int cap = std::max(policy.w_min, draft_width);

  VerificationResult result;
  result.l_last = gamma + 1;

  std::vector<int> parents;  // accepted nodes of the previous layer
  parents = forest.layer(0);
  Distribution p_joint;  // joint of the layer currently produced

  auto make_joint = [&](const std::vector<int>& parent_ids) {
    std::vector<double> lls;
    std::vector<Distribution> rows;
    lls.reserve(parent_ids.size());
    rows.reserve(parent_ids.size());
    for (int id : parent_ids) {
      lls.push_back(node_ll[static_cast<std::size_t>(id)]);
      rows.push_back(*node_row[static_cast<std::size_t>(id)]);
    }
    return joint_from_rows(lls, rows, vocab, warp, mode);
  };

  auto fresh_beam = [&](const std::vector<int>& parent_ids, std::size_t cell, int layer,
                        VerifiedBeam::Source source) {
    const JointIndex ji = joint_unflatten(cell, vocab);
    const int parent_id = parent_ids[static_cast<std::size_t>(ji.beam_index)];
    VerifiedBeam b;
    b.tokens = forest.context_of(parent_id);
    b.tokens.push_back(ji.token);
    const double step = (*node_row[static_cast<std::size_t>(parent_id)])[static_cast<std::size_t>(ji.token)];
    b.large_log_lik = node_ll[static_cast<std::size_t>(parent_id)] + safe_log(step);
    b.parent_node = parent_id;
    b.token = ji.token;
    b.layer = layer;
    b.source = source;
    return b;
  };

  for (int l = 1; l <= gamma; ++l) {
    p_joint = make_joint(parents);

    // Restrict the draft joint to the accepted parents, keeping its original
    // values; cells under pruned parents never appear as candidates.
    const Distribution& q_full = forest.layer_joint(l);
    std::vector<double> q_restricted(parents.size() * static_cast<std::size_t>(vocab), 0.0);
    for (std::size_t pi = 0; pi < parents.size(); ++pi) {
      const int prev_slot = forest.node(parents[pi]).slot;
      for (int t = 0; t < vocab; ++t) {
        q_restricted[joint_cell(static_cast<int>(pi), t, vocab)] =
            q_full[joint_cell(prev_slot, t, vocab)];
      }
    }

    std::unordered_map<int, int> parent_index;
    for (std::size_t pi = 0; pi < parents.size(); ++pi) {
      parent_index.emplace(parents[pi], static_cast<int>(pi));
    }

    std::vector<LayerCandidate> candidates;
    candidates.reserve(forest.layer(l).size());
    for (int id : forest.layer(l)) {
      ForestNode& n = forest.node(id);
      const auto it = parent_index.find(n.parent);
      if (it == parent_index.end()) {
        n.rejected = true;  // stems from a rejected beam
        continue;
      }
      candidates.push_back(
          LayerCandidate{joint_cell(it->second, n.token, vocab), n.q_prob, id});
    }

    WidthDecision decision =
        width_decision_for_layer(p_joint, q_restricted, static_cast<int>(candidates.size()),
                                 policy.threshold, policy.w_min, cap);
    if (policy.fixed_target) decision.target_width = std::max(1, *policy.fixed_target);

    LayerOutcome outcome = verify_layer(candidates, p_joint, q_restricted,
                                        decision.target_width, rng, policy.rule);

    std::vector<bool> accepted_flag(candidates.size(), false);
    for (int idx : outcome.accepted) accepted_flag[static_cast<std::size_t>(idx)] = true;
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
      if (!accepted_flag[ci]) forest.node(candidates[ci].node).rejected = true;
    }

    LayerReport report;
    report.decision = decision;
    report.candidate_count = static_cast<int>(candidates.size());
    report.accepted_from_drafts = static_cast<int>(outcome.accepted.size());
    report.accepted = outcome.layer_accepted;
    result.layers.push_back(std::move(report));

    if (!outcome.layer_accepted) {
      for (int idx : outcome.accepted) {
        const int node_id = candidates[static_cast<std::size_t>(idx)].node;
        VerifiedBeam b;
        b.tokens = forest.context_of(node_id);
        b.large_log_lik = node_ll[static_cast<std::size_t>(node_id)];
        b.node = node_id;
        b.parent_node = forest.node(node_id).parent;
        b.token = forest.node(node_id).token;
        b.layer = l;
        b.source = VerifiedBeam::Source::kDraft;
        result.outputs.push_back(std::move(b));
      }
      if (outcome.residual_cell) {
        result.outputs.push_back(
            fresh_beam(parents, *outcome.residual_cell, l, VerifiedBeam::Source::kResidual));
      }
      for (std::size_t cell : outcome.fill_cells) {
        result.outputs.push_back(fresh_beam(parents, cell, l, VerifiedBeam::Source::kFill));
      }
      result.l_last = l;
      break;
    }

    std::vector<int> next_parents;
    next_parents.reserve(outcome.accepted.size());
    for (int idx : outcome.accepted) {
      next_parents.push_back(candidates[static_cast<std::size_t>(idx)].node);
    }
    parents = std::move(next_parents);

    if (l == gamma) {
      // Every draft layer accepted: sample the bonus layer directly from the
      // next joint, at the width the process was maintaining.
      const int bonus_width = decision.target_width;
      const Distribution bonus_joint = make_joint(parents);
      const Cdf bonus_cdf(bonus_joint);
      for (int w = 0; w < bonus_width; ++w) {
        result.outputs.push_back(fresh_beam(parents, bonus_cdf.sample(rng), gamma + 1,
                                            VerifiedBeam::Source::kBonus));
      }
      LayerReport bonus;
      bonus.decision.target_width = bonus_width;
      bonus.decision.threshold = policy.threshold;
      bonus.decision.floor = policy.w_min;
      bonus.accepted = true;
      bonus.is_bonus = true;
      result.layers.push_back(std::move(bonus));
      result.l_last = gamma + 1;
    }
  }

  std::vector<int> anchors;
  anchors.reserve(result.outputs.size());
  for (const VerifiedBeam& b : result.outputs) anchors.push_back(lineage_anchor(b));
  result.lineages = cache_lineages(forest, anchors);
  return result;
}

}  // namespace specbeam
