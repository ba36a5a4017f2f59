#pragma once

#include "specbeam/beam.hpp"
#include "specbeam/model.hpp"
#include "specbeam/warp.hpp"

#include <span>
#include <vector>

namespace specbeam {

/// One node of the draft forest. Roots (layer 0) stand for the input beams;
/// nodes at layer l >= 1 carry the token they extend their parent with, the
/// warped joint draft probability they were sampled at, and the accumulated
/// small-model log-likelihood of their sequence.
struct ForestNode {
  Token token = -1;
  int parent = -1;  // node id, -1 for roots
  int layer = 0;
  int slot = 0;  // position within its layer
  int root = 0;  // root node id (cache lineage)
  double q_prob = 0.0;
  double small_log_lik = 0.0;
  bool rejected = false;
};

/// The small model's beam-sampling trajectory: one tree per input beam,
/// gamma draft layers of exactly draft_width nodes each. Each layer keeps
/// the full warped draft joint it was sampled from plus the conditional rows
/// of its parent layer, exactly as they were at draft time.
class DraftForest {
 public:
  DraftForest(BeamSet input, int gamma, int vocab);

  const BeamSet& input() const { return input_; }
  int gamma() const { return gamma_; }
  int vocab() const { return vocab_; }

  const std::vector<ForestNode>& nodes() const { return nodes_; }
  ForestNode& node(int id) { return nodes_[static_cast<std::size_t>(id)]; }
  const ForestNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }

  /// Node ids at a layer, in draft (sampling) order. Layer 0 is the roots.
  const std::vector<int>& layer(int l) const { return layers_[static_cast<std::size_t>(l)]; }
  int layer_count() const { return static_cast<int>(layers_.size()); }

  /// Warped draft joint q over (previous-layer slot, token) cells, l in 1..gamma.
  const Distribution& layer_joint(int l) const { return joints_[static_cast<std::size_t>(l - 1)]; }

  /// Small-model conditional rows of the previous layer's nodes, l in 1..gamma.
  const std::vector<Distribution>& layer_rows(int l) const {
    return rows_[static_cast<std::size_t>(l - 1)];
  }

  /// Full token sequence of a node: its root's input beam plus the path.
  TokenSeq context_of(int id) const;

  std::vector<int> parent_view() const;

  // Populated by grow_draft_forest.
  void add_layer(std::vector<int> node_ids, Distribution joint, std::vector<Distribution> rows);
  int add_node(ForestNode n);

 private:
  BeamSet input_;
  int gamma_ = 0;
  int vocab_ = 0;
  std::vector<ForestNode> nodes_;
  std::vector<std::vector<int>> layers_;
  std::vector<Distribution> joints_;
  std::vector<std::vector<Distribution>> rows_;
};

/// Runs beam sampling under the small model for gamma steps at width
/// draft_width, recording every node's draft probability and the per-layer
/// joints. The input BeamSet must carry small-model log-likelihoods.
DraftForest grow_draft_forest(const Model& small, const BeamSet& input, int draft_width,
                              int gamma, const WarpSpec& warp, Rng& rng,
                              CallCounter* counter = nullptr,
                              JointWarpMode mode = JointWarpMode::kFlattenedJoint);

/// Depth-first order over an arbitrary parent-array tree: parent[i] is a
/// node id less than i, or -1 at the root; children are visited in ascending
/// id order. Every node appears once, after its parent.
std::vector<int> dfs_linearize(std::span<const int> parent, int root);
std::vector<int> dfs_linearize(const DraftForest& forest, int root);

/// Boolean ancestry matrix over DFS-ordered nodes: mask[i][j] is true iff
/// node j lies on the root path of node i (inclusive of i itself).
struct TopologyMask {
  std::vector<int> dfs_order;  // node ids
  std::vector<std::vector<bool>> mask;
};

TopologyMask topology_mask(std::span<const int> parent, int root);
TopologyMask topology_mask(const DraftForest& forest, int root);

/// Contexts for one batched model call over a DFS-linearized tree, assembled
/// from the mask rows alone: position i's context is the root's input beam
/// followed by the tokens of its masked (ancestor) nodes in DFS order.
std::vector<TokenSeq> masked_contexts(const DraftForest& forest, const TopologyMask& tm);

/// Which input-beam caches survive an iteration. Each surviving output beam
/// is identified by an anchor node: the forest node it is (accepted drafts)
/// or the parent node it extends with a fresh token (resampled, fill and
/// bonus beams).
struct LineageInfo {
  std::vector<int> beam_root;       // root node id per surviving beam
  std::vector<bool> root_survives;  // indexed by root slot
  int count = 0;                    // distinct surviving lineages
};

LineageInfo cache_lineages(const DraftForest& forest, const std::vector<int>& anchor_nodes);

}  // namespace specbeam
