#include "specbeam/draft_forest.hpp"

#include "specbeam/beam_ref.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace specbeam {

DraftForest::DraftForest(BeamSet input, int gamma, int vocab)
    : input_(std::move(input)), gamma_(gamma), vocab_(vocab) {
  layers_.resize(1);
  for (std::size_t i = 0; i < input_.width(); ++i) {
    ForestNode root;
    root.token = input_[i].tokens.empty() ? -1 : input_[i].tokens.back();
    root.parent = -1;
    root.layer = 0;
    root.slot = static_cast<int>(i);
    root.root = static_cast<int>(i);
    root.small_log_lik = input_[i].log_likelihood;
    const int id = add_node(root);
    layers_[0].push_back(id);
  }
}

int DraftForest::add_node(ForestNode n) {
  nodes_.push_back(n);
  return static_cast<int>(nodes_.size()) - 1;
}

void DraftForest::add_layer(std::vector<int> node_ids, Distribution joint,
                            std::vector<Distribution> rows) {
  layers_.push_back(std::move(node_ids));
  joints_.push_back(std::move(joint));
  rows_.push_back(std::move(rows));
}

TokenSeq DraftForest::context_of(int id) const {
  std::vector<Token> path;
  int cur = id;
  while (node(cur).parent != -1) {
    path.push_back(node(cur).token);
    cur = node(cur).parent;
  }
  TokenSeq ctx = input_[static_cast<std::size_t>(node(cur).slot)].tokens;
  ctx.insert(ctx.end(), path.rbegin(), path.rend());
  return ctx;
}

std::vector<int> DraftForest::parent_view() const {
  std::vector<int> parents(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) parents[i] = nodes_[i].parent;
  return parents;
}

DraftForest grow_draft_forest(const Model& small, const BeamSet& input, int draft_width,
                              int gamma, const WarpSpec& warp, Rng& rng,
                              CallCounter* counter, JointWarpMode mode) {
  if (draft_width < 1) throw std::invalid_argument("grow_draft_forest: draft width must be >= 1");
  if (gamma < 1) throw std::invalid_argument("grow_draft_forest: gamma must be >= 1");

  const int vocab = small.vocab().size;
  DraftForest forest(input, gamma, vocab);

  for (int l = 1; l <= gamma; ++l) {
    const std::vector<int> prev = forest.layer(l - 1);
    std::vector<TokenSeq> contexts;
    contexts.reserve(prev.size());
    for (int id : prev) contexts.push_back(forest.context_of(id));
    std::vector<Distribution> rows = batch_next_distributions(small, contexts, counter);

    std::vector<double> lls;
    lls.reserve(prev.size());
    for (int id : prev) lls.push_back(forest.node(id).small_log_lik);
    Distribution joint = joint_from_rows(lls, rows, vocab, warp, mode);

    const Cdf cdf(joint);
    std::vector<int> ids;
    ids.reserve(static_cast<std::size_t>(draft_width));
    for (int w = 0; w < draft_width; ++w) {
      const std::size_t cell = cdf.sample(rng);
      const JointIndex ji = joint_unflatten(cell, vocab);
      const int parent_id = prev[static_cast<std::size_t>(ji.beam_index)];
      ForestNode n;
      n.token = ji.token;
      n.parent = parent_id;
      n.layer = l;
      n.slot = w;
      n.root = forest.node(parent_id).root;
      n.q_prob = joint[cell];
      const double step =
          rows[static_cast<std::size_t>(ji.beam_index)][static_cast<std::size_t>(ji.token)];
      n.small_log_lik = forest.node(parent_id).small_log_lik +
                        (step > 0.0 ? std::log(step)
                                    : -std::numeric_limits<double>::infinity());
      ids.push_back(forest.add_node(n));
    }
    forest.add_layer(std::move(ids), std::move(joint), std::move(rows));
  }
  return forest;
}

std::vector<int> dfs_linearize(std::span<const int> parent, int root) {
  const int n = static_cast<int>(parent.size());
  if (root < 0 || root >= n) throw std::invalid_argument("dfs_linearize: root out of range");

  // Children in ascending id order; ids only reference earlier nodes.
  std::vector<std::vector<int>> children(parent.size());
  for (int i = 0; i < n; ++i) {
    const int p = parent[static_cast<std::size_t>(i)];
    if (p >= i) throw std::invalid_argument("dfs_linearize: parent id must precede child");
    if (p >= 0) children[static_cast<std::size_t>(p)].push_back(i);
  }

  std::vector<int> order;
  std::vector<int> stack{root};
  while (!stack.empty()) {
    const int cur = stack.back();
    stack.pop_back();
    order.push_back(cur);
    const auto& kids = children[static_cast<std::size_t>(cur)];
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return order;
}

std::vector<int> dfs_linearize(const DraftForest& forest, int root) {
  return dfs_linearize(forest.parent_view(), root);
}

TopologyMask topology_mask(std::span<const int> parent, int root) {
  TopologyMask tm;
  tm.dfs_order = dfs_linearize(parent, root);
  const std::size_t n = tm.dfs_order.size();

  std::vector<int> pos(parent.size(), -1);  // node id -> DFS position
  for (std::size_t i = 0; i < n; ++i) pos[static_cast<std::size_t>(tm.dfs_order[i])] = static_cast<int>(i);

  tm.mask.assign(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    int cur = tm.dfs_order[i];
    while (cur != -1 && pos[static_cast<std::size_t>(cur)] != -1) {
      tm.mask[i][static_cast<std::size_t>(pos[static_cast<std::size_t>(cur)])] = true;
      if (cur == root) break;
      cur = parent[static_cast<std::size_t>(cur)];
    }
  }
  return tm;
}

TopologyMask topology_mask(const DraftForest& forest, int root) {
  return topology_mask(forest.parent_view(), root);
}

std::vector<TokenSeq> masked_contexts(const DraftForest& forest, const TopologyMask& tm) {
  const std::size_t n = tm.dfs_order.size();
  std::vector<TokenSeq> contexts(n);
  for (std::size_t i = 0; i < n; ++i) {
    // The root beam supplies the prefix; masked non-root nodes supply the
    // path tokens, already in root-to-leaf order because DFS places every
    // ancestor before its subtree.
    const int root_id = forest.node(tm.dfs_order[i]).root;
    TokenSeq ctx = forest.input()[static_cast<std::size_t>(forest.node(root_id).slot)].tokens;
    for (std::size_t j = 0; j < n; ++j) {
      if (!tm.mask[i][j]) continue;
      const ForestNode& nd = forest.node(tm.dfs_order[j]);
      if (nd.layer == 0) continue;
      ctx.push_back(nd.token);
    }
    contexts[i] = std::move(ctx);
  }
  return contexts;
}

LineageInfo cache_lineages(const DraftForest& forest, const std::vector<int>& anchor_nodes) {
  LineageInfo info;
  info.root_survives.assign(forest.input().width(), false);
  info.beam_root.reserve(anchor_nodes.size());
  for (int id : anchor_nodes) {
    if (id < 0 || id >= static_cast<int>(forest.nodes().size())) {
      throw std::invalid_argument("cache_lineages: anchor references no valid node");
    }
    const int root = forest.node(id).root;
    info.beam_root.push_back(root);
    const int root_slot = forest.node(root).slot;
    if (!info.root_survives[static_cast<std::size_t>(root_slot)]) {
      info.root_survives[static_cast<std::size_t>(root_slot)] = true;
      info.count += 1;
    }
  }
  return info;
}

}  // namespace specbeam
