#pragma once

#include "specbeam/distribution.hpp"
#include "specbeam/rng.hpp"

#include <vector>

namespace specbeam {

/// Per-layer output of the dynamic width policy.
struct WidthDecision {
  std::vector<double> alphas;           // alpha_1..alpha_m
  std::vector<double> accept_count_pmf; // P(m, k) for k = 0..m
  int target_width = 0;
  double threshold = 0.0;
  int floor = 0;
};

/// Sequential acceptance probabilities of the draft chain: alpha_j is the
/// probability that the j-th draft is accepted given drafts 1..j-1 were all
/// rejected, computed as sum_x min(q(x), p_j(x)) with p_1 = p and
/// p_{j+1} = norm(max(p_j - q, 0)).
///
/// When a residual degenerates (p_j <= q everywhere, so rejection has
/// probability zero), alpha_j and every later alpha are defined as 1 and the
/// chain stops. q may be sub-normalized (a restriction of a draft joint to a
/// shared index set); p and q must share one index set.
///
/// `chain` optionally receives the residual sequence p_1..p_m actually used.
std::vector<double> acceptance_alphas(const Distribution& p_joint,
                                      const std::vector<double>& q_joint, int count,
                                      std::vector<Distribution>* chain = nullptr);

/// P~(m, i): probability that the i-th draft is the first accepted among m.
/// Returned as a triangular matrix indexed [m-1][i-1] for 1 <= i <= m.
std::vector<std::vector<double>> first_accept_probs(const std::vector<double>& alphas);

/// Probability mass function of the number of accepted drafts out of m,
/// via the first-acceptance recursion. The chain restarts after every
/// acceptance, so the tail process over the remaining drafts reuses the
/// alpha sequence from its first element.
std::vector<double> accept_count_distribution(const std::vector<double>& alphas, int m);

/// 1 - sum_{k < K} pmf[k]; probability that at least K drafts are accepted.
double at_least_k_prob(const std::vector<double>& pmf, int k);

/// Probability of reaching at least the floor width.
double beta_min(const std::vector<double>& pmf, int w_min);

/// Expected layers produced per iteration at per-layer acceptance rate a:
/// (1 - a^(gamma+1)) / (1 - a), with the a = 1 limit equal to gamma + 1.
double expected_steps(double a, int gamma);

/// Full width decision for a layer: the largest K whose at-least-K
/// probability clears the threshold (with 1e-12 slack so float noise cannot
/// flip the choice), floored at w_min and capped at w_s.
WidthDecision dynamic_width(const Distribution& p_joint, const std::vector<double>& q_joint,
                            int w_s, double threshold, int w_min);

/// Same computation with the candidate count decoupled from the cap; the
/// verifier uses this after pruning, when fewer than w_s candidates remain
/// and the floor may exceed them.
WidthDecision width_decision_for_layer(const Distribution& p_joint,
                                       const std::vector<double>& q_joint, int candidates,
                                       double threshold, int w_min, int cap);

/// Monte Carlo oracle for accept_count_distribution: draws w_s iid cells
/// from q, runs the exact residual-update acceptance chain with no width
/// cutoff and returns the empirical count pmf. Requires trials >= 10^4.
std::vector<double> mc_accept_count_oracle(const Distribution& p_joint,
                                           const Distribution& q_joint, int w_s,
                                           int trials, Rng& rng);

}  // namespace specbeam
