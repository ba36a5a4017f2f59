#include "specbeam/width_policy.hpp"

#include "specbeam/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace specbeam {

namespace {
constexpr double kThresholdSlack = 1e-12;
}

std::vector<double> acceptance_alphas(const Distribution& p_joint,
                                      const std::vector<double>& q_joint, int count,
                                      std::vector<Distribution>* chain) {
  if (q_joint.size() != p_joint.size()) {
    throw std::invalid_argument("acceptance_alphas: index set mismatch");
  }
  if (count < 0) throw std::invalid_argument("acceptance_alphas: negative count");

  std::vector<double> alphas;
  alphas.reserve(static_cast<std::size_t>(count));
  Distribution p_cur = p_joint;
  bool degenerate = false;
  for (int j = 0; j < count; ++j) {
    if (degenerate) {
      alphas.push_back(1.0);
      continue;
    }
    if (chain != nullptr) chain->push_back(p_cur);
    double a = 0.0;
    for (std::size_t i = 0; i < q_joint.size(); ++i) a += std::min(q_joint[i], p_cur[i]);
    auto residual = residual_update(p_cur, q_joint);
    if (!residual) {
      // p_j <= q everywhere: rejection has probability zero, chain stops.
      alphas.push_back(1.0);
      degenerate = true;
    } else {
      alphas.push_back(std::clamp(a, 0.0, 1.0));
      p_cur = std::move(*residual);
    }
  }
  return alphas;
}

std::vector<std::vector<double>> first_accept_probs(const std::vector<double>& alphas) {
  const std::size_t n = alphas.size();
  std::vector<std::vector<double>> mat(n);
  for (std::size_t m = 1; m <= n; ++m) {
    std::vector<double> row(m);
    double survive = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      row[i] = alphas[i] * survive;
      survive *= (1.0 - alphas[i]);
    }
    mat[m - 1] = std::move(row);
  }
  return mat;
}

std::vector<double> accept_count_distribution(const std::vector<double>& alphas, int m) {
  if (m < 0 || static_cast<std::size_t>(m) > alphas.size()) {
    throw std::invalid_argument("accept_count_distribution: m exceeds alpha count");
  }

  // first_accept[i] = P(draft i+1 is the first accepted); survive[i] =
  // P(first i drafts all rejected).
  std::vector<double> first_accept(static_cast<std::size_t>(m));
  std::vector<double> survive(static_cast<std::size_t>(m) + 1, 1.0);
  for (int i = 0; i < m; ++i) {
    first_accept[static_cast<std::size_t>(i)] = alphas[static_cast<std::size_t>(i)] * survive[static_cast<std::size_t>(i)];
    survive[static_cast<std::size_t>(i) + 1] =
        survive[static_cast<std::size_t>(i)] * (1.0 - alphas[static_cast<std::size_t>(i)]);
  }

  // P(mm, k) built bottom-up. After an acceptance the residual chain resets
  // to p_beam, so the tail over the remaining drafts is the same process
  // with the same alpha sequence, just shorter.
  std::vector<std::vector<double>> table(static_cast<std::size_t>(m) + 1);
  table[0] = {1.0};
  for (int mm = 1; mm <= m; ++mm) {
    std::vector<double> row(static_cast<std::size_t>(mm) + 1, 0.0);
    row[0] = survive[static_cast<std::size_t>(mm)];
    for (int k = 1; k <= mm; ++k) {
      double acc = 0.0;
      for (int i = 1; i <= mm; ++i) {
        const auto& tail = table[static_cast<std::size_t>(mm - i)];
        if (static_cast<std::size_t>(k - 1) < tail.size()) {
          acc += first_accept[static_cast<std::size_t>(i - 1)] * tail[static_cast<std::size_t>(k - 1)];
        }
      }
      row[static_cast<std::size_t>(k)] = acc;
    }
    table[static_cast<std::size_t>(mm)] = std::move(row);
  }
  return table[static_cast<std::size_t>(m)];
}

double at_least_k_prob(const std::vector<double>& pmf, int k) {
  const int m = static_cast<int>(pmf.size()) - 1;
  if (k < 0 || k > m + 1) throw std::invalid_argument("at_least_k_prob: K out of range");
  double below = 0.0;
  for (int i = 0; i < k; ++i) below += pmf[static_cast<std::size_t>(i)];
  return std::clamp(1.0 - below, 0.0, 1.0);
}

double beta_min(const std::vector<double>& pmf, int w_min) {
  const int m = static_cast<int>(pmf.size()) - 1;
  if (w_min > m) return 0.0;  // cannot accept more drafts than exist
  return at_least_k_prob(pmf, w_min);
}

double expected_steps(double a, int gamma) {
  if (a < 0.0 || a > 1.0) throw std::invalid_argument("expected_steps: rate outside [0, 1]");
  if (gamma < 1) throw std::invalid_argument("expected_steps: gamma must be >= 1");
  if (1.0 - a < 1e-12) return static_cast<double>(gamma) + 1.0;
  return (1.0 - std::pow(a, gamma + 1)) / (1.0 - a);
}

WidthDecision width_decision_for_layer(const Distribution& p_joint,
                                       const std::vector<double>& q_joint, int candidates,
                                       double threshold, int w_min, int cap) {
  if (w_min < 1) throw std::invalid_argument("width decision: floor must be >= 1");
  if (cap < w_min) throw std::invalid_argument("width decision: cap below floor");
  if (threshold < 0.0 || threshold > 1.0) {
    throw std::invalid_argument("width decision: threshold outside [0, 1]");
  }

  WidthDecision d;
  d.threshold = threshold;
  d.floor = w_min;
  d.alphas = acceptance_alphas(p_joint, q_joint, candidates);
  d.accept_count_pmf = accept_count_distribution(d.alphas, candidates);

  int best = 0;
  for (int k = 0; k <= candidates; ++k) {
    if (at_least_k_prob(d.accept_count_pmf, k) >= threshold - kThresholdSlack) best = k;
  }
  d.target_width = std::min(cap, std::max(w_min, best));
  return d;
}

WidthDecision dynamic_width(const Distribution& p_joint, const std::vector<double>& q_joint,
                            int w_s, double threshold, int w_min) {
  if (w_min > w_s) throw std::invalid_argument("dynamic_width: floor exceeds draft width");
  return width_decision_for_layer(p_joint, q_joint, w_s, threshold, w_min, w_s);
}

std::vector<double> mc_accept_count_oracle(const Distribution& p_joint,
                                           const Distribution& q_joint, int w_s,
                                           int trials, Rng& rng) {
  if (trials < 10000) throw std::invalid_argument("mc_accept_count_oracle: trials must be >= 10^4");
  if (q_joint.size() != p_joint.size()) {
    throw std::invalid_argument("mc_accept_count_oracle: index set mismatch");
  }

  const Cdf q_cdf(q_joint);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(w_s) + 1, 0);
  for (int trial = 0; trial < trials; ++trial) {
    Distribution p_cur = p_joint;
    int accepted = 0;
    for (int i = 0; i < w_s; ++i) {
      const std::size_t x = q_cdf.sample(rng);
      const double q_x = q_joint[x];
      const double ratio = std::min(1.0, p_cur[x] / q_x);
      if (rng.next_double() < ratio) {
        accepted += 1;
        p_cur = p_joint;
      } else {
        auto residual = residual_update(p_cur, q_joint.weights());
        p_cur = residual ? std::move(*residual) : p_joint;
      }
    }
    counts[static_cast<std::size_t>(accepted)] += 1;
  }

  std::vector<double> pmf(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    pmf[k] = static_cast<double>(counts[k]) / static_cast<double>(trials);
  }
  return pmf;
}

}  // namespace specbeam
