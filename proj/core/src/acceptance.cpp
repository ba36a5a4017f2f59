#include "specbeam/acceptance.hpp"

#include "specbeam/acceptance_fixtures.hpp"
#include "specbeam/beam_ref.hpp"
#include "specbeam/verifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace specbeam {

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return std::string(buf);
}

BeamSet with_likelihoods(const Model& model, const TokenSeq& prompt,
                         const BeamSet& beams) {
  std::vector<Beam> out;
  out.reserve(beams.width());
  for (const Beam& b : beams) {
    const std::span<const Token> cont =
        std::span<const Token>(b.tokens).subspan(prompt.size());
    out.push_back(Beam{b.tokens, cont.empty() ? 0.0 : sequence_log_prob(model, prompt, cont)});
  }
  return BeamSet(std::move(out));
}

Distribution random_distribution(Rng& rng, int cells, double concentration) {
  std::vector<double> w(static_cast<std::size_t>(cells));
  for (double& x : w) x = rng.next_gamma(concentration);
  return Distribution::from_weights(std::move(w));
}

// ---------------------------------------------------------------------------
// 1. Joint step distribution vs enumeration oracle.
// ---------------------------------------------------------------------------
TestRow criterion_1() {
  TestRow row{1, "eq1-oracle-equivalence", false, 0.0, 1e-9, ""};
  double max_err = 0.0;
  for (int i = 0; i < 50; ++i) {
    const std::uint64_t seed = 101 + static_cast<std::uint64_t>(i);
    const int vocab = 4 + (i % 5);
    const int order = i % 3;
    const int width = 1 + (i % 4);
    WarpSpec warp;
    switch (i % 4) {
      case 0: break;
      case 1: warp.top_k = 3; break;
      case 2: warp.top_p = 0.8; break;
      case 3: warp.top_k = 2; warp.top_p = 0.9; break;
    }
    const Model model = make_markov_model(seed, Vocabulary{vocab, {}}, order, 0.8);
    Rng rng(seed);
    const TokenSeq prompt{i % vocab};
    const BeamSet beams =
        exact_beam_sample(model, BeamSet({Beam{prompt, 0.0}}), width, 2, WarpSpec{}, rng);
    const Distribution impl = beam_step_distribution(model, beams, warp);
    const Distribution oracle =
        enumerate_step_oracle(model, beams, warp, JointWarpMode::kFlattenedJoint, prompt.size());
    for (std::size_t c = 0; c < impl.size(); ++c) {
      max_err = std::max(max_err, std::abs(impl[c] - oracle[c]));
    }
  }
  row.statistic = max_err;
  row.pass = max_err <= row.threshold;
  row.detail = "max entrywise error over 50 seeded instances";
  return row;
}

// ---------------------------------------------------------------------------
// 2. Single-layer verification distribution (both ratio directions).
// ---------------------------------------------------------------------------
struct LayerTvs {
  double tv_first = 0.0;
  double tv_second = 0.0;
  double tv_joint = 0.0;
  bool within(double marginal_tol, double joint_tol) const {
    return tv_first <= marginal_tol && tv_second <= marginal_tol && tv_joint <= joint_tol;
  }
};

LayerTvs layer_distribution_tvs(double divergence, std::uint64_t seed, AcceptRule rule,
                                int trials) {
  const int vocab = 4;
  const int target = 2;  // W_L
  const int drafts = 3;  // W_S
  const WarpSpec warp{10, 0.8};

  const ModelPair pair = make_model_pair(seed, Vocabulary{vocab, {}}, 1, divergence);
  Rng rng(seed ^ 0x5eedULL);
  const TokenSeq prompt{0};
  const BeamSet base =
      exact_beam_sample(pair.large, BeamSet({Beam{prompt, 0.0}}), target, 2, WarpSpec{}, rng);
  const BeamSet beams_large = with_likelihoods(pair.large, prompt, base);
  const BeamSet beams_small = with_likelihoods(pair.small, prompt, base);

  const Distribution p_joint = beam_step_distribution(pair.large, beams_large, warp);
  const Distribution p_exact = enumerate_step_oracle(pair.large, beams_large, warp);
  const Distribution q_joint = beam_step_distribution(pair.small, beams_small, warp);
  const Cdf q_cdf(q_joint);

  const std::size_t cells = p_exact.size();
  std::vector<std::uint64_t> first(cells, 0), second(cells, 0), joint(cells * cells, 0);

  Rng trial_rng = Rng(seed).child(rule == AcceptRule::kTargetOverDraft ? 11 : 13);
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<LayerCandidate> candidates;
    candidates.reserve(static_cast<std::size_t>(drafts));
    for (int d = 0; d < drafts; ++d) {
      const std::size_t cell = q_cdf.sample(trial_rng);
      candidates.push_back(LayerCandidate{cell, q_joint[cell], -1});
    }
    const LayerOutcome out =
        verify_layer(candidates, p_joint, q_joint.weights(), target, trial_rng, rule);

    std::vector<std::size_t> produced;
    for (int idx : out.accepted) {
      produced.push_back(candidates[static_cast<std::size_t>(idx)].cell);
    }
    if (out.residual_cell) produced.push_back(*out.residual_cell);
    for (std::size_t cell : out.fill_cells) produced.push_back(cell);

    first[produced[0]] += 1;
    second[produced[1]] += 1;
    joint[produced[0] * cells + produced[1]] += 1;
  }

  std::vector<double> product(cells * cells);
  for (std::size_t a = 0; a < cells; ++a) {
    for (std::size_t b = 0; b < cells; ++b) product[a * cells + b] = p_exact[a] * p_exact[b];
  }

  LayerTvs tvs;
  tvs.tv_first = tv_distance(empirical_pmf(first), p_exact.weights());
  tvs.tv_second = tv_distance(empirical_pmf(second), p_exact.weights());
  tvs.tv_joint = tv_distance(empirical_pmf(joint), product);
  return tvs;
}

TestRow criterion_2() {
  TestRow row{2, "single-layer-verification-distribution", false, 0.0, 0.01, ""};
  const int trials = 200000;
  double worst_marginal = 0.0;
  double worst_joint = 0.0;
  bool ok = true;
  for (double divergence : {0.1, 0.3, 0.6}) {
    const std::uint64_t seed = 2100 + static_cast<std::uint64_t>(divergence * 10);
    const LayerTvs tvs =
        layer_distribution_tvs(divergence, seed, AcceptRule::kTargetOverDraft, trials);
    worst_marginal = std::max({worst_marginal, tvs.tv_first, tvs.tv_second});
    worst_joint = std::max(worst_joint, tvs.tv_joint);
    ok = ok && tvs.within(0.01, 0.02);
  }
  // The inverted ratio, as a control, must visibly skew the distribution.
  const LayerTvs inverted =
      layer_distribution_tvs(0.6, 2106, AcceptRule::kDraftOverTarget, trials);
  const bool inverted_fails = !inverted.within(0.01, 0.02);

  row.statistic = worst_marginal;
  row.pass = ok && inverted_fails;
  row.detail = "worst marginal TV " + fmt(worst_marginal) + ", worst joint TV " +
               fmt(worst_joint) + " (joint tol 0.02); inverted-ratio control TV " +
               fmt(std::max({inverted.tv_first, inverted.tv_second})) +
               (inverted_fails ? " (fails as required)" : " (unexpectedly passes)");
  return row;
}

// ---------------------------------------------------------------------------
// 3. Accept-count recursion vs Monte Carlo oracle.
// ---------------------------------------------------------------------------
TestRow criterion_3() {
  TestRow row{3, "accept-count-recursion-vs-mc", false, 0.0, 0.01, ""};
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    Rng rng(3000 + static_cast<std::uint64_t>(i));
    const int cells = 4 + (i % 9);
    const int drafts = 2 + (i % 4);  // W_S in 2..5
    Distribution p = random_distribution(rng, cells, 0.7);
    const Distribution fresh = random_distribution(rng, cells, 0.7);
    const double lambda = static_cast<double>(i % 5) / 5.0;
    std::vector<double> qw(static_cast<std::size_t>(cells));
    for (int c = 0; c < cells; ++c) {
      qw[static_cast<std::size_t>(c)] = (1.0 - lambda) * p[static_cast<std::size_t>(c)] +
                                        lambda * fresh[static_cast<std::size_t>(c)];
    }
    const Distribution q = Distribution::from_weights(std::move(qw));
    if (i % 3 == 0) p = warp_top_p(p, 0.8);  // support mismatch cases

    const std::vector<double> alphas = acceptance_alphas(p, q.weights(), drafts);
    const std::vector<double> pmf = accept_count_distribution(alphas, drafts);
    Rng mc_rng = rng.child(7);
    const std::vector<double> mc = mc_accept_count_oracle(p, q, drafts, 1000000, mc_rng);
    worst = std::max(worst, tv_distance(pmf, mc));
  }
  row.statistic = worst;
  row.pass = worst <= row.threshold;
  row.detail = "worst TV over 20 seeded (p, q, W_S) instances at 10^6 trials";
  return row;
}

// ---------------------------------------------------------------------------
// 4. Expected layers per iteration vs the closed form.
// ---------------------------------------------------------------------------
TestRow criterion_4() {
  TestRow row{4, "expected-layers-vs-closed-form", false, 0.0, 0.03, ""};
  const std::vector<std::pair<int, double>> configs = {
      {2, 0.7}, {3, 0.7}, {4, 0.7}, {2, 0.9}, {3, 0.9}};
  double worst_rel = 0.0;
  std::ostringstream detail;
  for (std::size_t ci = 0; ci < configs.size(); ++ci) {
    const auto [gamma, threshold] = configs[ci];
    EngineConfig cfg = expected_layers_fixture_config();
    cfg.gamma = gamma;
    cfg.threshold = threshold;
    const ModelPair pair = expected_layers_fixture_pair();

    std::vector<double> layers;
    std::vector<double> betas;
    Rng seeder(4000 + static_cast<std::uint64_t>(ci));
    int run = 0;
    while (layers.size() < 10000) {
      cfg.rng_seed = seeder.child(static_cast<std::uint64_t>(run)).seed();
      const GenerationResult r = run_generation(cfg, pair, expected_layers_fixture_prompt());
      for (int l : r.metrics.layers_per_iteration) layers.push_back(l);
      for (double b : r.metrics.layer_betas) betas.push_back(b);
      run += 1;
    }
    const double measured = mean_ci(layers).mean;
    const double beta_bar = mean_ci(betas).mean;
    const double predicted = expected_steps(std::min(threshold, beta_bar), gamma);
    const double rel = std::abs(measured - predicted) / predicted;
    worst_rel = std::max(worst_rel, rel);
    detail << "(gamma=" << gamma << " t=" << threshold << ": measured " << fmt(measured)
           << " predicted " << fmt(predicted) << ") ";
  }
  row.statistic = worst_rel;
  row.pass = worst_rel <= row.threshold;
  row.detail = detail.str();
  return row;
}

// ---------------------------------------------------------------------------
// 5. Certain acceptance when the models coincide.
// ---------------------------------------------------------------------------
TestRow criterion_5() {
  TestRow row{5, "degenerate-certainty", false, 0.0, 0.0, ""};
  EngineConfig cfg;
  cfg.mode = Mode::kDsbd;
  cfg.gamma = 3;
  cfg.draft_width = 3;
  cfg.w_min = 3;
  cfg.threshold = 1.0;
  cfg.warp = WarpSpec{10, 0.8};
  cfg.max_new_tokens = 40;
  const ModelPair pair = make_model_pair(501, Vocabulary{6, {}}, 1, 0.0);

  std::uint64_t iterations = 0;
  bool exact = true;
  Rng seeder(505);
  int run = 0;
  while (iterations < 1000) {
    cfg.rng_seed = seeder.child(static_cast<std::uint64_t>(run++)).seed();
    const GenerationResult r = run_generation(cfg, pair, TokenSeq{0, 1});
    iterations += r.metrics.iterations;
    for (int l : r.metrics.layers_per_iteration) exact = exact && (l == cfg.gamma + 1);
    exact = exact && (r.metrics.tokens_generated ==
                      static_cast<std::uint64_t>(cfg.gamma + 1) * r.metrics.iterations);
    exact = exact && (r.metrics.large_calls == r.metrics.iterations);
  }
  row.statistic = exact ? 0.0 : 1.0;
  row.pass = exact;
  row.detail = "layers/iteration == gamma+1 and tokens/large call == gamma+1 over " +
               std::to_string(iterations) + " iterations";
  return row;
}

// ---------------------------------------------------------------------------
// 6. Topology masks and masked batched evaluation.
// ---------------------------------------------------------------------------
TestRow criterion_6() {
  TestRow row{6, "forest-mask-correctness", false, 0.0, 0.0, ""};
  bool ok = true;

  // Masks vs brute-force ancestor walks on arbitrary trees.
  for (int i = 0; i < 200 && ok; ++i) {
    Rng rng(600 + static_cast<std::uint64_t>(i));
    const int n = 2 + static_cast<int>(rng.next_below(63));
    std::vector<int> parent(static_cast<std::size_t>(n));
    parent[0] = -1;
    for (int j = 1; j < n; ++j) {
      parent[static_cast<std::size_t>(j)] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(j)));
    }
    const TopologyMask tm = topology_mask(parent, 0);
    for (std::size_t a = 0; a < tm.dfs_order.size() && ok; ++a) {
      for (std::size_t b = 0; b < tm.dfs_order.size() && ok; ++b) {
        bool ancestor = false;
        int cur = tm.dfs_order[a];
        while (cur != -1) {
          if (cur == tm.dfs_order[b]) {
            ancestor = true;
            break;
          }
          cur = parent[static_cast<std::size_t>(cur)];
        }
        ok = tm.mask[a][b] == ancestor;
      }
    }
  }
  const bool masks_ok = ok;

  // Masked batched evaluation must equal per-node sequential evaluation
  // bit for bit.
  bool batch_ok = true;
  for (int i = 0; i < 50 && batch_ok; ++i) {
    const std::uint64_t seed = 6600 + static_cast<std::uint64_t>(i);
    const int vocab = 4 + (i % 5);
    const int width = 1 + (i % 2);
    const int drafts = 2 + (i % 4);
    const int gamma = 1 + (i % 4);
    WarpSpec warp;
    if (i % 2 == 0) warp.top_p = 0.9;
    const ModelPair pair = make_model_pair(seed, Vocabulary{vocab, {}}, 1 + (i % 2), 0.4);
    Rng rng(seed);
    const TokenSeq prompt{0};
    BeamSet input = width == 1
                        ? BeamSet({Beam{prompt, 0.0}})
                        : with_likelihoods(pair.small, prompt,
                                           exact_beam_sample(pair.small, BeamSet({Beam{prompt, 0.0}}),
                                                             width, 1, WarpSpec{}, rng));
    const DraftForest forest =
        grow_draft_forest(pair.small, input, drafts, gamma, warp, rng);
    for (int root : forest.layer(0)) {
      const TopologyMask tm = topology_mask(forest, root);
      const std::vector<TokenSeq> contexts = masked_contexts(forest, tm);
      const std::vector<Distribution> batched =
          batch_next_distributions(pair.large, contexts);
      for (std::size_t k = 0; k < tm.dfs_order.size() && batch_ok; ++k) {
        const Distribution& direct = pair.large.next(forest.context_of(tm.dfs_order[k]));
        batch_ok = batched[k].weights() == direct.weights();
      }
    }
  }

  row.pass = masks_ok && batch_ok;
  row.statistic = row.pass ? 0.0 : 1.0;
  row.detail = std::string("ancestor oracle on 200 trees: ") + (masks_ok ? "ok" : "FAIL") +
               "; masked batch bit-equality on 50 forests: " + (batch_ok ? "ok" : "FAIL");
  return row;
}

// ---------------------------------------------------------------------------
// 7. Vanilla speculative decoding is lossless.
// ---------------------------------------------------------------------------
TestRow criterion_7() {
  TestRow row{7, "vanilla-speculative-losslessness", false, 0.0, 0.01, ""};
  const int vocab = 4;
  const WarpSpec warp{3, 0.9};
  const ModelPair pair = make_model_pair(701, Vocabulary{vocab, {}}, 1, 0.4);
  const TokenSeq prompt{1, 2};
  const Distribution exact = apply_warp(warp, pair.large.next(prompt));

  EngineConfig cfg;
  cfg.mode = Mode::kVanillaSpeculative;
  cfg.gamma = 2;
  cfg.warp = warp;
  cfg.max_new_tokens = 1;

  std::vector<std::uint64_t> counts(static_cast<std::size_t>(vocab), 0);
  Rng seeder(702);
  const int trials = 200000;
  for (int trial = 0; trial < trials; ++trial) {
    cfg.rng_seed = seeder.child(static_cast<std::uint64_t>(trial)).seed();
    const GenerationResult r = run_generation(cfg, pair, prompt);
    counts[static_cast<std::size_t>(r.selected.tokens[prompt.size()])] += 1;
  }
  const MatchResult match = distribution_match_test(counts, exact, 0.01, 100000);
  row.statistic = match.tv;
  row.pass = match.pass;
  row.detail = "first-token TV vs warped large conditional at 2*10^5 trials (chi2 " +
               fmt(match.chi_square) + ")";
  return row;
}

// ---------------------------------------------------------------------------
// 8. Memory-constrained mode: one lineage, better than multinomial.
// ---------------------------------------------------------------------------
TestRow criterion_8() {
  TestRow row{8, "memory-constrained-mode", false, 0.0, 0.05, ""};
  const ModelPair pair = make_model_pair(801, Vocabulary{8, {}}, 1, 0.3);

  EngineConfig mc;
  mc.mode = Mode::kDsbdMemoryConstrained;
  mc.gamma = 3;
  mc.draft_width = 4;
  mc.w_min = 2;
  mc.threshold = 0.7;
  mc.warp = WarpSpec{10, 0.8};
  mc.max_new_tokens = 48;

  EngineConfig mn = mc;
  mn.mode = Mode::kMultinomial;

  int wins = 0, losses = 0;
  double sum_mc = 0.0, sum_mn = 0.0;
  bool lineage_ok = true;
  Rng seeder(808);
  const int prompts = 200;
  for (int i = 0; i < prompts; ++i) {
    Rng prompt_rng = seeder.child(static_cast<std::uint64_t>(i));
    const TokenSeq prompt{static_cast<Token>(prompt_rng.next_below(8)),
                          static_cast<Token>(prompt_rng.next_below(8))};
    mc.rng_seed = seeder.child(1000 + static_cast<std::uint64_t>(i)).seed();
    mn.rng_seed = seeder.child(2000 + static_cast<std::uint64_t>(i)).seed();
    const auto [mc_beam, mc_metrics] = run_memory_constrained(mc, pair, prompt);
    const GenerationResult mn_result = run_generation(mn, pair, prompt);
    lineage_ok = lineage_ok && (mc_metrics.cache_lineage_peak == 1);
    const double a = mc_metrics.mean_log_lik_per_token;
    const double b = mn_result.metrics.mean_log_lik_per_token;
    sum_mc += a;
    sum_mn += b;
    if (a > b) wins += 1;
    else if (b > a) losses += 1;
  }
  const double mean_mc = sum_mc / prompts;
  const double mean_mn = sum_mn / prompts;
  const double p_value = sign_test_p_value(wins, losses);
  row.statistic = p_value;
  row.pass = lineage_ok && mean_mc >= mean_mn && p_value < 0.05;
  row.detail = "lineage peak 1: " + std::string(lineage_ok ? "ok" : "FAIL") +
               "; mean log-lik/token " + fmt(mean_mc) + " vs multinomial " + fmt(mean_mn) +
               "; sign test p " + fmt(p_value) + " (" + std::to_string(wins) + " wins / " +
               std::to_string(losses) + " losses)";
  return row;
}

// ---------------------------------------------------------------------------
// 9. Directional trade-off: width knobs move W-bar and quality together.
// ---------------------------------------------------------------------------
TestRow criterion_9() {
  TestRow row{9, "width-quality-monotonicity", false, 0.0, 0.0, ""};
  const MonotonicityResult r = run_monotonicity_check();
  row.pass = r.wbar_monotone_in_ws && r.wbar_antitone_in_t && r.ll_monotone_in_wbar;
  row.statistic = row.pass ? 0.0 : 1.0;
  std::ostringstream detail;
  detail << "W-bar vs W_S: " << (r.wbar_monotone_in_ws ? "monotone" : "FAIL")
         << "; W-bar vs t: " << (r.wbar_antitone_in_t ? "antitone" : "FAIL")
         << "; log-lik vs W-bar along each threshold row: "
         << (r.ll_monotone_in_wbar ? "monotone" : "FAIL")
         << "; pooled cross-threshold inversions (reported): " << r.pooled_inversions
         << "; cells:";
  for (const auto& c : r.cells) {
    detail << " (ws=" << c.draft_width << ",t=" << c.threshold << ",Wbar=" << fmt(c.wbar)
           << ",ll=" << fmt(c.mean_ll) << ")";
  }
  row.detail = detail.str();
  return row;
}

// ---------------------------------------------------------------------------
// 10. Sweep determinism: byte-identical reports for identical specs.
// ---------------------------------------------------------------------------
TestRow criterion_10() {
  TestRow row{10, "sweep-determinism", false, 0.0, 0.0, ""};
  ExperimentSpec spec;
  spec.model_seed = 10101;
  spec.rng_seed = 20202;
  spec.vocab_size = 6;
  spec.order = 1;
  spec.divergence = 0.3;
  spec.gammas = {2, 3};
  spec.draft_widths = {3};
  spec.thresholds = {0.7, 0.9};
  spec.w_mins = {1};
  spec.warp = WarpSpec{10, 0.8};
  spec.trials = 10;
  spec.max_new_tokens = 24;

  const Report a = run_experiment(spec);
  const Report b = run_experiment(spec);
  const std::string csv_a = report_to_csv(a);
  const std::string csv_b = report_to_csv(b);
  const std::string json_a = report_to_json(a);
  const std::string json_b = report_to_json(b);

  // Also compare through the file path, byte for byte.
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path();
  bool file_equal = true;
  {
    Report r1 = a;
    r1.spec.out_path = (dir / "specbeam_determinism_a").string();
    r1.spec.format = "csv";
    write_report(r1);
    Report r2 = b;
    r2.spec.out_path = (dir / "specbeam_determinism_b").string();
    r2.spec.format = "csv";
    write_report(r2);
    std::ifstream fa(r1.spec.out_path + ".csv", std::ios::binary);
    std::ifstream fb(r2.spec.out_path + ".csv", std::ios::binary);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    file_equal = sa.str() == sb.str() && !sa.str().empty();
    fs::remove(r1.spec.out_path + ".csv");
    fs::remove(r2.spec.out_path + ".csv");
  }

  row.pass = (csv_a == csv_b) && (json_a == json_b) && file_equal;
  row.statistic = row.pass ? 0.0 : 1.0;
  row.detail = std::string("csv ") + (csv_a == csv_b ? "identical" : "DIFFERS") + ", json " +
               (json_a == json_b ? "identical" : "DIFFERS") + ", file bytes " +
               (file_equal ? "identical" : "DIFFER");
  return row;
}

}  // namespace

std::vector<TestRow> run_acceptance(const std::vector<int>& ids, std::ostream& out) {
  const std::vector<std::pair<int, std::function<TestRow()>>> suites = {
      {1, criterion_1}, {2, criterion_2}, {3, criterion_3}, {4, criterion_4},
      {5, criterion_5}, {6, criterion_6}, {7, criterion_7}, {8, criterion_8},
      {9, criterion_9}, {10, criterion_10},
  };
  std::vector<TestRow> rows;
  for (const auto& [id, fn] : suites) {
    if (!ids.empty() && std::find(ids.begin(), ids.end(), id) == ids.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    TestRow row = fn();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char line[512];
    std::snprintf(line, sizeof(line), "[%s] C%d %s: statistic %.4g (tolerance %.4g) [%.1f s]",
                  row.pass ? "PASS" : "FAIL", row.id, row.name.c_str(), row.statistic,
                  row.threshold, seconds);
    out << line << "\n" << "       " << row.detail << "\n";
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace specbeam
