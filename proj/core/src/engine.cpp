#include "specbeam/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace specbeam {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

struct BeamState {
  TokenSeq tokens;
  double large_ll = 0.0;
  double small_ll = 0.0;
};

BeamSet to_beam_set(const std::vector<BeamState>& states, bool small) {
  std::vector<Beam> beams;
  beams.reserve(states.size());
  for (const BeamState& s : states) {
    beams.push_back(Beam{s.tokens, small ? s.small_ll : s.large_ll});
  }
  return BeamSet(std::move(beams));
}

std::size_t best_state(const std::vector<BeamState>& states) {
  std::size_t best = 0;
  double best_mean = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double len = std::max<std::size_t>(states[i].tokens.size(), 1);
    const double mean = states[i].large_ll / static_cast<double>(len);
    if (mean > best_mean) {
      best_mean = mean;
      best = i;
    }
  }
  return best;
}

void finalize_metrics(RunMetrics& m, const BeamState& selected, std::size_t prompt_len,
                      int max_new_tokens) {
  (void)prompt_len;
  m.selected_log_lik = selected.large_ll;
  m.mean_log_lik_per_token =
      max_new_tokens > 0 ? selected.large_ll / static_cast<double>(max_new_tokens) : 0.0;
  if (!m.layer_widths.empty()) {
    m.average_accepted_width =
        std::accumulate(m.layer_widths.begin(), m.layer_widths.end(), 0.0) /
        static_cast<double>(m.layer_widths.size());
  }
}

GenerationResult run_speculative_modes(const EngineConfig& config, const ModelPair& pair,
                                       const TokenSeq& prompt) {
  const Model& large = pair.large;
  const Model& small = pair.small;
  Rng rng(config.rng_seed);
  CallCounter large_calls;
  CallCounter small_calls;
  RunMetrics metrics;

  const bool keep_one = config.mode == Mode::kDsbdMemoryConstrained;
  PolicyParams policy;
  policy.threshold = config.threshold;
  policy.w_min = config.w_min;
  policy.rule = config.rule;
  if (config.mode == Mode::kSpecinferStyle) policy.fixed_target = 1;

  std::vector<BeamState> states{BeamState{prompt, 0.0, 0.0}};
  int generated = 0;

  while (generated < config.max_new_tokens) {
    DraftForest forest =
        grow_draft_forest(small, to_beam_set(states, /*small=*/true), config.draft_width,
                          config.gamma, config.warp, rng, &small_calls, config.joint_warp);
    VerificationResult vr =
        run_verification(forest, large, to_beam_set(states, /*small=*/false), config.warp,
                         policy, rng, &large_calls, config.joint_warp);

    metrics.iterations += 1;
    metrics.layers_per_iteration.push_back(vr.l_last);
    metrics.tokens_generated += static_cast<std::uint64_t>(vr.l_last);
    for (const LayerReport& lr : vr.layers) {
      metrics.layer_widths.push_back(lr.decision.target_width);
      if (!lr.is_bonus) {
        metrics.layer_betas.push_back(beta_min(lr.decision.accept_count_pmf, policy.w_min));
      }
    }
    metrics.cache_lineage_peak = std::max(metrics.cache_lineage_peak, vr.lineages.count);
    generated += vr.l_last;

    // Small-model likelihoods of the output beams. Draft beams carry them
    // already; fresh beams below the bonus layer reuse the rows drafted for
    // their parent layer; bonus beams need one extra batched small call.
    std::unordered_map<int, Distribution> bonus_rows;
    if (vr.l_last == config.gamma + 1 && generated < config.max_new_tokens) {
      std::vector<int> parent_ids;
      std::vector<TokenSeq> contexts;
      for (const VerifiedBeam& b : vr.outputs) {
        if (b.source != VerifiedBeam::Source::kBonus) continue;
        if (bonus_rows.count(b.parent_node) != 0) continue;
        bonus_rows.emplace(b.parent_node, Distribution());
        parent_ids.push_back(b.parent_node);
        contexts.push_back(forest.context_of(b.parent_node));
      }
      std::vector<Distribution> rows = batch_next_distributions(small, contexts, &small_calls);
      for (std::size_t i = 0; i < parent_ids.size(); ++i) {
        bonus_rows[parent_ids[i]] = std::move(rows[i]);
      }
    }

    std::vector<BeamState> next;
    next.reserve(vr.outputs.size());
    for (const VerifiedBeam& b : vr.outputs) {
      BeamState s;
      s.tokens = b.tokens;
      s.large_ll = b.large_log_lik;
      if (b.source == VerifiedBeam::Source::kDraft) {
        s.small_ll = forest.node(b.node).small_log_lik;
      } else if (b.layer <= config.gamma) {
        const ForestNode& parent = forest.node(b.parent_node);
        const Distribution& row =
            forest.layer_rows(b.layer)[static_cast<std::size_t>(parent.slot)];
        s.small_ll = parent.small_log_lik + safe_log(row[static_cast<std::size_t>(b.token)]);
      } else {
        const auto it = bonus_rows.find(b.parent_node);
        const ForestNode& parent = forest.node(b.parent_node);
        if (it != bonus_rows.end()) {
          s.small_ll = parent.small_log_lik + safe_log(it->second[static_cast<std::size_t>(b.token)]);
        } else {
          s.small_ll = 0.0;  // final iteration; never drafted from again
        }
      }
      next.push_back(std::move(s));
    }

    if (keep_one || config.mode == Mode::kSpecinferStyle) {
      const std::size_t best = best_state(next);
      next = {next[best]};
    }
    states = std::move(next);
  }

  // Length-align at exactly max_new_tokens.
  const std::size_t want = prompt.size() + static_cast<std::size_t>(config.max_new_tokens);
  for (BeamState& s : states) {
    if (s.tokens.size() > want) {
      s.tokens.resize(want);
      s.large_ll = sequence_log_prob(
          large, std::span<const Token>(prompt),
          std::span<const Token>(s.tokens).subspan(prompt.size()));
    }
  }

  metrics.large_calls = large_calls.calls;
  metrics.small_calls = small_calls.calls;

  const std::size_t best = best_state(states);
  finalize_metrics(metrics, states[best], prompt.size(), config.max_new_tokens);

  std::vector<Beam> beams;
  beams.reserve(states.size());
  for (const BeamState& s : states) beams.push_back(Beam{s.tokens, s.large_ll});
  BeamSet final_set(std::move(beams));
  Beam selected = select_lowest_perplexity(final_set);
  return GenerationResult{std::move(final_set), std::move(selected), std::move(metrics)};
}

GenerationResult run_multinomial(const EngineConfig& config, const ModelPair& pair,
                                 const TokenSeq& prompt) {
  Rng rng(config.rng_seed);
  CallCounter counter;
  Beam beam = multinomial_sample(pair.large, prompt, config.max_new_tokens, config.warp, rng,
                                 &counter);
  RunMetrics m;
  m.large_calls = counter.calls;
  m.small_calls = 0;
  m.tokens_generated = static_cast<std::uint64_t>(config.max_new_tokens);
  m.iterations = static_cast<std::uint64_t>(config.max_new_tokens);
  m.layers_per_iteration.assign(static_cast<std::size_t>(config.max_new_tokens), 1);
  m.layer_widths.assign(static_cast<std::size_t>(config.max_new_tokens), 1);
  m.cache_lineage_peak = 1;
  BeamState s{beam.tokens, beam.log_likelihood, 0.0};
  finalize_metrics(m, s, prompt.size(), config.max_new_tokens);
  BeamSet set({beam});
  return GenerationResult{set, beam, std::move(m)};
}

GenerationResult run_beam_sampling(const EngineConfig& config, const ModelPair& pair,
                                   const TokenSeq& prompt) {
  Rng rng(config.rng_seed);
  CallCounter counter;
  const BeamSet start({Beam{prompt, 0.0}});
  BeamSet result =
      config.deterministic_beams
          ? deterministic_beam_search(pair.large, start, config.draft_width,
                                      config.max_new_tokens, config.warp, config.joint_warp,
                                      &counter)
          : exact_beam_sample(pair.large, start, config.draft_width, config.max_new_tokens,
                              config.warp, rng, config.joint_warp, &counter);
  const int realized_width = static_cast<int>(result.width());
  RunMetrics m;
  m.large_calls = counter.calls;
  m.tokens_generated = static_cast<std::uint64_t>(config.max_new_tokens);
  m.iterations = static_cast<std::uint64_t>(config.max_new_tokens);
  m.layers_per_iteration.assign(static_cast<std::size_t>(config.max_new_tokens), 1);
  m.layer_widths.assign(static_cast<std::size_t>(config.max_new_tokens), realized_width);
  m.cache_lineage_peak = realized_width;
  Beam selected = select_lowest_perplexity(result);
  BeamState s{selected.tokens, selected.log_likelihood, 0.0};
  finalize_metrics(m, s, prompt.size(), config.max_new_tokens);
  return GenerationResult{result, selected, std::move(m)};
}

GenerationResult run_vanilla(const EngineConfig& config, const ModelPair& pair,
                             const TokenSeq& prompt) {
  const Model& large = pair.large;
  const Model& small = pair.small;
  Rng rng(config.rng_seed);
  CallCounter large_calls;
  CallCounter small_calls;
  RunMetrics m;
  m.cache_lineage_peak = 1;

  BeamState state{prompt, 0.0, 0.0};
  int generated = 0;
  while (generated < config.max_new_tokens) {
    // Draft gamma tokens autoregressively from the warped small conditionals.
    TokenSeq draft_ctx = state.tokens;
    std::vector<Token> draft;
    std::vector<Distribution> draft_rows;  // warped small conditionals, in draft order
    for (int i = 0; i < config.gamma; ++i) {
      small_calls.calls += 1;
      Distribution warped = apply_warp(config.warp, small.next(draft_ctx));
      const Token t = static_cast<Token>(warped.sample(rng));
      draft.push_back(t);
      draft_rows.push_back(std::move(warped));
      draft_ctx.push_back(t);
    }

    // One large-model call over the gamma + 1 draft prefixes.
    std::vector<TokenSeq> contexts;
    contexts.reserve(static_cast<std::size_t>(config.gamma) + 1);
    TokenSeq ctx = state.tokens;
    contexts.push_back(ctx);
    for (Token t : draft) {
      ctx.push_back(t);
      contexts.push_back(ctx);
    }
    const std::vector<Distribution> raw_rows =
        batch_next_distributions(large, contexts, &large_calls);

    int produced = 0;
    int accepted = 0;
    for (int i = 0; i < config.gamma; ++i) {
      const Distribution warped_p = apply_warp(config.warp, raw_rows[static_cast<std::size_t>(i)]);
      const Token x = draft[static_cast<std::size_t>(i)];
      const double p_x = warped_p[static_cast<std::size_t>(x)];
      const Distribution& small_warped = draft_rows[static_cast<std::size_t>(i)];
      const double ratio = std::min(1.0, p_x / small_warped[static_cast<std::size_t>(x)]);
      if (rng.next_double() < ratio) {
        state.large_ll += safe_log(raw_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(x)]);
        state.tokens.push_back(x);
        produced += 1;
        accepted += 1;
      } else {
        // Correct the rejection from the residual distribution.
        std::vector<double> residual(warped_p.size());
        double mass = 0.0;
        for (std::size_t j = 0; j < residual.size(); ++j) {
          residual[j] = std::max(warped_p[j] - small_warped[j], 0.0);
          mass += residual[j];
        }
        const Distribution correction =
            mass < 1e-12 ? warped_p : Distribution::from_weights(std::move(residual));
        const Token t = static_cast<Token>(correction.sample(rng));
        state.large_ll += safe_log(raw_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)]);
        state.tokens.push_back(t);
        produced += 1;
        break;
      }
    }
    if (accepted == config.gamma) {
      // Every draft accepted: the extra token comes from the last context.
      const Distribution warped_p =
          apply_warp(config.warp, raw_rows[static_cast<std::size_t>(config.gamma)]);
      const Token t = static_cast<Token>(warped_p.sample(rng));
      state.large_ll +=
          safe_log(raw_rows[static_cast<std::size_t>(config.gamma)][static_cast<std::size_t>(t)]);
      state.tokens.push_back(t);
      produced += 1;
    }

    m.iterations += 1;
    m.layers_per_iteration.push_back(produced);
    m.tokens_generated += static_cast<std::uint64_t>(produced);
    for (int i = 0; i < produced; ++i) m.layer_widths.push_back(1);
    generated += produced;
  }

  const std::size_t want = prompt.size() + static_cast<std::size_t>(config.max_new_tokens);
  if (state.tokens.size() > want) {
    state.tokens.resize(want);
    state.large_ll = sequence_log_prob(
        large, std::span<const Token>(prompt),
        std::span<const Token>(state.tokens).subspan(prompt.size()));
  }

  m.large_calls = large_calls.calls;
  m.small_calls = small_calls.calls;
  finalize_metrics(m, state, prompt.size(), config.max_new_tokens);
  Beam beam{state.tokens, state.large_ll};
  BeamSet set({beam});
  return GenerationResult{set, beam, std::move(m)};
}

}  // namespace

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::kDsbd: return "dsbd";
    case Mode::kDsbdMemoryConstrained: return "dsbd_memory_constrained";
    case Mode::kBeamSampling: return "beam_sampling";
    case Mode::kMultinomial: return "multinomial";
    case Mode::kVanillaSpeculative: return "vanilla_speculative";
    case Mode::kSpecinferStyle: return "specinfer_style";
  }
  return "unknown";
}

Mode mode_from_name(const std::string& name) {
  if (name == "dsbd") return Mode::kDsbd;
  if (name == "dsbd_memory_constrained") return Mode::kDsbdMemoryConstrained;
  if (name == "beam_sampling") return Mode::kBeamSampling;
  if (name == "multinomial") return Mode::kMultinomial;
  if (name == "vanilla_speculative") return Mode::kVanillaSpeculative;
  if (name == "specinfer_style") return Mode::kSpecinferStyle;
  throw std::invalid_argument("unknown mode: " + name);
}

void EngineConfig::validate() const {
  if (gamma < 1) throw std::invalid_argument("EngineConfig: gamma must be >= 1");
  if (max_new_tokens < 1) throw std::invalid_argument("EngineConfig: max_new_tokens must be >= 1");
  if (w_min < 1 || w_min > draft_width) {
    throw std::invalid_argument("EngineConfig: need 1 <= w_min <= draft width");
  }
  if (threshold < 0.0 || threshold > 1.0) {
    throw std::invalid_argument("EngineConfig: threshold outside [0, 1]");
  }
}

GenerationResult run_generation(const EngineConfig& config, const ModelPair& pair,
                                const TokenSeq& prompt) {
  config.validate();
  switch (config.mode) {
    case Mode::kMultinomial: return run_multinomial(config, pair, prompt);
    case Mode::kBeamSampling: return run_beam_sampling(config, pair, prompt);
    case Mode::kVanillaSpeculative: return run_vanilla(config, pair, prompt);
    case Mode::kDsbd:
    case Mode::kDsbdMemoryConstrained:
    case Mode::kSpecinferStyle: return run_speculative_modes(config, pair, prompt);
  }
  throw std::invalid_argument("run_generation: unknown mode");
}

Beam select_lowest_perplexity(const BeamSet& beams) {
  std::size_t best = 0;
  double best_ppl = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < beams.width(); ++i) {
    const double len = std::max<std::size_t>(beams[i].tokens.size(), 1);
    const double ppl = std::exp(-beams[i].log_likelihood / static_cast<double>(len));
    if (ppl < best_ppl) {
      best_ppl = ppl;
      best = i;
    }
  }
  return beams[best];
}

std::pair<Beam, RunMetrics> run_memory_constrained(const EngineConfig& config,
                                                   const ModelPair& pair,
                                                   const TokenSeq& prompt) {
  if (config.mode != Mode::kDsbdMemoryConstrained) {
    throw std::invalid_argument("run_memory_constrained: wrong mode");
  }
  GenerationResult r = run_generation(config, pair, prompt);
  return {std::move(r.selected), std::move(r.metrics)};
}

std::pair<Beam, RunMetrics> run_vanilla_speculative(const EngineConfig& config,
                                                    const ModelPair& pair,
                                                    const TokenSeq& prompt) {
  if (config.mode != Mode::kVanillaSpeculative) {
    throw std::invalid_argument("run_vanilla_speculative: wrong mode");
  }
  GenerationResult r = run_generation(config, pair, prompt);
  return {std::move(r.selected), std::move(r.metrics)};
}

}  // namespace specbeam
