#pragma once

#include "specbeam/beam_ref.hpp"
#include "specbeam/verifier.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace specbeam {

enum class Mode {
  kDsbd,
  kDsbdMemoryConstrained,
  kBeamSampling,
  kMultinomial,
  kVanillaSpeculative,
  kSpecinferStyle,
};

const char* mode_name(Mode m);
Mode mode_from_name(const std::string& name);

struct EngineConfig {
  int gamma = 3;
  int draft_width = 4;  // W_S
  double threshold = 0.7;
  int w_min = 1;
  WarpSpec warp;
  int max_new_tokens = 64;
  Mode mode = Mode::kDsbd;
  std::uint64_t model_seed = 1;
  std::uint64_t rng_seed = 1;
  JointWarpMode joint_warp = JointWarpMode::kFlattenedJoint;
  AcceptRule rule = AcceptRule::kTargetOverDraft;
  // Baseline switch for beam_sampling mode: keep the top-W joint cells
  // instead of sampling them.
  bool deterministic_beams = false;

  void validate() const;
};

/// Counters and per-layer traces of one generation run.
struct RunMetrics {
  std::uint64_t large_calls = 0;
  std::uint64_t small_calls = 0;
  std::uint64_t tokens_generated = 0;
  std::uint64_t iterations = 0;
  std::vector<int> layers_per_iteration;
  std::vector<int> layer_widths;    // output width of every produced layer
  std::vector<double> layer_betas;  // at-least-w_min probability per draft layer
  double average_accepted_width = 0.0;
  int cache_lineage_peak = 0;
  double selected_log_lik = 0.0;         // large-model log-lik of the selected continuation
  double mean_log_lik_per_token = 0.0;   // selected_log_lik / generated length

  double tokens_per_large_call() const {
    return large_calls == 0 ? 0.0
                            : static_cast<double>(tokens_generated) / static_cast<double>(large_calls);
  }
};

struct GenerationResult {
  BeamSet beams;  // final beams with large-model log-likelihoods
  Beam selected;  // lowest-perplexity beam
  RunMetrics metrics;
};

/// Runs one full decoding loop in the configured mode until every beam
/// carries exactly max_new_tokens generated tokens (the last iteration is
/// truncated to the limit). Deterministic given (model_seed, rng_seed).
GenerationResult run_generation(const EngineConfig& config, const ModelPair& pair,
                                const TokenSeq& prompt);

/// The beam minimizing exp(-log_likelihood / length); ties go to the lowest
/// beam index.
Beam select_lowest_perplexity(const BeamSet& beams);

/// Memory-constrained decoding: after each iteration only the
/// lowest-perplexity output beam is carried forward, so a single cache
/// lineage is live throughout.
std::pair<Beam, RunMetrics> run_memory_constrained(const EngineConfig& config,
                                                   const ModelPair& pair,
                                                   const TokenSeq& prompt);

/// Classic single-sequence speculative decoding baseline: draft gamma tokens
/// from the warped small conditionals, verify them in one large-model call,
/// correct the first rejection from the residual distribution.
std::pair<Beam, RunMetrics> run_vanilla_speculative(const EngineConfig& config,
                                                    const ModelPair& pair,
                                                    const TokenSeq& prompt);

}  // namespace specbeam
