#include "specbeam/acceptance_fixtures.hpp"

#include "specbeam/stats.hpp"

#include <algorithm>
#include <numeric>

namespace specbeam {

EngineConfig expected_layers_fixture_config() {
  // Floor = draft width keeps the width floor binding at every layer, the
  // regime where the per-layer acceptance probability equals the
  // at-least-floor probability exactly.
  EngineConfig cfg;
  cfg.mode = Mode::kDsbd;
  cfg.draft_width = 4;
  cfg.w_min = 4;
  cfg.warp = WarpSpec{10, 0.8};
  cfg.max_new_tokens = 40;
  cfg.model_seed = 404;
  return cfg;
}

ModelPair expected_layers_fixture_pair() {
  return make_model_pair(404, Vocabulary{6, {}}, 1, 0.5);
}

TokenSeq expected_layers_fixture_prompt() { return TokenSeq{0, 1}; }

MonotonicityResult run_monotonicity_check() {
  const ModelPair pair = make_model_pair(901, Vocabulary{8, {}}, 1, 0.35);
  EngineConfig cfg;
  cfg.mode = Mode::kDsbd;
  cfg.gamma = 3;
  cfg.w_min = 1;
  cfg.warp = WarpSpec{10, 0.8};
  cfg.max_new_tokens = 48;
  cfg.model_seed = 901;

  const int trials = 400;
  MonotonicityResult result;
  Rng seeder(909);

  int cell_index = 0;
  for (int ws = 2; ws <= 6; ++ws) {
    for (double t : {0.7, 0.9}) {
      cfg.draft_width = ws;
      cfg.threshold = t;
      std::vector<double> widths;
      std::vector<double> lls;
      for (int trial = 0; trial < trials; ++trial) {
        Rng trial_rng = seeder.child(static_cast<std::uint64_t>(cell_index)).child(
            static_cast<std::uint64_t>(trial));
        const TokenSeq prompt{static_cast<Token>(trial_rng.next_below(8)),
                              static_cast<Token>(trial_rng.next_below(8))};
        cfg.rng_seed = trial_rng.child(99).seed();
        const GenerationResult r = run_generation(cfg, pair, prompt);
        for (int w : r.metrics.layer_widths) widths.push_back(w);
        lls.push_back(r.metrics.mean_log_lik_per_token);
      }
      MonotonicityCell cell;
      cell.draft_width = ws;
      cell.threshold = t;
      cell.wbar = mean_ci(widths).mean;
      cell.mean_ll = mean_ci(lls).mean;
      result.cells.push_back(cell);
      cell_index += 1;
    }
  }

  auto cell_at = [&](int ws, double t) -> const MonotonicityCell& {
    for (const MonotonicityCell& c : result.cells) {
      if (c.draft_width == ws && c.threshold == t) return c;
    }
    return result.cells.front();
  };

  result.wbar_monotone_in_ws = true;
  for (double t : {0.7, 0.9}) {
    for (int ws = 3; ws <= 6; ++ws) {
      result.wbar_monotone_in_ws =
          result.wbar_monotone_in_ws && cell_at(ws, t).wbar >= cell_at(ws - 1, t).wbar;
    }
  }
  result.wbar_antitone_in_t = true;
  for (int ws = 2; ws <= 6; ++ws) {
    result.wbar_antitone_in_t =
        result.wbar_antitone_in_t && cell_at(ws, 0.9).wbar <= cell_at(ws, 0.7).wbar;
  }

  result.ll_monotone_in_wbar = true;
  for (double t : {0.7, 0.9}) {
    for (int ws = 3; ws <= 6; ++ws) {
      result.ll_monotone_in_wbar =
          result.ll_monotone_in_wbar && cell_at(ws, t).mean_ll >= cell_at(ws - 1, t).mean_ll;
    }
  }

  std::vector<MonotonicityCell> by_wbar = result.cells;
  std::stable_sort(by_wbar.begin(), by_wbar.end(),
                   [](const MonotonicityCell& a, const MonotonicityCell& b) {
                     return a.wbar < b.wbar;
                   });
  for (std::size_t i = 1; i < by_wbar.size(); ++i) {
    if (by_wbar[i].mean_ll < by_wbar[i - 1].mean_ll) result.pooled_inversions += 1;
  }
  return result;
}

}  // namespace specbeam
