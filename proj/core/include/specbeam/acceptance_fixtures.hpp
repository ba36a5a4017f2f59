#pragma once

#include "specbeam/engine.hpp"

#include <vector>

namespace specbeam {

/// Fixture for the expected-layers check: a pair whose small/large gap keeps
/// the width floor binding, so each layer's acceptance probability equals
/// its at-least-floor probability and the closed form applies directly.
EngineConfig expected_layers_fixture_config();
ModelPair expected_layers_fixture_pair();
TokenSeq expected_layers_fixture_prompt();

struct MonotonicityCell {
  int draft_width = 0;
  double threshold = 0.0;
  double wbar = 0.0;
  double mean_ll = 0.0;
};

struct MonotonicityResult {
  std::vector<MonotonicityCell> cells;
  bool wbar_monotone_in_ws = false;
  bool wbar_antitone_in_t = false;
  // Output quality follows the realized width along the draft-width sweep
  // (checked per threshold, where the width knob alone moves W-bar).
  bool ll_monotone_in_wbar = false;
  // The same relation over all cells pooled, where the two threshold groups
  // interleave; reported, since the threshold leaves its own small imprint
  // on quality beyond W-bar.
  int pooled_inversions = 0;
};

/// Sweeps draft width 2..6 against thresholds {0.7, 0.9} on the fixture
/// model and checks the directional relations between the knobs, the
/// realized average accepted width and output quality.
MonotonicityResult run_monotonicity_check();

}  // namespace specbeam
