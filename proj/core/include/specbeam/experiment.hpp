#pragma once

#include "specbeam/engine.hpp"
#include "specbeam/stats.hpp"

#include <string>
#include <vector>

namespace specbeam {

/// A grid of engine configurations over one seeded model pair, plus the
/// acceptance tests to run alongside. Every field maps to a config-file key
/// and a CLI flag of the same name; flags override file values.
struct ExperimentSpec {
  std::uint64_t model_seed = 1;
  std::uint64_t rng_seed = 1;
  int vocab_size = 8;
  int order = 1;
  double divergence = 0.3;
  double concentration = 1.0;
  Mode mode = Mode::kDsbd;
  std::vector<int> gammas = {3};
  std::vector<int> draft_widths = {4};
  std::vector<double> thresholds = {0.7};
  std::vector<int> w_mins = {1};
  WarpSpec warp;
  JointWarpMode joint_warp = JointWarpMode::kFlattenedJoint;
  bool deterministic_beams = false;
  int trials = 20;
  int max_new_tokens = 64;
  TokenSeq prompt = {0};
  std::vector<int> tests;  // acceptance criterion ids; empty = none
  std::string out_path;    // base path for reports ("<out>.csv" / "<out>.json")
  std::string format = "both";  // csv | json | both

  void validate() const;
};

/// Aggregates of one grid cell.
struct CellResult {
  int gamma = 0;
  int draft_width = 0;
  double threshold = 0.0;
  int w_min = 0;
  int trials = 0;
  std::uint64_t tokens = 0;
  std::uint64_t large_calls = 0;
  std::uint64_t small_calls = 0;
  double tokens_per_large_call = 0.0;
  double layers_mean = 0.0;
  double layers_ci95 = 0.0;
  double avg_accepted_width = 0.0;  // pooled over produced layers
  double beta_bar = 0.0;            // pooled over draft layers
  double mean_log_lik_per_token = 0.0;
  int lineage_peak = 0;
};

struct TestRow {
  int id = 0;
  std::string name;
  bool pass = false;
  double statistic = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct Report {
  ExperimentSpec spec;
  std::vector<CellResult> cells;
  std::vector<TestRow> tests;

  bool all_tests_passed() const {
    for (const TestRow& t : tests) {
      if (!t.pass) return false;
    }
    return true;
  }
};

/// Executes the grid (sequentially, one seeded generator per (cell, trial)
/// derived by the documented splitting rule), runs the selected acceptance
/// tests, and assembles the report. Writing is separate so callers can
/// inspect first.
Report run_experiment(const ExperimentSpec& spec);

/// Fixed, versioned CSV schema; cells first, then a test section. Identical
/// content to the JSON form.
std::string report_to_csv(const Report& report);
std::string report_to_json(const Report& report);

/// Writes "<out>.csv" / "<out>.json" according to spec.format.
void write_report(const Report& report);

/// Flat key = value file with comma lists for grid axes; '#' starts a
/// comment. Unknown keys are an error.
ExperimentSpec parse_spec_file(const std::string& path);
void apply_spec_line(ExperimentSpec& spec, const std::string& key, const std::string& value);

}  // namespace specbeam
