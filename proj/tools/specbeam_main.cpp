// Experiment CLI: decoding runs, acceptance suites, parameter sweeps and
// forest dumps over the seeded toy models.

#include "specbeam/acceptance.hpp"
#include "specbeam/beam_ref.hpp"
#include "specbeam/engine.hpp"
#include "specbeam/experiment.hpp"
#include "specbeam/verifier.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <iostream>
#include <string>

namespace {

using namespace specbeam;

struct CommonFlags {
  std::string mode = "dsbd";
  int gamma = 3;
  int ws = 4;
  double threshold_t = 0.7;
  int wmin = 1;
  // grid-capable forms used by the sweep subcommand (comma lists)
  std::string gamma_list = "3";
  std::string ws_list = "4";
  std::string threshold_list = "0.7";
  std::string wmin_list = "1";
  int top_k = 10;
  double top_p = 0.8;
  int vocab_size = 8;
  int order = 1;
  double divergence = 0.3;
  double concentration = 1.0;
  std::uint64_t model_seed = 1;
  std::uint64_t rng_seed = 1;
  int trials = 20;
  int max_new_tokens = 64;
  std::string prompt = "0";
  std::string out;
  std::string format = "both";
  std::string tests;
  bool per_beam_warp = false;
  bool deterministic_beams = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f, bool grid_axes = false) {
  cmd->add_option("--mode", f.mode,
                  "dsbd | dsbd_memory_constrained | beam_sampling | multinomial | "
                  "vanilla_speculative | specinfer_style");
  if (grid_axes) {
    cmd->add_option("--gamma", f.gamma_list, "draft depth (comma list)");
    cmd->add_option("--ws", f.ws_list, "draft beam width W_S (comma list)");
    cmd->add_option("--threshold-t", f.threshold_list, "dynamic width threshold t (comma list)");
    cmd->add_option("--wmin", f.wmin_list, "minimum width floor (comma list)");
  } else {
    cmd->add_option("--gamma", f.gamma, "draft depth");
    cmd->add_option("--ws", f.ws, "draft beam width W_S");
    cmd->add_option("--threshold-t", f.threshold_t, "dynamic width threshold t");
    cmd->add_option("--wmin", f.wmin, "minimum width floor");
  }
  cmd->add_option("--top-k", f.top_k, "top-k warp (0 disables)");
  cmd->add_option("--top-p", f.top_p, "top-p warp (1.0 disables)");
  cmd->add_option("--vocab-size", f.vocab_size, "toy vocabulary size");
  cmd->add_option("--order", f.order, "Markov order of the toy models");
  cmd->add_option("--divergence", f.divergence, "small/large model gap in [0,1]");
  cmd->add_option("--concentration", f.concentration, "Dirichlet concentration");
  cmd->add_option("--model-seed", f.model_seed, "model construction seed");
  cmd->add_option("--rng-seed", f.rng_seed, "sampling seed");
  cmd->add_option("--trials", f.trials, "trials per grid cell");
  cmd->add_option("--max-new-tokens", f.max_new_tokens, "tokens to generate");
  cmd->add_option("--prompt", f.prompt, "comma-separated prompt token ids");
  cmd->add_option("--out", f.out, "output path base (.csv/.json appended)");
  cmd->add_option("--format", f.format, "csv | json | both (reports), json | text (dumps)");
  cmd->add_flag("--per-beam-warp", f.per_beam_warp,
                "warp each beam's conditional instead of the flattened joint");
  cmd->add_flag("--deterministic-beams", f.deterministic_beams,
                "beam_sampling baseline keeps the top-W joint cells instead of sampling");
}

WarpSpec warp_from_flags(const CommonFlags& f) {
  WarpSpec w;
  if (f.top_k > 0) w.top_k = f.top_k;
  if (f.top_p > 0.0 && f.top_p < 1.0) w.top_p = f.top_p;
  return w;
}

TokenSeq parse_tokens(const std::string& s) {
  TokenSeq tokens;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      if (!cur.empty()) tokens.push_back(std::stoi(cur));
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  return tokens;
}

std::vector<int> parse_ids(const std::string& s) {
  std::vector<int> ids;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      if (!cur.empty()) ids.push_back(std::stoi(cur));
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  return ids;
}

EngineConfig engine_config_from_flags(const CommonFlags& f) {
  EngineConfig cfg;
  cfg.mode = mode_from_name(f.mode);
  cfg.gamma = f.gamma;
  cfg.draft_width = f.ws;
  cfg.threshold = f.threshold_t;
  cfg.w_min = f.wmin;
  cfg.warp = warp_from_flags(f);
  cfg.max_new_tokens = f.max_new_tokens;
  cfg.model_seed = f.model_seed;
  cfg.rng_seed = f.rng_seed;
  cfg.joint_warp = f.per_beam_warp ? JointWarpMode::kPerBeam : JointWarpMode::kFlattenedJoint;
  cfg.deterministic_beams = f.deterministic_beams;
  return cfg;
}

int cmd_generate(const CommonFlags& f) {
  const EngineConfig cfg = engine_config_from_flags(f);
  const ModelPair pair = make_model_pair(f.model_seed, Vocabulary{f.vocab_size, {}}, f.order,
                                         f.divergence, f.concentration);
  const TokenSeq prompt = parse_tokens(f.prompt);
  const GenerationResult r = run_generation(cfg, pair, prompt);

  if (f.format == "json") {
    nlohmann::ordered_json j;
    j["mode"] = mode_name(cfg.mode);
    j["prompt"] = prompt;
    j["selected_tokens"] = r.selected.tokens;
    j["selected_log_lik"] = r.selected.log_likelihood;
    j["beams"] = nlohmann::ordered_json::array();
    for (const Beam& b : r.beams) {
      j["beams"].push_back({{"tokens", b.tokens}, {"log_lik", b.log_likelihood}});
    }
    j["metrics"] = {
        {"large_calls", r.metrics.large_calls},
        {"small_calls", r.metrics.small_calls},
        {"tokens_generated", r.metrics.tokens_generated},
        {"iterations", r.metrics.iterations},
        {"tokens_per_large_call", r.metrics.tokens_per_large_call()},
        {"avg_accepted_width", r.metrics.average_accepted_width},
        {"cache_lineage_peak", r.metrics.cache_lineage_peak},
        {"mean_log_lik_per_token", r.metrics.mean_log_lik_per_token},
    };
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  std::cout << "mode: " << mode_name(cfg.mode) << "\n";
  std::cout << "selected:";
  for (Token t : r.selected.tokens) std::cout << ' ' << t;
  std::cout << "\nlog_lik: " << r.selected.log_likelihood << "\n";
  if (r.beams.width() > 1) {
    std::cout << "beams: " << r.beams.width() << "\n";
    for (const Beam& b : r.beams) {
      std::cout << "  [" << b.log_likelihood << "]";
      for (Token t : b.tokens) std::cout << ' ' << t;
      std::cout << "\n";
    }
  }
  std::cout << "large_calls: " << r.metrics.large_calls << "\n"
            << "small_calls: " << r.metrics.small_calls << "\n"
            << "tokens_generated: " << r.metrics.tokens_generated << "\n"
            << "iterations: " << r.metrics.iterations << "\n"
            << "tokens_per_large_call: " << r.metrics.tokens_per_large_call() << "\n"
            << "avg_accepted_width: " << r.metrics.average_accepted_width << "\n"
            << "cache_lineage_peak: " << r.metrics.cache_lineage_peak << "\n"
            << "mean_log_lik_per_token: " << r.metrics.mean_log_lik_per_token << "\n";
  return 0;
}

int cmd_verify(const CommonFlags& f) {
  const std::vector<int> ids = f.tests.empty() ? std::vector<int>{} : parse_ids(f.tests);
  const std::vector<TestRow> rows = run_acceptance(ids, std::cout);
  for (const TestRow& row : rows) {
    if (!row.pass) return 1;
  }
  return 0;
}

int cmd_sweep(CLI::App* cmd, const CommonFlags& f, const std::string& config_path) {
  ExperimentSpec spec;
  if (!config_path.empty()) spec = parse_spec_file(config_path);

  // Flags override file values, but only flags that were actually given.
  auto seen = [cmd](const std::string& name) { return cmd->count(name) > 0; };
  if (seen("--mode")) spec.mode = mode_from_name(f.mode);
  if (seen("--gamma")) apply_spec_line(spec, "gamma", f.gamma_list);
  if (seen("--ws")) apply_spec_line(spec, "ws", f.ws_list);
  if (seen("--threshold-t")) apply_spec_line(spec, "threshold-t", f.threshold_list);
  if (seen("--wmin")) apply_spec_line(spec, "wmin", f.wmin_list);
  if (seen("--top-k") || seen("--top-p") || config_path.empty()) {
    spec.warp = warp_from_flags(f);
  }
  if (seen("--vocab-size")) spec.vocab_size = f.vocab_size;
  if (seen("--order")) spec.order = f.order;
  if (seen("--divergence")) spec.divergence = f.divergence;
  if (seen("--concentration")) spec.concentration = f.concentration;
  if (seen("--model-seed")) spec.model_seed = f.model_seed;
  if (seen("--rng-seed")) spec.rng_seed = f.rng_seed;
  if (seen("--trials")) spec.trials = f.trials;
  if (seen("--max-new-tokens")) spec.max_new_tokens = f.max_new_tokens;
  if (seen("--prompt")) spec.prompt = parse_tokens(f.prompt);
  if (seen("--out")) spec.out_path = f.out;
  if (seen("--format")) spec.format = f.format;
  if (seen("--tests")) spec.tests = parse_ids(f.tests);
  if (seen("--per-beam-warp")) {
    spec.joint_warp = f.per_beam_warp ? JointWarpMode::kPerBeam : JointWarpMode::kFlattenedJoint;
  }
  if (seen("--deterministic-beams")) spec.deterministic_beams = f.deterministic_beams;

  const Report report = run_experiment(spec);
  if (!spec.out_path.empty()) {
    write_report(report);
    std::cout << "wrote " << spec.out_path << (spec.format == "both" ? ".{csv,json}" : "." + spec.format)
              << " (" << report.cells.size() << " cells)\n";
  } else {
    std::cout << report_to_csv(report);
  }
  if (!report.tests.empty()) {
    std::ostringstream ignored;
    for (const TestRow& t : report.tests) {
      std::cout << (t.pass ? "[PASS] " : "[FAIL] ") << "C" << t.id << " " << t.name << "\n";
    }
  }
  return report.all_tests_passed() ? 0 : 1;
}

int cmd_dump_forest(const CommonFlags& f, bool with_masks, bool with_verification) {
  const ModelPair pair = make_model_pair(f.model_seed, Vocabulary{f.vocab_size, {}}, f.order,
                                         f.divergence, f.concentration);
  const WarpSpec warp = warp_from_flags(f);
  const JointWarpMode jmode =
      f.per_beam_warp ? JointWarpMode::kPerBeam : JointWarpMode::kFlattenedJoint;
  const TokenSeq prompt = parse_tokens(f.prompt);
  Rng rng(f.rng_seed);

  const BeamSet input({Beam{prompt, 0.0}});
  DraftForest forest = grow_draft_forest(pair.small, input, f.ws, f.gamma, warp, rng,
                                         nullptr, jmode);
  std::optional<VerificationResult> vr;
  if (with_verification) {
    PolicyParams policy;
    policy.threshold = f.threshold_t;
    policy.w_min = f.wmin;
    vr = run_verification(forest, pair.large, input, warp, policy, rng, nullptr, jmode);
  }

  if (f.format == "text") {
    // Indented tree, one node per line.
    std::vector<std::vector<int>> children(forest.nodes().size());
    for (std::size_t i = 0; i < forest.nodes().size(); ++i) {
      const int p = forest.node(static_cast<int>(i)).parent;
      if (p >= 0) children[static_cast<std::size_t>(p)].push_back(static_cast<int>(i));
    }
    std::function<void(int, int)> print_node = [&](int id, int depth) {
      const ForestNode& n = forest.node(id);
      for (int d = 0; d < depth; ++d) std::cout << "  ";
      if (n.layer == 0) {
        std::cout << "root[" << n.slot << "]";
        for (Token t : forest.input()[static_cast<std::size_t>(n.slot)].tokens) std::cout << ' ' << t;
      } else {
        std::cout << "token " << n.token << "  q=" << n.q_prob
                  << (with_verification ? (n.rejected ? "  rejected" : "  accepted") : "");
      }
      std::cout << "\n";
      for (int c : children[static_cast<std::size_t>(id)]) print_node(c, depth + 1);
    };
    for (int root : forest.layer(0)) print_node(root, 0);
    return 0;
  }

  nlohmann::ordered_json j;
  j["gamma"] = forest.gamma();
  j["vocab"] = forest.vocab();
  j["nodes"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < forest.nodes().size(); ++i) {
    const ForestNode& n = forest.node(static_cast<int>(i));
    j["nodes"].push_back({
        {"id", i},
        {"token", n.token},
        {"parent", n.parent},
        {"layer", n.layer},
        {"q_prob", n.layer == 0 ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(n.q_prob)},
        {"small_log_lik", n.small_log_lik},
        {"status", n.layer == 0 ? "root" : (with_verification ? (n.rejected ? "rejected" : "accepted") : "draft")},
    });
  }
  if (with_masks) {
    j["trees"] = nlohmann::ordered_json::array();
    for (int root : forest.layer(0)) {
      const TopologyMask tm = topology_mask(forest, root);
      nlohmann::ordered_json tree;
      tree["root"] = root;
      tree["dfs_order"] = tm.dfs_order;
      tree["mask"] = nlohmann::ordered_json::array();
      for (const auto& mask_row : tm.mask) {
        std::string bits;
        for (bool b : mask_row) bits.push_back(b ? '1' : '0');
        tree["mask"].push_back(bits);
      }
      j["trees"].push_back(std::move(tree));
    }
  }
  if (vr) {
    nlohmann::ordered_json v;
    v["l_last"] = vr->l_last;
    v["lineage_count"] = vr->lineages.count;
    v["layers"] = nlohmann::ordered_json::array();
    for (const LayerReport& lr : vr->layers) {
      v["layers"].push_back({
          {"target_width", lr.decision.target_width},
          {"candidates", lr.candidate_count},
          {"accepted_from_drafts", lr.accepted_from_drafts},
          {"accepted", lr.accepted},
          {"bonus", lr.is_bonus},
          {"beta_wmin",
           lr.is_bonus ? nlohmann::ordered_json(nullptr)
                       : nlohmann::ordered_json(beta_min(lr.decision.accept_count_pmf, f.wmin))},
      });
    }
    v["outputs"] = nlohmann::ordered_json::array();
    for (const VerifiedBeam& b : vr->outputs) {
      const char* source = b.source == VerifiedBeam::Source::kDraft      ? "draft"
                           : b.source == VerifiedBeam::Source::kResidual ? "residual"
                           : b.source == VerifiedBeam::Source::kFill     ? "fill"
                                                                         : "bonus";
      v["outputs"].push_back({{"tokens", b.tokens}, {"large_log_lik", b.large_log_lik},
                              {"source", source}});
    }
    j["verification"] = std::move(v);
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"speculative beam decoding experiment harness"};
  app.require_subcommand(1);

  CommonFlags gen_flags, verify_flags, sweep_flags, dump_flags;
  std::string config_path;
  bool dump_masks = false;
  bool dump_verified = true;

  CLI::App* generate = app.add_subcommand("generate", "run one decoding loop and print the result");
  add_common_flags(generate, gen_flags);

  CLI::App* verify = app.add_subcommand("verify", "run the acceptance-test suites");
  verify->add_option("--tests", verify_flags.tests, "comma-separated criterion ids (default all)");

  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter grid and write CSV/JSON reports");
  add_common_flags(sweep, sweep_flags, /*grid_axes=*/true);
  sweep->add_option("--config", config_path, "key = value config file; flags override");
  sweep->add_option("--tests", sweep_flags.tests, "acceptance criteria to run with the sweep");

  CLI::App* dump = app.add_subcommand("dump-forest", "grow a draft forest and dump it");
  add_common_flags(dump, dump_flags);
  dump->add_flag("--masks", dump_masks, "include DFS orders and topology masks");
  dump->add_flag("!--no-verify", dump_verified, "skip verification (no accepted/rejected flags)");
  dump_flags.format = "json";

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(gen_flags);
    if (verify->parsed()) return cmd_verify(verify_flags);
    if (sweep->parsed()) return cmd_sweep(sweep, sweep_flags, config_path);
    if (dump->parsed()) return cmd_dump_forest(dump_flags, dump_masks, dump_verified);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
