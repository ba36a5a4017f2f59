#include "specbeam/experiment.hpp"

#include "specbeam/acceptance.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace specbeam {

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return std::string(buf);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  return parts;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const std::string& p : split_list(s)) out.push_back(std::stoi(p));
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  for (const std::string& p : split_list(s)) out.push_back(std::stod(p));
  return out;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (gammas.empty() || draft_widths.empty() || thresholds.empty() || w_mins.empty()) {
    throw std::invalid_argument("ExperimentSpec: empty grid axis");
  }
  if (trials < 1) throw std::invalid_argument("ExperimentSpec: trials must be >= 1");
  if (vocab_size < 2) throw std::invalid_argument("ExperimentSpec: vocab size must be >= 2");
  if (format != "csv" && format != "json" && format != "both") {
    throw std::invalid_argument("ExperimentSpec: format must be csv, json or both");
  }
}

Report run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  Report report;
  report.spec = spec;

  const ModelPair pair = make_model_pair(spec.model_seed, Vocabulary{spec.vocab_size, {}},
                                         spec.order, spec.divergence, spec.concentration);

  int cell_index = 0;
  for (int gamma : spec.gammas) {
    for (int ws : spec.draft_widths) {
      for (double t : spec.thresholds) {
        for (int wmin : spec.w_mins) {
          CellResult cell;
          cell.gamma = gamma;
          cell.draft_width = ws;
          cell.threshold = t;
          cell.w_min = std::min(wmin, ws);
          cell.trials = spec.trials;

          std::vector<double> layers;
          std::vector<double> widths;
          std::vector<double> betas;
          std::vector<double> mean_lls;

          for (int trial = 0; trial < spec.trials; ++trial) {
            EngineConfig cfg;
            cfg.gamma = gamma;
            cfg.draft_width = ws;
            cfg.threshold = t;
            cfg.w_min = cell.w_min;
            cfg.warp = spec.warp;
            cfg.max_new_tokens = spec.max_new_tokens;
            cfg.mode = spec.mode;
            cfg.model_seed = spec.model_seed;
            cfg.joint_warp = spec.joint_warp;
            cfg.deterministic_beams = spec.deterministic_beams;
            // Documented splitting rule: per-trial generators derive from
            // (base seed, cell index, trial index) via Rng::child.
            cfg.rng_seed =
                Rng(spec.rng_seed).child(static_cast<std::uint64_t>(cell_index))
                    .child(static_cast<std::uint64_t>(trial)).seed();

            const GenerationResult r = run_generation(cfg, pair, spec.prompt);
            cell.tokens += r.metrics.tokens_generated;
            cell.large_calls += r.metrics.large_calls;
            cell.small_calls += r.metrics.small_calls;
            cell.lineage_peak = std::max(cell.lineage_peak, r.metrics.cache_lineage_peak);
            for (int l : r.metrics.layers_per_iteration) layers.push_back(l);
            for (int w : r.metrics.layer_widths) widths.push_back(w);
            for (double b : r.metrics.layer_betas) betas.push_back(b);
            mean_lls.push_back(r.metrics.mean_log_lik_per_token);
          }

          const MeanCi layer_ci = mean_ci(layers);
          cell.layers_mean = layer_ci.mean;
          cell.layers_ci95 = layer_ci.half_width;
          cell.avg_accepted_width = mean_ci(widths).mean;
          cell.beta_bar = mean_ci(betas).mean;
          cell.mean_log_lik_per_token = mean_ci(mean_lls).mean;
          cell.tokens_per_large_call =
              cell.large_calls == 0
                  ? 0.0
                  : static_cast<double>(cell.tokens) / static_cast<double>(cell.large_calls);
          report.cells.push_back(cell);
          cell_index += 1;
        }
      }
    }
  }

  if (!spec.tests.empty()) {
    std::ostringstream sink;
    report.tests = run_acceptance(spec.tests, sink);
  }
  return report;
}

std::string report_to_csv(const Report& report) {
  std::ostringstream os;
  const ExperimentSpec& s = report.spec;
  os << "# specbeam sweep report schema=1\n";
  os << "# efficiency proxy: tokens per large-model call and calls per token stand in for "
        "wall-clock and energy, which are hardware-bound\n";
  os << "# mode=" << mode_name(s.mode) << " vocab_size=" << s.vocab_size << " order=" << s.order
     << " divergence=" << fmt(s.divergence) << " model_seed=" << s.model_seed
     << " rng_seed=" << s.rng_seed << " top_k=" << (s.warp.top_k ? std::to_string(*s.warp.top_k) : "none")
     << " top_p=" << (s.warp.top_p ? fmt(*s.warp.top_p) : "none")
     << " joint_warp=" << (s.joint_warp == JointWarpMode::kFlattenedJoint ? "flattened" : "per_beam")
     << " max_new_tokens=" << s.max_new_tokens << "\n";
  os << "gamma,ws,threshold_t,wmin,trials,tokens,large_calls,small_calls,"
        "tokens_per_large_call,layers_mean,layers_ci95,avg_accepted_width,beta_bar,"
        "mean_log_lik_per_token,lineage_peak\n";
  for (const CellResult& c : report.cells) {
    os << c.gamma << ',' << c.draft_width << ',' << fmt(c.threshold) << ',' << c.w_min << ','
       << c.trials << ',' << c.tokens << ',' << c.large_calls << ',' << c.small_calls << ','
       << fmt(c.tokens_per_large_call) << ',' << fmt(c.layers_mean) << ',' << fmt(c.layers_ci95)
       << ',' << fmt(c.avg_accepted_width) << ',' << fmt(c.beta_bar) << ','
       << fmt(c.mean_log_lik_per_token) << ',' << c.lineage_peak << "\n";
  }
  if (!report.tests.empty()) {
    os << "# tests\n";
    os << "test_id,name,pass,statistic,threshold,detail\n";
    for (const TestRow& t : report.tests) {
      std::string detail = t.detail;
      std::replace(detail.begin(), detail.end(), ',', ';');
      os << t.id << ',' << t.name << ',' << (t.pass ? "pass" : "fail") << ','
         << fmt(t.statistic) << ',' << fmt(t.threshold) << ',' << detail << "\n";
    }
  }
  return os.str();
}

std::string report_to_json(const Report& report) {
  nlohmann::ordered_json j;
  const ExperimentSpec& s = report.spec;
  j["schema"] = 1;
  j["efficiency_proxy"] =
      "tokens per large-model call and calls per token stand in for wall-clock and energy";
  j["spec"] = {
      {"mode", mode_name(s.mode)},
      {"vocab_size", s.vocab_size},
      {"order", s.order},
      {"divergence", s.divergence},
      {"model_seed", s.model_seed},
      {"rng_seed", s.rng_seed},
      {"top_k", s.warp.top_k ? nlohmann::ordered_json(*s.warp.top_k) : nlohmann::ordered_json(nullptr)},
      {"top_p", s.warp.top_p ? nlohmann::ordered_json(*s.warp.top_p) : nlohmann::ordered_json(nullptr)},
      {"joint_warp", s.joint_warp == JointWarpMode::kFlattenedJoint ? "flattened" : "per_beam"},
      {"max_new_tokens", s.max_new_tokens},
      {"trials", s.trials},
  };
  j["cells"] = nlohmann::ordered_json::array();
  for (const CellResult& c : report.cells) {
    j["cells"].push_back({
        {"gamma", c.gamma},
        {"ws", c.draft_width},
        {"threshold_t", c.threshold},
        {"wmin", c.w_min},
        {"trials", c.trials},
        {"tokens", c.tokens},
        {"large_calls", c.large_calls},
        {"small_calls", c.small_calls},
        {"tokens_per_large_call", c.tokens_per_large_call},
        {"layers_mean", c.layers_mean},
        {"layers_ci95", c.layers_ci95},
        {"avg_accepted_width", c.avg_accepted_width},
        {"beta_bar", c.beta_bar},
        {"mean_log_lik_per_token", c.mean_log_lik_per_token},
        {"lineage_peak", c.lineage_peak},
    });
  }
  j["tests"] = nlohmann::ordered_json::array();
  for (const TestRow& t : report.tests) {
    j["tests"].push_back({
        {"id", t.id},
        {"name", t.name},
        {"pass", t.pass},
        {"statistic", t.statistic},
        {"threshold", t.threshold},
        {"detail", t.detail},
    });
  }
  return j.dump(2) + "\n";
}

void write_report(const Report& report) {
  const std::string& base = report.spec.out_path;
  if (base.empty()) throw std::invalid_argument("write_report: no output path");
  const auto write_file = [](const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path);
  };
  if (report.spec.format == "csv" || report.spec.format == "both") {
    write_file(base + ".csv", report_to_csv(report));
  }
  if (report.spec.format == "json" || report.spec.format == "both") {
    write_file(base + ".json", report_to_json(report));
  }
}

void apply_spec_line(ExperimentSpec& spec, const std::string& key, const std::string& value) {
  if (key == "mode") spec.mode = mode_from_name(value);
  else if (key == "gamma") spec.gammas = parse_int_list(value);
  else if (key == "ws") spec.draft_widths = parse_int_list(value);
  else if (key == "threshold-t") spec.thresholds = parse_double_list(value);
  else if (key == "wmin") spec.w_mins = parse_int_list(value);
  else if (key == "top-k") spec.warp.top_k = std::stoi(value);
  else if (key == "top-p") spec.warp.top_p = std::stod(value);
  else if (key == "vocab-size") spec.vocab_size = std::stoi(value);
  else if (key == "order") spec.order = std::stoi(value);
  else if (key == "divergence") spec.divergence = std::stod(value);
  else if (key == "concentration") spec.concentration = std::stod(value);
  else if (key == "model-seed") spec.model_seed = std::stoull(value);
  else if (key == "rng-seed") spec.rng_seed = std::stoull(value);
  else if (key == "trials") spec.trials = std::stoi(value);
  else if (key == "max-new-tokens") spec.max_new_tokens = std::stoi(value);
  else if (key == "prompt") spec.prompt = parse_int_list(value);
  else if (key == "tests") spec.tests = parse_int_list(value);
  else if (key == "out") spec.out_path = value;
  else if (key == "format") spec.format = value;
  else if (key == "deterministic-beams") {
    spec.deterministic_beams = (value == "1" || value == "true");
  } else if (key == "per-beam-warp") {
    spec.joint_warp = (value == "1" || value == "true") ? JointWarpMode::kPerBeam
                                                        : JointWarpMode::kFlattenedJoint;
  } else {
    throw std::invalid_argument("unknown config key: " + key);
  }
}

ExperimentSpec parse_spec_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  ExperimentSpec spec;
  std::string line;
  int line_no = 0;
  while (std::getline(f, line)) {
    line_no += 1;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      bool blank = true;
      for (char c : line) blank = blank && std::isspace(static_cast<unsigned char>(c));
      if (blank) continue;
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": empty key");
    }
    apply_spec_line(spec, key, value);
  }
  return spec;
}

}  // namespace specbeam
