// Acceptance suite: one checked criterion per section, one [PASS]/[FAIL]
// line each, nonzero exit code when any criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fin/baselines.hpp"
#include "fin/evaluation.hpp"
#include "fin/extended_graph.hpp"
#include "fin/feasible_graph.hpp"
#include "fin/harness.hpp"
#include "fin/report_io.hpp"
#include "fin/scenario.hpp"
#include "fin/solver.hpp"
#include "support/desk.hpp"
#include "support/naive_eval.hpp"
#include "support/paths.hpp"

using namespace fin;

namespace {

int failures = 0;

void report(int id, const std::string& title, bool pass,
            const std::vector<std::string>& notes = {}) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", id,
              title.c_str());
  for (const std::string& note : notes) {
    std::printf("       %s\n", note.c_str());
  }
  if (!pass) ++failures;
}

std::string data_file(const std::string& name) {
  return std::string(FIN_DATA_DIR) + "/" + name;
}

std::string fmt(double v) { return format_double(v); }

// ---------------------------------------------------------------------------
// Criterion 1: competitive ratio of the exact solver against the exhaustive
// optimum, over randomized desk instances, for gamma in {3, 10, 50}.
// ---------------------------------------------------------------------------
void criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240817);
  const std::array<int, 3> gammas = {3, 10, 50};

  int instances = 0;
  std::array<int, 3> both_solved = {0, 0, 0};
  std::array<int, 3> violations = {0, 0, 0};
  double worst_ratio = 0.0;
  std::vector<std::string> violation_lines;

  while (instances < 120) {
    Scenario s = fin::testing::make_desk_instance(rng);
    SolveResult opt = solve_opt(s, "desk");
    if (!opt.configuration) continue;
    ++instances;

    ExtendedGraph g = build_extended_graph(s, "desk");
    for (size_t gi = 0; gi < gammas.size(); ++gi) {
      const int gamma = gammas[gi];
      FeasibleGraph fg = build_feasible_graph(g, s.applications[0], gamma);
      SolveResult exact = solve_exact(fg);
      if (!exact.configuration) continue;
      ++both_solved[gi];
      const double bound = (1.0 + 1.0 / gamma) * opt.energy;
      if (exact.energy > bound * (1.0 + 1e-12)) {
        ++violations[gi];
        EvaluationReport r = evaluate(s, "desk", *opt.configuration);
        violation_lines.push_back(
            "instance " + std::to_string(instances) + ", gamma " +
            std::to_string(gamma) + ": ratio " + fmt(exact.energy / opt.energy) +
            " with the optimum at " +
            fmt(100.0 * r.latency_s / s.applications[0].target_latency) +
            "% of the latency budget");
      }
      if (opt.energy > 0.0) {
        worst_ratio = std::max(worst_ratio, exact.energy / opt.energy);
      }
    }
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  const int total_violations = violations[0] + violations[1] + violations[2];
  const bool pass = total_violations == 0 && instances >= 100 && elapsed < 60.0;
  std::vector<std::string> notes = {
      std::to_string(instances) + " instances with a feasible optimum; " +
          "solved pairs per gamma {3,10,50}: " + std::to_string(both_solved[0]) +
          "/" + std::to_string(both_solved[1]) + "/" +
          std::to_string(both_solved[2]),
      "violations per gamma {3,10,50}: " + std::to_string(violations[0]) + "/" +
          std::to_string(violations[1]) + "/" + std::to_string(violations[2]) +
          ", worst observed ratio: " + fmt(worst_ratio) + ", runtime: " +
          fmt(elapsed) + " s"};
  for (const std::string& line : violation_lines) notes.push_back(line);
  if (total_violations > 0) {
    notes.push_back(
        "the depth rule charges every hop at least one full latency quantum, "
        "so a cheap multi-hop optimum can be excluded from the replicated "
        "graph despite true latency slack; the bound is not attainable in "
        "general under the quantization that guarantees latency soundness");
  }
  report(1, "competitive ratio <= 1 + 1/gamma on randomized instances", pass,
         notes);
}

// ---------------------------------------------------------------------------
// Criterion 2: every source-to-terminal path of the pruned graph satisfies
// the latency budget and all four constraints.
// ---------------------------------------------------------------------------
void criterion_2() {
  std::mt19937_64 rng(555777);
  long long paths_checked = 0;
  int instances = 0;
  int violations = 0;

  while (instances < 25) {
    fin::testing::DeskOptions opt;
    opt.max_nodes = 4;
    opt.max_blocks = 6;
    Scenario s = fin::testing::make_desk_instance(rng, opt);
    const Application& app = s.applications[0];
    ExtendedGraph g = build_extended_graph(s, "desk");
    for (int gamma : {3, 8}) {
      FeasibleGraph fg = build_feasible_graph(g, app, gamma);
      auto paths = fin::testing::enumerate_paths(fg, 10000);
      if (paths.size() >= 10000) continue;  // stay within the path budget
      for (const auto& path : paths) {
        double latency = 0.0;
        for (int ei : path.ext_edges) {
          const EdgeWeights& w = fg.graph.edges[static_cast<size_t>(ei)].w;
          latency += w.transfer_time + w.compute_time;
        }
        Configuration cfg = fin::testing::path_to_configuration(fg, path);
        EvaluationReport r = evaluate(s, "desk", cfg);
        if (latency > app.target_latency || !r.feasible()) ++violations;
        ++paths_checked;
      }
    }
    ++instances;
  }

  report(2, "feasible-graph topology enforces the latency budget",
         violations == 0 && paths_checked > 0,
         {std::to_string(paths_checked) + " enumerated paths over " +
              std::to_string(instances) + " instances, " +
              std::to_string(violations) + " violations"});
}

// ---------------------------------------------------------------------------
// Criterion 3: at gamma = 1000 the exact solver matches the optimum on every
// instance whose optimum keeps at least 0.2% latency slack.
// ---------------------------------------------------------------------------
void criterion_3() {
  std::mt19937_64 rng(20240817);
  int compared = 0;
  int mismatches = 0;
  double worst_gap = 0.0;

  for (int trial = 0; trial < 200 && compared < 120; ++trial) {
    Scenario s = fin::testing::make_desk_instance(rng);
    const Application& app = s.applications[0];
    SolveResult opt = solve_opt(s, "desk");
    if (!opt.configuration) continue;
    EvaluationReport r = evaluate(s, "desk", *opt.configuration);
    if (r.latency_ok.slack < 0.002 * app.target_latency) continue;

    ExtendedGraph g = build_extended_graph(s, "desk");
    FeasibleGraph fg = build_feasible_graph(g, app, 1000);
    SolveResult exact = solve_exact(fg);
    if (!exact.configuration) {
      ++mismatches;
      ++compared;
      continue;
    }
    const double gap = std::abs(exact.energy - opt.energy) /
                       std::max(1e-300, std::abs(opt.energy));
    worst_gap = std::max(worst_gap, gap);
    if (gap > 1e-9) ++mismatches;
    ++compared;
  }

  report(3, "gamma = 1000 reproduces the optimum under 0.2% latency slack",
         mismatches == 0 && compared >= 100,
         {std::to_string(compared) + " instances compared, worst relative gap " +
              fmt(worst_gap)});
}

// ---------------------------------------------------------------------------
// Criterion 4: reference single-node reference figures, +-25% soft targets
// with the orderings as the hard fallback.
// ---------------------------------------------------------------------------
void criterion_4() {
  Scenario s = load_scenario(data_file("b_alexnet_cifar10.json"));
  const Application& app = s.applications[0];

  Configuration full;
  full.application = app.id;
  for (int b = 1; b <= 5; ++b) full.placements.emplace_back(b, "mobile");
  full.exit_index = 3;
  Configuration early;
  early.application = app.id;
  early.placements.emplace_back(1, "mobile");
  early.exit_index = 1;

  EvaluationReport full_r = evaluate(s, app.id, full);
  EvaluationReport early_r = evaluate(s, app.id, early);

  struct Target {
    const char* name;
    double achieved;
    double reference;
  };
  const std::vector<Target> targets = {
      {"latency all exits [ms]", full_r.latency_s * 1e3, 6.56},
      {"latency exit-1 only [ms]", early_r.latency_s * 1e3, 2.67},
      {"energy all exits [mJ]", full_r.total_energy_j * 1e3, 39.4},
      {"energy exit-1 only [mJ]", early_r.total_energy_j * 1e3, 16.4},
  };

  bool within_tolerance = true;
  std::vector<std::string> notes;
  for (const Target& t : targets) {
    const double deviation = (t.achieved - t.reference) / t.reference;
    if (std::abs(deviation) > 0.25) within_tolerance = false;
    notes.push_back(std::string(t.name) + ": achieved " + fmt(t.achieved) +
                    ", reference " + fmt(t.reference) + ", deviation " +
                    fmt(deviation * 100.0) + "%");
  }

  const bool ordering = early_r.latency_s < full_r.latency_s &&
                        early_r.total_energy_j < full_r.total_energy_j;
  notes.push_back(std::string("hard ordering (exit-1 strictly faster and "
                              "cheaper): ") +
                  (ordering ? "holds" : "violated"));
  if (!within_tolerance) {
    notes.push_back("soft targets missed: the reference figures use an "
                    "unstated ops scale; the ordering check governs");
  }

  report(4, "single-node reference figures (soft) with ordering fallback",
         within_tolerance || ordering, notes);
}

// ---------------------------------------------------------------------------
// Criterion 5: deployment splits at alpha = 80% for 5 ms and 12 ms budgets,
// with the energy-chain and exit-3 checks as the hard fallback.
// ---------------------------------------------------------------------------
struct SplitResult {
  std::string name;
  bool solved = false;
  bool feasible = false;
  int exit_index = 0;
  double energy = 0.0;
  std::array<int, 3> split = {0, 0, 0};
};

SplitResult split_of(const std::string& name, const Scenario& s,
                     const std::optional<Configuration>& cfg) {
  SplitResult out;
  out.name = name;
  if (!cfg) return out;
  out.solved = true;
  EvaluationReport r = evaluate(s, cfg->application, *cfg);
  out.feasible = r.feasible();
  out.exit_index = r.exit_index;
  out.energy = r.total_energy_j;
  out.split = {r.blocks_mobile, r.blocks_edge, r.blocks_cloud};
  return out;
}

std::string split_text(const SplitResult& r) {
  if (!r.solved) return r.name + ": no configuration";
  std::ostringstream out;
  out << r.name << ": [" << r.split[0] << "," << r.split[1] << "," << r.split[2]
      << "] exit-" << r.exit_index << " energy " << fmt(r.energy * 1e3)
      << " mJ" << (r.feasible ? "" : " (constraints violated)");
  return out.str();
}

void criterion_5() {
  Scenario base = load_scenario(data_file("b_alexnet_cifar10.json"));
  std::vector<std::string> notes;
  bool pass = true;

  // 5 ms budget.
  {
    Scenario s = with_requirements(base, "alexnet_cifar10", 0.80, 5e-3);
    ExtendedGraph g = build_extended_graph(s, "alexnet_cifar10");
    FeasibleGraph fg = build_feasible_graph(g, s.applications[0], 10);
    SplitResult mcp = split_of("mcp", s, solve_mcp(s, g).configuration);
    SplitResult fin_r = split_of("fin(gamma=10)", s, solve_exact(fg).configuration);
    SplitResult opt = split_of("opt", s, solve_opt(s, "alexnet_cifar10").configuration);
    notes.push_back("delta = 5 ms: " + split_text(mcp));
    notes.push_back("delta = 5 ms: " + split_text(fin_r));
    notes.push_back("delta = 5 ms: " + split_text(opt));

    const bool exact_match = mcp.split == std::array<int, 3>{3, 1, 1} &&
                             fin_r.split == std::array<int, 3>{2, 1, 2} &&
                             opt.split == std::array<int, 3>{1, 2, 2} &&
                             mcp.exit_index == 3 && fin_r.exit_index == 3 &&
                             opt.exit_index == 3;
    if (exact_match) {
      notes.push_back("reference splits reproduced exactly");
    } else {
      notes.push_back("reference splits differ; applying the hard fallback");
      const bool chain = opt.solved && fin_r.solved && mcp.solved &&
                         opt.energy <= fin_r.energy * (1.0 + 1e-12) &&
                         fin_r.energy <= mcp.energy * (1.0 + 1e-12);
      const bool all_exit3 = mcp.exit_index == 3 && fin_r.exit_index == 3 &&
                             opt.exit_index == 3;
      notes.push_back(std::string("fallback energy(opt) <= energy(fin) <= "
                                  "energy(mcp): ") +
                      (chain ? "holds" : "violated"));
      notes.push_back(std::string("fallback all three use exit-3: ") +
                      (all_exit3 ? "holds" : "violated"));
      if (!chain || !all_exit3) pass = false;
    }
  }

  // 12 ms budget.
  {
    Scenario s = with_requirements(base, "alexnet_cifar10", 0.80, 12e-3);
    ExtendedGraph g = build_extended_graph(s, "alexnet_cifar10");
    FeasibleGraph fg = build_feasible_graph(g, s.applications[0], 10);
    SplitResult mcp = split_of("mcp", s, solve_mcp(s, g).configuration);
    SplitResult fin_r = split_of("fin(gamma=10)", s, solve_exact(fg).configuration);
    SplitResult opt = split_of("opt", s, solve_opt(s, "alexnet_cifar10").configuration);
    notes.push_back("delta = 12 ms: " + split_text(mcp));
    notes.push_back("delta = 12 ms: " + split_text(fin_r));
    notes.push_back("delta = 12 ms: " + split_text(opt));

    const bool exact_match = mcp.split == std::array<int, 3>{1, 4, 0} &&
                             fin_r.split == std::array<int, 3>{5, 0, 0} &&
                             opt.split == std::array<int, 3>{5, 0, 0};
    if (exact_match) {
      notes.push_back("reference splits reproduced exactly");
    } else {
      const bool all_mobile_opt = opt.solved && opt.feasible &&
                                  opt.split == std::array<int, 3>{5, 0, 0} &&
                                  fin_r.split == std::array<int, 3>{5, 0, 0};
      notes.push_back(std::string("fallback all-on-mobile optimal: ") +
                      (all_mobile_opt ? "holds" : "violated"));
      if (!all_mobile_opt) pass = false;
    }
  }

  report(5, "deployment-split reproduction (soft) with hard fallback", pass,
         notes);
}

// ---------------------------------------------------------------------------
// Criterion 6: multi-application dominance.
// ---------------------------------------------------------------------------
void criterion_6() {
  Scenario s = load_scenario(data_file("multiapp_six.json"));
  MultiAppOptions options;
  options.users = 30;
  options.params.gamma = 10;
  MultiAppResult result = run_multi_app(s, options);

  // Hard: the exact solver never spends more than the baseline when both
  // produce feasible configurations for the same user and application.
  int both = 0;
  int worse = 0;
  std::map<std::pair<std::string, double>, const ResultRow*> mcp_rows;
  for (const ResultRow& row : result.rows) {
    if (row.algorithm == "mcp" && row.feasible) {
      mcp_rows[{row.application, row.value}] = &row;
    }
  }
  for (const ResultRow& row : result.rows) {
    if (row.algorithm != "fin-exact" || !row.feasible) continue;
    auto it = mcp_rows.find({row.application, row.value});
    if (it == mcp_rows.end()) continue;
    ++both;
    if (row.report.total_energy_w >
        it->second->report.total_energy_w * (1.0 + 1e-12)) {
      ++worse;
    }
  }

  const double fin_failure = result.aggregate.failure_probability.at("fin-exact");
  const double mcp_failure = result.aggregate.failure_probability.at("mcp");
  double ratio = -1.0;
  if (result.aggregate.energy_ratio_vs_mcp.count("fin-exact")) {
    ratio = result.aggregate.energy_ratio_vs_mcp.at("fin-exact");
  }

  const bool energy_hard = worse == 0 && both > 0;
  const bool failure_hard = fin_failure < mcp_failure;
  const bool ratio_soft = ratio >= 0.6 && ratio <= 0.8;

  std::vector<std::string> notes = {
      std::to_string(result.rows.size()) + " user solves; both-feasible pairs: " +
          std::to_string(both) + ", energy regressions: " + std::to_string(worse),
      "failure probability: fin-exact " + fmt(fin_failure) + ", mcp " +
          fmt(mcp_failure),
      "energy ratio fin/mcp over both-feasible users: " + fmt(ratio) +
          std::string(ratio_soft ? " (within the soft 0.6-0.8 band)"
                                 : " (outside the soft 0.6-0.8 band)")};
  if (!ratio_soft) {
    notes.push_back("soft band missed: with this cost model both solvers pick "
                    "the same single-node plan whenever the baseline is "
                    "feasible at all");
  }

  report(6, "multi-application dominance (hard orderings, soft ratio)",
         energy_hard && failure_hard, notes);
}

// ---------------------------------------------------------------------------
// Criterion 7: evaluation matches an independently coded naive summation
// bit for bit on 1000 random configurations.
// ---------------------------------------------------------------------------
void criterion_7() {
  std::mt19937_64 rng(424242);
  int checked = 0;
  int mismatched = 0;

  auto bits_equal = [](double a, double b) {
    return std::memcmp(&a, &b, sizeof(double)) == 0;
  };

  while (checked < 1000) {
    Scenario s = fin::testing::make_desk_instance(rng);
    const Application& app = s.applications[0];
    std::vector<std::string> hosts;
    for (const NetworkNode& n : s.nodes) {
      if (n.tier != Tier::kSource) hosts.push_back(n.id);
    }
    std::uniform_int_distribution<size_t> host_pick(0, hosts.size() - 1);
    std::vector<int> exits = app.exit_blocks();
    std::uniform_int_distribution<size_t> exit_pick(0, exits.size() - 1);

    for (int sample = 0; sample < 20 && checked < 1000; ++sample) {
      const int exit_block = exits[exit_pick(rng)];
      Configuration cfg;
      cfg.application = app.id;
      cfg.exit_index = app.block(exit_block).exit->index;
      for (int b = 1; b <= exit_block; ++b) {
        cfg.placements.emplace_back(b, hosts[host_pick(rng)]);
      }
      const TraversalMode mode =
          sample % 2 == 0 ? TraversalMode::kSurvival : TraversalMode::kLiteral;
      EvaluationReport lib = evaluate(s, app.id, cfg, mode);
      fin::testing::NaiveReport naive =
          fin::testing::naive_evaluate(s, app, cfg, mode);
      const bool same = bits_equal(lib.total_energy_w, naive.total_w) &&
                        bits_equal(lib.comm_energy_w, naive.comm_w) &&
                        bits_equal(lib.compute_energy_w, naive.compute_w) &&
                        bits_equal(lib.total_energy_j, naive.total_j) &&
                        bits_equal(lib.latency_s, naive.latency_s) &&
                        lib.feasible() == naive.feasible();
      if (!same) ++mismatched;
      ++checked;
    }
  }

  report(7, "evaluation equals the naive summation bit for bit",
         mismatched == 0,
         {std::to_string(checked) + " random configurations, " +
              std::to_string(mismatched) + " mismatches"});
}

// ---------------------------------------------------------------------------
// Criterion 8: repeated CLI runs with fixed seeds produce byte-identical
// outputs. The single measured column (wall_ms) is masked in the CSV
// comparison; JSON results carry no measured time and must match exactly.
// ---------------------------------------------------------------------------
std::string run_cli(const std::string& args) {
  const std::string command = std::string(FIN_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 4096> buffer{};
  std::string output;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return output;
  while (fgets(buffer.data(), buffer.size(), pipe) != nullptr) {
    output += buffer.data();
  }
  pclose(pipe);
  return output;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string strip_wall_column(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') {
      const size_t cut = line.rfind(',');
      if (cut != std::string::npos) line = line.substr(0, cut);
    }
    out << line << '\n';
  }
  return out.str();
}

void criterion_8() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "fin_acceptance";
  fs::create_directories(dir);

  const std::string solve_args =
      "solve --scenario " + data_file("b_alexnet_cifar10.json") +
      " --algo fin-exact --gamma 10 --alpha 0.8 --delta '5 ms' --seed 11 --out ";
  run_cli(solve_args + (dir / "a.json").string());
  run_cli(solve_args + (dir / "b.json").string());
  const bool json_identical =
      slurp((dir / "a.json").string()) == slurp((dir / "b.json").string()) &&
      !slurp((dir / "a.json").string()).empty();

  const std::string sweep_args =
      "sweep --scenario " + data_file("b_alexnet_cifar10.json") +
      " --algo fin-exact,mcp,opt --axis delta --values '2 ms,5 ms,12 ms'"
      " --alpha 0.8 --seed 11 --out ";
  run_cli(sweep_args + (dir / "a.csv").string());
  run_cli(sweep_args + (dir / "b.csv").string());
  const std::string csv_a = slurp((dir / "a.csv").string());
  const std::string csv_b = slurp((dir / "b.csv").string());
  const bool csv_identical =
      !csv_a.empty() && strip_wall_column(csv_a) == strip_wall_column(csv_b);

  const std::string multi_args =
      "multiapp --scenario " + data_file("multiapp_six.json") +
      " --users 3 --seed 11 --out ";
  run_cli(multi_args + (dir / "ma.csv").string());
  run_cli(multi_args + (dir / "mb.csv").string());
  const std::string multi_a = slurp((dir / "ma.csv").string());
  const std::string multi_b = slurp((dir / "mb.csv").string());
  const bool multi_identical =
      !multi_a.empty() &&
      strip_wall_column(multi_a) == strip_wall_column(multi_b);

  report(8, "fixed-seed reruns are byte-identical",
         json_identical && csv_identical && multi_identical,
         {std::string("solve JSON byte-identical: ") +
              (json_identical ? "yes" : "no"),
          std::string("sweep CSV byte-identical with the measured wall_ms "
                      "column masked: ") +
              (csv_identical ? "yes" : "no"),
          std::string("multiapp CSV byte-identical with wall_ms masked: ") +
              (multi_identical ? "yes" : "no")});
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  std::printf("%d of 8 criteria passed\n", 8 - failures);
  return failures;
}
