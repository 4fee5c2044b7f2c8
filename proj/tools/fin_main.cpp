#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fin/baselines.hpp"
#include "fin/errors.hpp"
#include "fin/evaluation.hpp"
#include "fin/extended_graph.hpp"
#include "fin/feasible_graph.hpp"
#include "fin/harness.hpp"
#include "fin/report_io.hpp"
#include "fin/scenario.hpp"
#include "fin/solver.hpp"
#include "fin/units.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitInfeasible = 4;
constexpr int kExitGuard = 5;

long long opt_guard_from_env() {
  const char* env = std::getenv("FIN_OPT_GUARD");
  if (env == nullptr) return fin::kDefaultOptGuard;
  return std::atoll(env);
}

fin::Scenario load_or_exit(const std::string& path) {
  return fin::load_scenario(path);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw fin::Error("cannot write output file '" + path + "'");
  out << content;
}

std::vector<fin::Algorithm> parse_algorithms(const std::string& list) {
  std::vector<fin::Algorithm> algos;
  std::string token;
  std::istringstream in(list);
  while (std::getline(in, token, ',')) {
    if (!token.empty()) algos.push_back(fin::algorithm_from_name(token));
  }
  if (algos.empty()) throw fin::Error("no algorithm given");
  return algos;
}

std::vector<double> parse_values(const std::string& list, fin::SweepAxis axis) {
  using fin::units::Dimension;
  std::vector<double> values;
  std::string token;
  std::istringstream in(list);
  while (std::getline(in, token, ',')) {
    if (token.empty()) continue;
    Dimension dim = Dimension::kDimensionless;
    if (axis == fin::SweepAxis::kDelta) dim = Dimension::kTime;
    values.push_back(fin::units::parse_quantity(token, dim));
  }
  if (values.empty()) throw fin::Error("no sweep values given");
  return values;
}

struct CommonFlags {
  std::string scenario;
  std::string app;
  std::string algo = "fin-exact";
  int gamma = 10;
  int lambda = 0;
  std::string mode = "survival";
  double alpha = -1.0;
  std::string delta;
  std::string out;
  std::uint64_t seed = 0;
};

int cmd_validate(const std::string& path) {
  fin::Scenario s = load_or_exit(path);
  std::cout << "scenario ok: " << s.nodes.size() << " nodes, " << s.links.size()
            << " links, " << s.slices.size() << " slices, "
            << s.applications.size() << " applications\n";
  for (const fin::Application& a : s.applications) {
    std::cout << "  " << a.id << ": " << a.block_count() << " blocks, "
              << a.exit_blocks().size() << " exits, source " << a.source_node
              << "\n";
  }
  return kExitOk;
}

void print_table(const fin::ResultRow& row) {
  std::cout << "algorithm  : " << row.algorithm << " (gamma=" << row.gamma
            << ", lambda=" << row.lambda << ")\n";
  std::cout << "application: " << row.application << "\n";
  if (!row.configuration) {
    std::cout << "result     : infeasible (no configuration)\n";
    return;
  }
  const fin::EvaluationReport& r = row.report;
  std::cout << "result     : " << (row.feasible ? "feasible" : "INFEASIBLE")
            << ", exit-" << r.exit_index << "\n";
  std::cout << "placements :";
  for (const auto& [block, node] : row.configuration->placements) {
    std::cout << " " << block << ":" << node;
  }
  std::cout << "\n";
  std::cout << "blocks     : mobile=" << r.blocks_mobile
            << " edge=" << r.blocks_edge << " cloud=" << r.blocks_cloud << "\n";
  std::cout << "latency    : " << fin::format_double(r.latency_s * 1e3)
            << " ms (budget met: " << (r.latency_ok.ok ? "yes" : "no") << ")\n";
  std::cout << "accuracy   : " << fin::format_double(r.accuracy * 100.0)
            << " % (target met: " << (r.accuracy_ok.ok ? "yes" : "no") << ")\n";
  std::cout << "energy     : " << fin::format_double(r.total_energy_j * 1e3)
            << " mJ/inference (comm "
            << fin::format_double(r.comm_energy_j * 1e3) << ", compute "
            << fin::format_double(r.compute_energy_j * 1e3) << ")\n";
  std::cout << "power      : " << fin::format_double(r.total_energy_w)
            << " W at the configured inference rate\n";
  std::cout << "wall       : " << fin::format_double(row.wall_ms) << " ms\n";
}

int cmd_solve(const CommonFlags& flags, const CLI::App* cmd) {
  const fin::Algorithm algo = fin::algorithm_from_name(flags.algo);
  const bool fin_algo = algo == fin::Algorithm::kFinExact ||
                        algo == fin::Algorithm::kFinGreedy;
  if (cmd->count("--gamma") > 0 && !fin_algo) {
    throw fin::Error("--gamma only applies to fin solvers");
  }
  if (cmd->count("--lambda") > 0 && algo != fin::Algorithm::kFinGreedy) {
    throw fin::Error("--lambda only applies to fin-greedy");
  }
  fin::Scenario s = load_or_exit(flags.scenario);
  std::string app = flags.app;
  if (app.empty()) {
    if (s.applications.size() != 1) {
      throw fin::Error("scenario has multiple applications, pass --app");
    }
    app = s.applications.front().id;
  }
  double delta = -1.0;
  if (!flags.delta.empty()) {
    delta = fin::units::parse_quantity(flags.delta, fin::units::Dimension::kTime);
  }
  if (flags.alpha > 0.0 || delta > 0.0) {
    s = fin::with_requirements(s, app, flags.alpha, delta);
  }

  fin::SolverParams params;
  params.gamma = flags.gamma;
  params.lambda = flags.lambda;
  params.mode = fin::traversal_mode_from_name(flags.mode);
  params.opt_guard = opt_guard_from_env();

  fin::ResultRow row = fin::solve_one(s, app, algo, params);
  print_table(row);
  if (!flags.out.empty()) {
    write_file(flags.out, fin::solve_result_to_json(row));
    std::cout << "wrote " << flags.out << "\n";
  }
  return row.feasible ? kExitOk : kExitInfeasible;
}

int cmd_sweep(const CommonFlags& flags, const std::string& axis_name,
              const std::string& values_list) {
  fin::Scenario s = load_or_exit(flags.scenario);
  std::string app = flags.app;
  if (app.empty()) {
    if (s.applications.size() != 1) {
      throw fin::Error("scenario has multiple applications, pass --app");
    }
    app = s.applications.front().id;
  }
  double delta = -1.0;
  if (!flags.delta.empty()) {
    delta = fin::units::parse_quantity(flags.delta, fin::units::Dimension::kTime);
  }
  if (flags.alpha > 0.0 || delta > 0.0) {
    s = fin::with_requirements(s, app, flags.alpha, delta);
  }

  fin::SweepAxis axis = fin::sweep_axis_from_name(axis_name);
  std::vector<double> values = parse_values(values_list, axis);
  fin::SolverParams params;
  params.gamma = flags.gamma;
  params.lambda = flags.lambda;
  params.mode = fin::traversal_mode_from_name(flags.mode);
  params.opt_guard = opt_guard_from_env();

  auto rows = fin::sweep(s, app, parse_algorithms(flags.algo), axis, values, params);
  const std::string csv = fin::rows_to_csv(rows);
  if (flags.out.empty()) {
    std::cout << csv;
  } else {
    write_file(flags.out, csv);
    std::cout << "wrote " << rows.size() << " rows to " << flags.out << "\n";
  }
  return kExitOk;
}

int cmd_multiapp(const CommonFlags& flags, int users) {
  fin::Scenario s = load_or_exit(flags.scenario);
  fin::MultiAppOptions options;
  options.users = users;
  options.params.gamma = flags.gamma;
  options.params.lambda = flags.lambda;
  options.params.mode = fin::traversal_mode_from_name(flags.mode);
  options.params.opt_guard = opt_guard_from_env();
  options.algorithms = parse_algorithms(flags.algo);
  options.seed = flags.seed;

  fin::MultiAppResult result = fin::run_multi_app(s, options);
  const std::string csv = fin::multi_app_to_csv(result);
  if (flags.out.empty()) {
    std::cout << csv;
  } else {
    write_file(flags.out, csv);
    std::cout << "wrote " << result.rows.size() << " rows to " << flags.out
              << "\n";
  }
  return kExitOk;
}

int cmd_export_graph(const CommonFlags& flags) {
  fin::Scenario s = load_or_exit(flags.scenario);
  std::string app = flags.app;
  if (app.empty()) {
    if (s.applications.size() != 1) {
      throw fin::Error("scenario has multiple applications, pass --app");
    }
    app = s.applications.front().id;
  }
  fin::ExtendedGraph g = fin::build_extended_graph(
      s, app, fin::traversal_mode_from_name(flags.mode));
  if (flags.out.empty()) throw fin::Error("export-graph requires --out");
  if (flags.gamma > 0) {
    fin::FeasibleGraph fg =
        fin::build_feasible_graph(g, s.application(app), flags.gamma);
    fin::export_dot(fg, s, std::filesystem::path(flags.out));
  } else {
    fin::export_dot(g, s, std::filesystem::path(flags.out));
  }
  std::cout << "wrote " << flags.out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-minimal placement of early-exit DNN blocks on "
               "multi-tiered networks"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string axis;
  std::string values;
  int users = 6;

  auto add_common = [&](CLI::App* cmd, bool with_algo = true) {
    cmd->add_option("--scenario", flags.scenario, "Scenario JSON file")
        ->required();
    cmd->add_option("--app", flags.app, "Application id");
    if (with_algo) {
      cmd->add_option("--algo", flags.algo,
                      "Algorithm (fin-exact, fin-greedy, mcp, opt); commands "
                      "taking several accept a comma list");
    }
    cmd->add_option("--gamma", flags.gamma, "Latency resolution for fin solvers");
    cmd->add_option("--lambda", flags.lambda,
                    "Proximity window for fin-greedy (defaults to gamma)");
    cmd->add_option("--mode", flags.mode, "Traversal weighting: survival|literal");
    cmd->add_option("--alpha", flags.alpha, "Override target accuracy (0, 1]");
    cmd->add_option("--delta", flags.delta, "Override target latency, e.g. '5 ms'");
    cmd->add_option("--seed", flags.seed, "Seed recorded with the run");
    cmd->add_option("--out", flags.out, "Output file path");
  };

  CLI::App* validate = app.add_subcommand("validate", "Load and check a scenario");
  std::string validate_path;
  validate->add_option("--scenario", validate_path, "Scenario JSON file")
      ->required();

  CLI::App* solve = app.add_subcommand("solve", "Solve one application");
  add_common(solve);

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Solve across a range of one parameter");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--axis", axis, "delta|alpha|gamma|lambda")->required();
  sweep_cmd->add_option("--values", values, "Comma list, e.g. '2 ms,5 ms,12 ms'")
      ->required();

  CLI::App* multiapp =
      app.add_subcommand("multiapp", "Per-user multi-application run");
  add_common(multiapp);
  multiapp->add_option("--users", users, "Number of users (one mobile each)");

  CLI::App* export_graph =
      app.add_subcommand("export-graph", "Write the placement graph as DOT");
  export_graph->add_option("--scenario", flags.scenario, "Scenario JSON file")
      ->required();
  export_graph->add_option("--app", flags.app, "Application id");
  export_graph->add_option("--mode", flags.mode, "survival|literal");
  flags.gamma = 0;
  export_graph->add_option(
      "--gamma", flags.gamma,
      "Export the depth-replicated graph at this resolution instead");
  export_graph->add_option("--out", flags.out, "Output DOT file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (validate->parsed()) return cmd_validate(validate_path);
    if (solve->parsed()) {
      if (flags.gamma == 0) flags.gamma = 10;
      return cmd_solve(flags, solve);
    }
    if (sweep_cmd->parsed()) {
      if (flags.gamma == 0) flags.gamma = 10;
      return cmd_sweep(flags, axis, values);
    }
    if (multiapp->parsed()) {
      if (flags.gamma == 0) flags.gamma = 10;
      if (multiapp->count("--algo") == 0) flags.algo = "fin-exact,mcp";
      return cmd_multiapp(flags, users);
    }
    if (export_graph->parsed()) return cmd_export_graph(flags);
  } catch (const fin::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const fin::UnitError& e) {
    std::cerr << "unit error: " << e.what() << "\n";
    return kExitParse;
  } catch (const fin::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const fin::SearchGuardError& e) {
    std::cerr << "search guard: " << e.what() << "\n";
    return kExitGuard;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
