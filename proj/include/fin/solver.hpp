#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fin/feasible_graph.hpp"

namespace fin {

enum class Algorithm { kFinExact, kFinGreedy, kMcp, kOpt, kManual };

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

/// An ordered placement of consecutive DNN blocks onto nodes, terminated by
/// an exit. Blocks run from 1 to the block carrying the terminating exit.
struct Configuration {
  std::string application;
  std::vector<std::pair<int, std::string>> placements;  // (block, node id)
  int exit_index = 0;
  Algorithm algorithm = Algorithm::kManual;

  std::vector<std::string> node_sequence() const;
};

/// Solver result: empty configuration means the instance is infeasible at
/// the given resolution. Energy is the expected joules per inference of the
/// selected path (the objective without the rate factor).
struct SolveResult {
  std::optional<Configuration> configuration;
  double energy = 0.0;
};

/// Minimum-energy source-to-terminal path, found in topological order since
/// the graph is a DAG. Ties break on fewer blocks, then the smallest node-id
/// sequence, so results are reproducible.
SolveResult solve_exact(const FeasibleGraph& fg);

/// Forward greedy traversal: at each block transition, among outgoing edges
/// whose head depth lies in [gamma - lambda, gamma], take the cheapest; when
/// the window is empty fall back to the cheapest edge at any depth. Walks to
/// the deepest accuracy-feasible exit; returns empty when stuck.
SolveResult solve_greedy(const FeasibleGraph& fg, int lambda);

}  // namespace fin
