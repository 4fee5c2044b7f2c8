#pragma once

#include <optional>
#include <string>

#include "fin/evaluation.hpp"
#include "fin/extended_graph.hpp"
#include "fin/scenario.hpp"
#include "fin/solver.hpp"

namespace fin {

/// Result of a baseline solver. MCP may return a configuration that violates
/// the constraints; `feasible` reflects the independent checker's verdict.
struct BaselineResult {
  std::optional<Configuration> configuration;
  double energy = 0.0;  // true expected joules per inference
  bool feasible = false;
  EvaluationReport report;
};

/// Multi-constrained-path baseline: ranks extended-graph edges by the
/// auxiliary weight (T + C)/delta + a(head)/alpha, where a(head) is the
/// accuracy of the deepest exit at or before the head block (0 before the
/// first exit). The cheapest path from the source to any exit vertex is
/// selected regardless of the accuracy target; feasibility is checked
/// afterwards against all four constraints.
BaselineResult solve_mcp(const Scenario& s, const ExtendedGraph& g);

/// Default candidate budget for the exhaustive optimum.
inline constexpr long long kDefaultOptGuard = 100'000'000;

/// Exhaustive-search optimum: enumerates every terminating exit meeting the
/// accuracy target and every block-to-node assignment reachable in sequence,
/// keeps assignments satisfying all constraints, and returns the cheapest
/// under the same deterministic tie-breaking as the exact solver. Throws
/// SearchGuardError when the candidate count exceeds `guard`.
SolveResult solve_opt(const Scenario& s, const std::string& app,
                      TraversalMode mode = TraversalMode::kSurvival,
                      long long guard = kDefaultOptGuard);

}  // namespace fin
