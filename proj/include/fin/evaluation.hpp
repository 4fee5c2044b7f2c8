#pragma once

#include <string>

#include "fin/extended_graph.hpp"
#include "fin/scenario.hpp"
#include "fin/solver.hpp"

namespace fin {

struct ConstraintVerdict {
  bool ok = false;
  double slack = 0.0;  // distance to the bound, nonnegative when ok
};

/// Full accounting of one configuration, recomputed from the scenario alone
/// (never copied from solver-side caches).
struct EvaluationReport {
  // Stream powers: per-inference energy scaled by the inference rate.
  double total_energy_w = 0.0;
  double comm_energy_w = 0.0;
  double compute_energy_w = 0.0;
  // Expected joules per inference, split the same way.
  double total_energy_j = 0.0;
  double comm_energy_j = 0.0;
  double compute_energy_j = 0.0;

  double latency_s = 0.0;  // worst-case full-path latency
  double accuracy = 0.0;   // terminating exit accuracy

  ConstraintVerdict latency_ok;         // latency <= target
  ConstraintVerdict accuracy_ok;        // accuracy >= target
  ConstraintVerdict compute_rate_ok;    // per-edge ops rate within slice
  ConstraintVerdict bandwidth_rate_ok;  // per-edge bit rate within slice

  int blocks_mobile = 0;
  int blocks_edge = 0;
  int blocks_cloud = 0;
  int exit_index = 0;

  bool feasible() const {
    return latency_ok.ok && accuracy_ok.ok && compute_rate_ok.ok &&
           bandwidth_rate_ok.ok;
  }
};

/// Evaluates a configuration against all four constraints and produces the
/// energy breakdown. Throws on structurally invalid configurations
/// (non-consecutive blocks, unknown node, exit not on the last block).
EvaluationReport evaluate(const Scenario& s, const std::string& app,
                          const Configuration& cfg,
                          TraversalMode mode = TraversalMode::kSurvival);

}  // namespace fin
