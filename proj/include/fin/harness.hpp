#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fin/baselines.hpp"
#include "fin/evaluation.hpp"
#include "fin/scenario.hpp"
#include "fin/solver.hpp"

namespace fin {

/// One solved data point of a sweep or multi-application run.
struct ResultRow {
  std::string algorithm;
  std::string application;
  int gamma = 0;
  int lambda = 0;
  std::string axis;   // swept parameter, or "user" for multi-app rows
  double value = 0.0;
  bool feasible = false;
  std::optional<Configuration> configuration;
  EvaluationReport report;
  double wall_ms = 0.0;  // solver wall-clock time
};

struct SolverParams {
  int gamma = 10;
  int lambda = 0;  // 0 means lambda = gamma
  TraversalMode mode = TraversalMode::kSurvival;
  long long opt_guard = kDefaultOptGuard;
};

/// Solves one application with one algorithm and evaluates the result with
/// the independent checker.
ResultRow solve_one(const Scenario& s, const std::string& app, Algorithm algo,
                    const SolverParams& params);

enum class SweepAxis { kDelta, kAlpha, kGamma, kLambda };

std::string sweep_axis_name(SweepAxis axis);
SweepAxis sweep_axis_from_name(const std::string& name);

/// One row per (algorithm, value), solved on a copy of the scenario with the
/// swept requirement overridden. Rows come back in canonical order.
std::vector<ResultRow> sweep(const Scenario& s, const std::string& app,
                             const std::vector<Algorithm>& algorithms,
                             SweepAxis axis, const std::vector<double>& values,
                             const SolverParams& params);

struct MultiAppOptions {
  int users = 6;
  SolverParams params;
  std::vector<Algorithm> algorithms = {Algorithm::kFinExact, Algorithm::kMcp};
  std::uint64_t seed = 0;
  // Share of edge and cloud compute reserved per application.
  double edge_cloud_compute_fraction = 0.005;
  // Bandwidth share per application; <= 0 means 1 / |applications|.
  double bandwidth_fraction = -1.0;
};

struct MultiAppAggregate {
  std::map<std::string, double> failure_probability;        // per algorithm
  std::map<std::pair<std::string, std::string>, double>
      failure_probability_per_app;                          // (algorithm, app)
  std::map<std::string, double> total_energy_w;             // per algorithm
  // Energy of one algorithm relative to the mcp baseline, summed over users
  // where both produced feasible configurations.
  std::map<std::string, double> energy_ratio_vs_mcp;
  std::map<std::pair<std::string, std::string>, double> deployment_share;
  std::map<std::pair<std::string, int>, double> exit_share;
};

struct MultiAppResult {
  Scenario expanded;             // per-user mobiles and sources, re-sliced
  std::vector<ResultRow> rows;   // one per (user, application, algorithm)
  MultiAppAggregate aggregate;
};

/// Expands the scenario to one mobile node (and co-located source) per user,
/// slices edge and cloud tiers per application, and solves every (user,
/// application, algorithm) combination independently.
MultiAppResult run_multi_app(const Scenario& base, const MultiAppOptions& options);

/// Copy of the scenario with one application's requirements overridden.
/// Values <= 0 keep the original requirement.
Scenario with_requirements(const Scenario& s, const std::string& app,
                           double target_accuracy, double target_latency);

}  // namespace fin
