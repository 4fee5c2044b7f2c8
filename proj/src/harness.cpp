#include "fin/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <tuple>

#include "fin/errors.hpp"
#include "fin/extended_graph.hpp"
#include "fin/feasible_graph.hpp"

namespace fin {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  const auto end = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(end - start).count();
}

}  // namespace

std::string sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kDelta: return "delta";
    case SweepAxis::kAlpha: return "alpha";
    case SweepAxis::kGamma: return "gamma";
    case SweepAxis::kLambda: return "lambda";
  }
  return "unknown";
}

SweepAxis sweep_axis_from_name(const std::string& name) {
  if (name == "delta") return SweepAxis::kDelta;
  if (name == "alpha") return SweepAxis::kAlpha;
  if (name == "gamma") return SweepAxis::kGamma;
  if (name == "lambda") return SweepAxis::kLambda;
  throw ParseError("unknown sweep axis '" + name + "'");
}

Scenario with_requirements(const Scenario& s, const std::string& app,
                           double target_accuracy, double target_latency) {
  Scenario copy = s;
  for (Application& a : copy.applications) {
    if (a.id == app) {
      if (target_accuracy > 0.0) a.target_accuracy = target_accuracy;
      if (target_latency > 0.0) a.target_latency = target_latency;
    }
  }
  copy.validate();
  return copy;
}

ResultRow solve_one(const Scenario& s, const std::string& app, Algorithm algo,
                    const SolverParams& params) {
  ResultRow row;
  row.algorithm = algorithm_name(algo);
  row.application = app;
  row.gamma = params.gamma;
  row.lambda = params.lambda > 0 ? params.lambda : params.gamma;

  const auto start = std::chrono::steady_clock::now();
  std::optional<Configuration> cfg;
  switch (algo) {
    case Algorithm::kFinExact: {
      ExtendedGraph g = build_extended_graph(s, app, params.mode);
      FeasibleGraph fg = build_feasible_graph(g, s.application(app), params.gamma);
      cfg = solve_exact(fg).configuration;
      break;
    }
    case Algorithm::kFinGreedy: {
      ExtendedGraph g = build_extended_graph(s, app, params.mode);
      FeasibleGraph fg = build_feasible_graph(g, s.application(app), params.gamma);
      cfg = solve_greedy(fg, row.lambda).configuration;
      break;
    }
    case Algorithm::kMcp: {
      ExtendedGraph g = build_extended_graph(s, app, params.mode);
      cfg = solve_mcp(s, g).configuration;
      break;
    }
    case Algorithm::kOpt: {
      cfg = solve_opt(s, app, params.mode, params.opt_guard).configuration;
      break;
    }
    case Algorithm::kManual:
      throw Error("manual configurations cannot be solved for");
  }
  row.wall_ms = elapsed_ms(start);

  if (cfg) {
    row.report = evaluate(s, app, *cfg, params.mode);
    row.feasible = row.report.feasible();
    row.configuration = std::move(cfg);
  }
  return row;
}

std::vector<ResultRow> sweep(const Scenario& s, const std::string& app,
                             const std::vector<Algorithm>& algorithms,
                             SweepAxis axis, const std::vector<double>& values,
                             const SolverParams& params) {
  if (values.empty()) throw Error("sweep requires at least one value");
  for (size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[i - 1]) {
      throw Error("sweep values must be monotone non-decreasing");
    }
  }

  std::vector<ResultRow> rows;
  for (Algorithm algo : algorithms) {
    for (double value : values) {
      SolverParams p = params;
      Scenario view = s;
      switch (axis) {
        case SweepAxis::kDelta:
          view = with_requirements(s, app, -1.0, value);
          break;
        case SweepAxis::kAlpha:
          view = with_requirements(s, app, value, -1.0);
          break;
        case SweepAxis::kGamma:
          p.gamma = static_cast<int>(value);
          if (p.lambda > p.gamma) p.lambda = p.gamma;
          break;
        case SweepAxis::kLambda:
          p.lambda = static_cast<int>(value);
          break;
      }
      ResultRow row = solve_one(view, app, algo, p);
      row.axis = sweep_axis_name(axis);
      row.value = value;
      rows.push_back(std::move(row));
    }
  }

  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.algorithm, a.application, a.gamma, a.lambda, a.value) <
           std::tie(b.algorithm, b.application, b.gamma, b.lambda, b.value);
  });
  return rows;
}

namespace {

std::string user_tag(int user) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "u%03d", user);
  return buf;
}

}  // namespace

MultiAppResult run_multi_app(const Scenario& base, const MultiAppOptions& options) {
  if (options.users < 1) throw Error("multi-app run requires at least one user");
  if (base.applications.empty()) {
    throw Error("multi-app run requires a scenario with applications");
  }

  const int app_count = static_cast<int>(base.applications.size());
  const double bandwidth_share = options.bandwidth_fraction > 0.0
                                     ? options.bandwidth_fraction
                                     : 1.0 / static_cast<double>(app_count);

  // Template nodes: the first mobile node and its outgoing link pattern.
  const NetworkNode* mobile_template = nullptr;
  for (const NetworkNode& n : base.nodes) {
    if (n.tier == Tier::kMobile) {
      mobile_template = &n;
      break;
    }
  }
  if (mobile_template == nullptr) {
    throw Error("multi-app run requires a mobile template node");
  }

  MultiAppResult result;
  Scenario& s = result.expanded;

  // Fixed tiers: every non-mobile, non-source node is kept.
  for (const NetworkNode& n : base.nodes) {
    if (n.tier == Tier::kEdge || n.tier == Tier::kCloud) s.nodes.push_back(n);
  }
  std::vector<std::string> fixed_ids;
  for (const NetworkNode& n : s.nodes) fixed_ids.push_back(n.id);

  std::vector<std::string> user_sources;
  std::vector<std::string> user_mobiles;
  for (int u = 0; u < options.users; ++u) {
    const std::string tag = user_tag(u);
    NetworkNode source;
    source.id = tag + "_src";
    source.tier = Tier::kSource;
    source.uplink_capacity = std::numeric_limits<double>::infinity();
    source.downlink_capacity = std::numeric_limits<double>::infinity();
    NetworkNode mobile = *mobile_template;
    mobile.id = tag + "_mobile";
    user_sources.push_back(source.id);
    user_mobiles.push_back(mobile.id);
    s.nodes.push_back(std::move(source));
    s.nodes.push_back(std::move(mobile));

    s.links.push_back(
        {tag + "_src", tag + "_mobile", std::numeric_limits<double>::infinity()});
    for (const std::string& fixed : fixed_ids) {
      s.links.push_back({tag + "_mobile", fixed,
                         std::numeric_limits<double>::infinity()});
      s.links.push_back({fixed, tag + "_mobile",
                         std::numeric_limits<double>::infinity()});
    }
  }
  // Links among the fixed tiers are carried over.
  for (const Link& l : base.links) {
    const bool from_fixed =
        std::find(fixed_ids.begin(), fixed_ids.end(), l.from) != fixed_ids.end();
    const bool to_fixed =
        std::find(fixed_ids.begin(), fixed_ids.end(), l.to) != fixed_ids.end();
    if (from_fixed && to_fixed) s.links.push_back(l);
  }

  s.applications = base.applications;
  for (Application& a : s.applications) a.source_node = user_sources.front();

  // Slices: every application holds a fixed share of edge and cloud
  // resources; user mobiles are shared evenly among the applications.
  for (const std::string& fixed : fixed_ids) {
    for (const Application& a : s.applications) {
      SliceShare share;
      share.application = a.id;
      share.node = fixed;
      share.compute_fraction = options.edge_cloud_compute_fraction;
      share.bandwidth_fraction = bandwidth_share;
      s.slices.push_back(std::move(share));
    }
  }
  for (const std::string& mobile : user_mobiles) {
    for (const Application& a : s.applications) {
      SliceShare share;
      share.application = a.id;
      share.node = mobile;
      share.compute_fraction = 1.0 / static_cast<double>(app_count);
      share.bandwidth_fraction = 1.0 / static_cast<double>(app_count);
      s.slices.push_back(std::move(share));
    }
  }
  s.validate();

  for (int u = 0; u < options.users; ++u) {
    Scenario view = s;
    for (Application& a : view.applications) {
      a.source_node = user_sources[static_cast<size_t>(u)];
    }
    view.validate();
    for (const Application& a : view.applications) {
      for (Algorithm algo : options.algorithms) {
        ResultRow row = solve_one(view, a.id, algo, options.params);
        row.axis = "user";
        row.value = static_cast<double>(u);
        result.rows.push_back(std::move(row));
      }
    }
  }

  std::sort(result.rows.begin(), result.rows.end(),
            [](const ResultRow& a, const ResultRow& b) {
              return std::tie(a.algorithm, a.application, a.value) <
                     std::tie(b.algorithm, b.application, b.value);
            });

  // Aggregates.
  MultiAppAggregate& agg = result.aggregate;
  std::map<std::string, int> solves;
  std::map<std::string, int> failures;
  std::map<std::pair<std::string, std::string>, int> solves_app;
  std::map<std::pair<std::string, std::string>, int> failures_app;
  std::map<std::string, int> blocks_total;
  std::map<std::pair<std::string, std::string>, int> blocks_tier;
  std::map<std::string, int> exits_total;
  std::map<std::pair<std::string, int>, int> exits_count;

  for (const ResultRow& row : result.rows) {
    ++solves[row.algorithm];
    ++solves_app[{row.algorithm, row.application}];
    if (!row.feasible) {
      ++failures[row.algorithm];
      ++failures_app[{row.algorithm, row.application}];
      continue;
    }
    agg.total_energy_w[row.algorithm] += row.report.total_energy_w;
    blocks_total[row.algorithm] += row.report.blocks_mobile +
                                   row.report.blocks_edge +
                                   row.report.blocks_cloud;
    blocks_tier[{row.algorithm, "mobile"}] += row.report.blocks_mobile;
    blocks_tier[{row.algorithm, "edge"}] += row.report.blocks_edge;
    blocks_tier[{row.algorithm, "cloud"}] += row.report.blocks_cloud;
    ++exits_total[row.algorithm];
    ++exits_count[{row.algorithm, row.report.exit_index}];
  }
  for (const auto& [algo, count] : solves) {
    agg.failure_probability[algo] =
        static_cast<double>(failures[algo]) / static_cast<double>(count);
  }
  for (const auto& [key, count] : solves_app) {
    agg.failure_probability_per_app[key] =
        static_cast<double>(failures_app[key]) / static_cast<double>(count);
  }
  for (const auto& [key, count] : blocks_tier) {
    if (blocks_total[key.first] > 0) {
      agg.deployment_share[key] = static_cast<double>(count) /
                                  static_cast<double>(blocks_total[key.first]);
    }
  }
  for (const auto& [key, count] : exits_count) {
    agg.exit_share[key] = static_cast<double>(count) /
                          static_cast<double>(exits_total[key.first]);
  }

  // Energy relative to the mcp baseline over users where both are feasible.
  const std::string mcp_name = algorithm_name(Algorithm::kMcp);
  std::map<std::pair<std::string, double>, const ResultRow*> mcp_rows;
  for (const ResultRow& row : result.rows) {
    if (row.algorithm == mcp_name && row.feasible) {
      mcp_rows[{row.application, row.value}] = &row;
    }
  }
  std::map<std::string, double> own_sum;
  std::map<std::string, double> mcp_sum;
  for (const ResultRow& row : result.rows) {
    if (row.algorithm == mcp_name || !row.feasible) continue;
    auto it = mcp_rows.find({row.application, row.value});
    if (it == mcp_rows.end()) continue;
    own_sum[row.algorithm] += row.report.total_energy_w;
    mcp_sum[row.algorithm] += it->second->report.total_energy_w;
  }
  for (const auto& [algo, own] : own_sum) {
    if (mcp_sum[algo] > 0.0) {
      agg.energy_ratio_vs_mcp[algo] = own / mcp_sum[algo];
    }
  }
  return result;
}

}  // namespace fin
