#include "fin/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fin/errors.hpp"

namespace fin {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

BaselineResult solve_mcp(const Scenario& s, const ExtendedGraph& g) {
  BaselineResult result;
  const Application& app = s.application(g.application);
  const double delta = app.target_latency;
  const double alpha = app.target_accuracy;

  // a(block): accuracy of the deepest exit at or before the block.
  std::vector<double> accuracy_upto(static_cast<size_t>(app.block_count()) + 1, 0.0);
  double running = 0.0;
  for (const DnnBlock& b : app.model) {
    if (b.exit) running = b.exit->accuracy;
    accuracy_upto[static_cast<size_t>(b.index)] = running;
  }

  struct State {
    double omega = kInf;
    int pred_vertex = -1;
    bool reached = false;
  };
  std::vector<State> state(g.vertices.size());
  for (int src : g.source_vertices) state[static_cast<size_t>(src)] = {0.0, -1, true};

  auto node_seq = [&](int vertex) {
    std::vector<std::string> seq;
    int cur = vertex;
    while (cur >= 0) {
      if (g.vertices[static_cast<size_t>(cur)].block > 0) {
        seq.push_back(g.node_id(cur));
      }
      cur = state[static_cast<size_t>(cur)].pred_vertex;
    }
    std::reverse(seq.begin(), seq.end());
    return seq;
  };

  // Vertices are already ordered by block, which is a topological order.
  for (int vi = 0; vi < static_cast<int>(g.vertices.size()); ++vi) {
    if (!state[static_cast<size_t>(vi)].reached) continue;
    const double base = state[static_cast<size_t>(vi)].omega;
    for (int ei : g.out_edges[static_cast<size_t>(vi)]) {
      const ExtendedEdge& e = g.edges[static_cast<size_t>(ei)];
      const int head_block = g.vertices[static_cast<size_t>(e.to)].block;
      const double omega =
          (e.w.transfer_time + e.w.compute_time) / delta +
          accuracy_upto[static_cast<size_t>(head_block)] / alpha;
      const double candidate = base + omega;
      State& head = state[static_cast<size_t>(e.to)];
      bool better = false;
      if (!head.reached || candidate < head.omega) {
        better = true;
      } else if (candidate == head.omega) {
        auto cand = node_seq(vi);
        cand.push_back(g.node_id(e.to));
        better = cand < node_seq(e.to);
      }
      if (better) head = {candidate, vi, true};
    }
  }

  // Endpoints: every exit vertex, independent of the accuracy target.
  int best = -1;
  for (int vi = 0; vi < static_cast<int>(g.vertices.size()); ++vi) {
    const Vertex& v = g.vertices[static_cast<size_t>(vi)];
    if (v.block == 0 ||
        g.exit_index_of_block[static_cast<size_t>(v.block)] == 0) {
      continue;
    }
    if (!state[static_cast<size_t>(vi)].reached) continue;
    if (best < 0) {
      best = vi;
      continue;
    }
    const State& cand = state[static_cast<size_t>(vi)];
    const State& cur = state[static_cast<size_t>(best)];
    const int cand_block = v.block;
    const int best_block = g.vertices[static_cast<size_t>(best)].block;
    if (cand.omega < cur.omega ||
        (cand.omega == cur.omega &&
         (cand_block < best_block ||
          (cand_block == best_block && node_seq(vi) < node_seq(best))))) {
      best = vi;
    }
  }
  if (best < 0) return result;

  Configuration cfg;
  cfg.application = g.application;
  cfg.algorithm = Algorithm::kMcp;
  int cur = best;
  while (cur >= 0) {
    const Vertex& v = g.vertices[static_cast<size_t>(cur)];
    if (v.block > 0) cfg.placements.emplace_back(v.block, g.node_id(cur));
    cur = state[static_cast<size_t>(cur)].pred_vertex;
  }
  std::reverse(cfg.placements.begin(), cfg.placements.end());
  cfg.exit_index = g.exit_index_of_block[static_cast<size_t>(
      g.vertices[static_cast<size_t>(best)].block)];

  result.report = evaluate(s, g.application, cfg, g.mode);
  result.energy = result.report.total_energy_j;
  result.feasible = result.report.feasible();
  result.configuration = std::move(cfg);
  return result;
}

namespace {

struct OptBest {
  bool found = false;
  double energy = kInf;
  int blocks = 0;
  std::vector<std::string> sequence;
  Configuration configuration;
};

struct OptContext {
  const Scenario* scenario = nullptr;
  const Application* app = nullptr;
  TraversalMode mode = TraversalMode::kSurvival;
  std::vector<int> hosts;  // node indices with nonzero effective compute
  int exit_block = 0;
  OptBest* best = nullptr;
};

// Depth-first assignment of blocks to hosts with additive pruning. Partial
// latency and energy only grow, so branches beyond the current best or the
// latency budget are cut.
void opt_search(OptContext& ctx, int block, const std::string& prev,
                double latency, double energy,
                std::vector<std::string>& chosen) {
  const Scenario& s = *ctx.scenario;
  const Application& app = *ctx.app;
  const std::string& app_id = app.id;
  const double sigma = app.inference_rate;
  const double delta = app.target_latency;

  if (block > ctx.exit_block) {
    OptBest& best = *ctx.best;
    if (!best.found || energy < best.energy ||
        (energy == best.energy &&
         (ctx.exit_block < best.blocks ||
          (ctx.exit_block == best.blocks && chosen < best.sequence)))) {
      best.found = true;
      best.energy = energy;
      best.blocks = ctx.exit_block;
      best.sequence = chosen;
      Configuration cfg;
      cfg.application = app_id;
      cfg.algorithm = Algorithm::kOpt;
      for (int b = 1; b <= ctx.exit_block; ++b) {
        cfg.placements.emplace_back(b, chosen[static_cast<size_t>(b - 1)]);
      }
      cfg.exit_index = app.block(ctx.exit_block).exit->index;
      best.configuration = std::move(cfg);
    }
    return;
  }

  const DnnBlock& b = app.block(block);
  const double data_bits =
      block == 1 ? 0.0
                 : app.block(block - 1).output_features * app.bits_per_feature;
  const double ops = b.ops + (b.exit ? b.exit->ops : 0.0);

  double traversal = 1.0;
  if (ctx.mode == TraversalMode::kSurvival) {
    traversal = block == 1 ? 1.0 : survival_fraction(app, block - 1);
  } else {
    const bool tail_has_exit = block > 1 && app.block(block - 1).exit.has_value();
    traversal = tail_has_exit ? app.block(block - 1).exit->output_fraction : 0.0;
  }

  for (int host_idx : ctx.hosts) {
    const std::string& host = s.nodes[static_cast<size_t>(host_idx)].id;
    const double bandwidth = effective_bandwidth(s, app_id, prev, host);
    if (!(bandwidth > 0.0)) continue;
    const double compute = effective_compute(s, app_id, host);

    if (sigma * traversal * data_bits > bandwidth) continue;
    if (sigma * traversal * ops > compute) continue;

    const double transfer_time = data_bits > 0.0 ? data_bits / bandwidth : 0.0;
    const double compute_time = ops > 0.0 ? ops / compute : 0.0;
    const double hop_latency = latency + transfer_time + compute_time;
    if (hop_latency > delta) continue;

    const NetworkNode& sender = s.node(prev);
    const NetworkNode& receiver = s.nodes[static_cast<size_t>(host_idx)];
    const double comm_e =
        prev == host ? 0.0
                     : (sender.tx_energy_per_bit + receiver.rx_energy_per_bit) *
                           data_bits;
    const double compute_e = receiver.compute_energy_per_op() * ops;
    const double hop_energy = energy + traversal * (comm_e + compute_e);
    if (ctx.best->found && hop_energy > ctx.best->energy) continue;

    chosen.push_back(host);
    opt_search(ctx, block + 1, host, hop_latency, hop_energy, chosen);
    chosen.pop_back();
  }
}

}  // namespace

SolveResult solve_opt(const Scenario& s, const std::string& app_id,
                      TraversalMode mode, long long guard) {
  const Application& app = s.application(app_id);

  std::vector<int> hosts;
  for (int ni = 0; ni < static_cast<int>(s.nodes.size()); ++ni) {
    if (effective_compute(s, app_id, s.nodes[static_cast<size_t>(ni)].id) > 0.0) {
      hosts.push_back(ni);
    }
  }

  std::vector<int> exit_blocks;
  for (const DnnBlock& b : app.model) {
    if (b.exit && b.exit->accuracy >= app.target_accuracy) {
      exit_blocks.push_back(b.index);
    }
  }

  // Candidate count guard before enumeration.
  double candidates = 0.0;
  for (int exit_block : exit_blocks) {
    candidates += std::pow(static_cast<double>(hosts.size()),
                           static_cast<double>(exit_block));
    if (candidates > static_cast<double>(guard)) {
      throw SearchGuardError(
          "exhaustive search would exceed the candidate budget of " +
          std::to_string(guard));
    }
  }

  OptBest best;
  for (int exit_block : exit_blocks) {
    OptContext ctx;
    ctx.scenario = &s;
    ctx.app = &app;
    ctx.mode = mode;
    ctx.hosts = hosts;
    ctx.exit_block = exit_block;
    ctx.best = &best;
    std::vector<std::string> chosen;
    opt_search(ctx, 1, app.source_node, 0.0, 0.0, chosen);
  }

  SolveResult result;
  if (best.found) {
    result.configuration = std::move(best.configuration);
    result.energy = best.energy;
  }
  return result;
}

}  // namespace fin
