#include "fin/solver.hpp"

#include <algorithm>
#include <limits>

#include "fin/errors.hpp"

namespace fin {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kFinExact: return "fin-exact";
    case Algorithm::kFinGreedy: return "fin-greedy";
    case Algorithm::kMcp: return "mcp";
    case Algorithm::kOpt: return "opt";
    case Algorithm::kManual: return "manual";
  }
  return "unknown";
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "fin-exact") return Algorithm::kFinExact;
  if (name == "fin-greedy") return Algorithm::kFinGreedy;
  if (name == "mcp") return Algorithm::kMcp;
  if (name == "opt") return Algorithm::kOpt;
  if (name == "manual") return Algorithm::kManual;
  throw ParseError("unknown algorithm '" + name + "'");
}

std::vector<std::string> Configuration::node_sequence() const {
  std::vector<std::string> seq;
  seq.reserve(placements.size());
  for (const auto& [block, node] : placements) seq.push_back(node);
  return seq;
}

namespace {

struct ReplicaState {
  double energy = kInf;
  int pred_replica = -1;
  int pred_edge = -1;
  bool reached = false;
};

std::vector<std::string> path_node_ids(const FeasibleGraph& fg,
                                       const std::vector<ReplicaState>& state,
                                       int replica) {
  std::vector<std::string> seq;
  int cur = replica;
  while (cur >= 0) {
    const Vertex& v =
        fg.graph.vertices[static_cast<size_t>(fg.replica_vertex(cur))];
    if (v.block > 0) seq.push_back(fg.graph.node_id(fg.replica_vertex(cur)));
    cur = state[static_cast<size_t>(cur)].pred_replica;
  }
  std::reverse(seq.begin(), seq.end());
  return seq;
}

Configuration configuration_from(const FeasibleGraph& fg,
                                 const std::vector<ReplicaState>& state,
                                 int terminal, Algorithm tag) {
  Configuration cfg;
  cfg.application = fg.graph.application;
  int cur = terminal;
  while (cur >= 0) {
    const int vi = fg.replica_vertex(cur);
    const Vertex& v = fg.graph.vertices[static_cast<size_t>(vi)];
    if (v.block > 0) {
      cfg.placements.emplace_back(v.block, fg.graph.node_id(vi));
    }
    cur = state[static_cast<size_t>(cur)].pred_replica;
  }
  std::reverse(cfg.placements.begin(), cfg.placements.end());
  cfg.algorithm = tag;
  return cfg;
}

}  // namespace

SolveResult solve_exact(const FeasibleGraph& fg) {
  SolveResult result;
  if (fg.unreachable()) return result;

  std::vector<ReplicaState> state(static_cast<size_t>(fg.replica_count()));
  for (int src : fg.source_replicas) {
    state[static_cast<size_t>(src)] = {0.0, -1, -1, true};
  }

  // Every edge advances the block index by exactly one, so scanning replicas
  // grouped by block gives a topological order.
  const int vertex_count = static_cast<int>(fg.graph.vertices.size());
  std::vector<int> vertex_order(static_cast<size_t>(vertex_count));
  for (int i = 0; i < vertex_count; ++i) vertex_order[static_cast<size_t>(i)] = i;
  std::stable_sort(vertex_order.begin(), vertex_order.end(), [&](int a, int b) {
    return fg.graph.vertices[static_cast<size_t>(a)].block <
           fg.graph.vertices[static_cast<size_t>(b)].block;
  });

  for (int vi : vertex_order) {
    for (int depth = 0; depth <= fg.gamma; ++depth) {
      const int r = fg.replica_id(vi, depth);
      if (!state[static_cast<size_t>(r)].reached) continue;
      const double base = state[static_cast<size_t>(r)].energy;
      for (int fei : fg.out_edges[static_cast<size_t>(r)]) {
        const FeasibleEdge& fe = fg.edges[static_cast<size_t>(fei)];
        ReplicaState& head = state[static_cast<size_t>(fe.to)];
        const double candidate = base + fe.energy;
        bool better = false;
        if (!head.reached || candidate < head.energy) {
          better = true;
        } else if (candidate == head.energy) {
          auto cand_seq = path_node_ids(fg, state, r);
          cand_seq.push_back(fg.graph.node_id(fg.replica_vertex(fe.to)));
          better = cand_seq < path_node_ids(fg, state, fe.to);
        }
        if (better) head = {candidate, r, fei, true};
      }
    }
  }

  int best = -1;
  for (int term : fg.terminal_replicas) {
    const ReplicaState& ts = state[static_cast<size_t>(term)];
    if (!ts.reached) continue;
    if (best < 0) {
      best = term;
      continue;
    }
    const ReplicaState& bs = state[static_cast<size_t>(best)];
    const int term_block =
        fg.graph.vertices[static_cast<size_t>(fg.replica_vertex(term))].block;
    const int best_block =
        fg.graph.vertices[static_cast<size_t>(fg.replica_vertex(best))].block;
    if (ts.energy < bs.energy ||
        (ts.energy == bs.energy &&
         (term_block < best_block ||
          (term_block == best_block &&
           path_node_ids(fg, state, term) < path_node_ids(fg, state, best))))) {
      best = term;
    }
  }
  if (best < 0) return result;

  Configuration cfg = configuration_from(fg, state, best, Algorithm::kFinExact);
  const int exit_block =
      fg.graph.vertices[static_cast<size_t>(fg.replica_vertex(best))].block;
  cfg.exit_index = fg.graph.exit_index_of_block[static_cast<size_t>(exit_block)];
  result.configuration = std::move(cfg);
  result.energy = state[static_cast<size_t>(best)].energy;
  return result;
}

SolveResult solve_greedy(const FeasibleGraph& fg, int lambda) {
  if (lambda < 1 || lambda > fg.gamma) {
    throw Error("lambda must lie in [1, gamma]");
  }
  SolveResult result;
  if (fg.unreachable()) return result;

  // Target the deepest accuracy-feasible exit block.
  int target_block = 0;
  for (int term : fg.graph.terminal_vertices) {
    target_block =
        std::max(target_block, fg.graph.vertices[static_cast<size_t>(term)].block);
  }
  if (target_block == 0) return result;

  Configuration cfg;
  cfg.application = fg.graph.application;
  cfg.algorithm = Algorithm::kFinGreedy;
  double energy = 0.0;

  int current = fg.source_replicas.front();
  const int window_low = fg.gamma - lambda;
  for (int next_block = 1; next_block <= target_block; ++next_block) {
    int chosen_edge = -1;
    bool chosen_in_window = false;
    auto consider = [&](int fei, bool in_window) {
      const FeasibleEdge& fe = fg.edges[static_cast<size_t>(fei)];
      if (chosen_edge < 0) {
        chosen_edge = fei;
        chosen_in_window = in_window;
        return;
      }
      const FeasibleEdge& cur = fg.edges[static_cast<size_t>(chosen_edge)];
      if (in_window != chosen_in_window) {
        if (in_window) {
          chosen_edge = fei;
          chosen_in_window = true;
        }
        return;
      }
      const std::string& fe_node = fg.graph.node_id(fg.replica_vertex(fe.to));
      const std::string& cur_node = fg.graph.node_id(fg.replica_vertex(cur.to));
      const int fe_depth = fg.replica_depth(fe.to);
      const int cur_depth = fg.replica_depth(cur.to);
      if (fe.energy < cur.energy ||
          (fe.energy == cur.energy &&
           (fe_node < cur_node ||
            (fe_node == cur_node && fe_depth < cur_depth)))) {
        chosen_edge = fei;
      }
    };
    for (int fei : fg.out_edges[static_cast<size_t>(current)]) {
      const FeasibleEdge& fe = fg.edges[static_cast<size_t>(fei)];
      const int head_depth = fg.replica_depth(fe.to);
      consider(fei, head_depth >= window_low);
    }
    if (chosen_edge < 0) return result;  // stuck with no outgoing edge

    const FeasibleEdge& fe = fg.edges[static_cast<size_t>(chosen_edge)];
    const int head_vertex = fg.replica_vertex(fe.to);
    cfg.placements.emplace_back(next_block, fg.graph.node_id(head_vertex));
    energy += fe.energy;
    current = fe.to;
  }

  cfg.exit_index = fg.graph.exit_index_of_block[static_cast<size_t>(target_block)];
  result.configuration = std::move(cfg);
  result.energy = energy;
  return result;
}

}  // namespace fin
