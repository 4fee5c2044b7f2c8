#pragma once

#include <span>
#include <string>
#include <vector>

#include "fin/extended_graph.hpp"
#include "fin/scenario.hpp"

namespace fin {

/// Depth replica of a placement vertex. Depth counts accumulated latency in
/// units of target_latency / gamma; replicas live at depths 0..gamma.
struct ReplicaVertex {
  int vertex = -1;  // index into the extended graph
  int depth = 0;
};

struct FeasibleEdge {
  int from = -1;       // replica index
  int to = -1;         // replica index
  int ext_edge = -1;   // underlying extended-graph edge
  int steepness = 0;   // depth increase, fixed by the latency quantum
  double energy = 0.0; // traversal_fraction * edge energy, J/inference
};

/// Depth increase of an edge with combined time `tc` under budget `delta`
/// split into `gamma` quanta. Zero only when tc is exactly zero.
int depth_advance(double tc, double delta, int gamma);

/// Depth-replicated, pruned DAG. By construction every source-to-terminal
/// path satisfies the latency budget; edges violating per-edge rate limits
/// are pruned, and only exits meeting the accuracy target are terminals.
struct FeasibleGraph {
  ExtendedGraph graph;  // the underlying placement graph
  int gamma = 1;
  std::vector<FeasibleEdge> edges;
  std::vector<std::vector<int>> out_edges;  // replica -> edge indices
  std::vector<int> source_replicas;         // depth-0 sources
  std::vector<int> terminal_replicas;       // any depth <= gamma

  int replica_count() const {
    return static_cast<int>(graph.vertices.size()) * (gamma + 1);
  }
  int replica_id(int vertex, int depth) const { return vertex * (gamma + 1) + depth; }
  int replica_vertex(int id) const { return id / (gamma + 1); }
  int replica_depth(int id) const { return id % (gamma + 1); }

  /// True when no terminal is reachable from any source; callers treat the
  /// graph as an infeasible instance rather than an error.
  bool unreachable() const { return unreachable_; }
  void set_unreachable(bool value) { unreachable_ = value; }

 private:
  bool unreachable_ = true;
};

/// Replicates every placement vertex gamma+1 times, connects replicas whose
/// depth difference equals the edge's latency quantum, prunes edges that
/// would exceed the application's bandwidth or compute share at rate sigma,
/// and keeps as terminals only exits meeting the accuracy target.
FeasibleGraph build_feasible_graph(const ExtendedGraph& g, const Application& app,
                                   int gamma);

/// Sum of edge steepness along a connected replica path; equals the depth
/// difference between its endpoints. Throws on a disconnected sequence.
int steepness(const FeasibleGraph& fg, std::span<const int> replica_path);

void export_dot(const FeasibleGraph& fg, const Scenario& s, std::ostream& out);
void export_dot(const FeasibleGraph& fg, const Scenario& s,
                const std::filesystem::path& path);

}  // namespace fin
