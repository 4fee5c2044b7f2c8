#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fin/scenario.hpp"

namespace fin {

/// Placement vertex: a network node bound to one DNN block. Block 0 marks
/// the pure data-source vertex, which carries no block.
struct Vertex {
  int node = -1;   // index into Scenario::nodes
  int block = 0;   // 1-based block index, 0 for the data source
};

/// Weights of one graph edge. Traversing the edge means moving the tail
/// block's output tensor between the two nodes and executing the head block
/// (backbone plus exit head, if any) on the head node.
struct EdgeWeights {
  double transfer_time = 0.0;      // s
  double compute_time = 0.0;       // s
  double energy = 0.0;             // J/inference, comm + compute
  double comm_energy = 0.0;        // J/inference
  double compute_energy = 0.0;     // J/inference
  double data_bits = 0.0;          // tensor size moved across the edge
  double ops = 0.0;                // operations executed at the head node
  double traversal_fraction = 1.0; // sample fraction weighting this edge
  double link_capacity = 0.0;      // effective bits/s for this node pair
  double compute_capacity = 0.0;   // effective ops/s at the head node
};

struct ExtendedEdge {
  int from = -1;  // vertex index
  int to = -1;    // vertex index
  EdgeWeights w;
};

/// Weighting scheme for traversal_fraction. `kSurvival` uses the fraction of
/// samples still in flight when the edge is traversed; `kLiteral` uses the
/// exit fraction of the tail block, reproducing the objective as printed.
enum class TraversalMode { kSurvival, kLiteral };

std::string traversal_mode_name(TraversalMode mode);
TraversalMode traversal_mode_from_name(const std::string& name);

/// Single-plane placement graph of one application: vertices are (node,
/// block) pairs, edges connect consecutive blocks across communicating
/// nodes. A DAG ordered by block index.
struct ExtendedGraph {
  std::string application;
  TraversalMode mode = TraversalMode::kSurvival;
  std::vector<std::string> node_ids;        // scenario node ids by index
  std::vector<Vertex> vertices;
  std::vector<ExtendedEdge> edges;
  std::vector<std::vector<int>> out_edges;  // vertex -> edge indices
  std::vector<int> source_vertices;         // block == 0
  std::vector<int> terminal_vertices;       // exits meeting target accuracy
  std::vector<int> exit_index_of_block;     // [block] -> exit index, 0 if none

  int vertex_index(int node, int block) const;  // -1 when absent
  const std::string& node_id(int vertex) const {
    return node_ids[static_cast<size_t>(vertices[static_cast<size_t>(vertex)].node)];
  }
  bool empty() const { return vertices.empty(); }
};

/// Energy of moving `data_bits` between two nodes and running `ops` on the
/// receiver. The communication term vanishes on a self loop.
double edge_energy(double data_bits, double ops, const NetworkNode& sender,
                   const NetworkNode& receiver);

/// Builds the placement graph for one application. Every node with nonzero
/// effective compute may host every block; an edge exists for every ordered
/// node pair with positive effective bandwidth (or equal nodes) and every
/// consecutive block pair. Throws when the application is unknown or its
/// data source cannot reach any compute node.
ExtendedGraph build_extended_graph(const Scenario& s, const std::string& app,
                                   TraversalMode mode = TraversalMode::kSurvival);

void export_dot(const ExtendedGraph& g, const Scenario& s, std::ostream& out);
void export_dot(const ExtendedGraph& g, const Scenario& s,
                const std::filesystem::path& path);

}  // namespace fin
