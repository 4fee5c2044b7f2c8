#include "fin/extended_graph.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "fin/errors.hpp"

namespace fin {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string traversal_mode_name(TraversalMode mode) {
  return mode == TraversalMode::kSurvival ? "survival" : "literal";
}

TraversalMode traversal_mode_from_name(const std::string& name) {
  if (name == "survival") return TraversalMode::kSurvival;
  if (name == "literal") return TraversalMode::kLiteral;
  throw ParseError("unknown traversal mode '" + name + "'");
}

double edge_energy(double data_bits, double ops, const NetworkNode& sender,
                   const NetworkNode& receiver) {
  double comm = 0.0;
  if (sender.id != receiver.id) {
    comm = (sender.tx_energy_per_bit + receiver.rx_energy_per_bit) * data_bits;
  }
  return comm + receiver.compute_energy_per_op() * ops;
}

int ExtendedGraph::vertex_index(int node, int block) const {
  for (int i = 0; i < static_cast<int>(vertices.size()); ++i) {
    if (vertices[static_cast<size_t>(i)].node == node &&
        vertices[static_cast<size_t>(i)].block == block) {
      return i;
    }
  }
  return -1;
}

ExtendedGraph build_extended_graph(const Scenario& s, const std::string& app_id,
                                   TraversalMode mode) {
  const Application& app = s.application(app_id);

  ExtendedGraph g;
  g.application = app_id;
  g.mode = mode;
  g.node_ids.reserve(s.nodes.size());
  for (const NetworkNode& n : s.nodes) g.node_ids.push_back(n.id);

  // Hosts: every node with nonzero effective compute for this application.
  std::vector<int> hosts;
  for (int ni = 0; ni < static_cast<int>(s.nodes.size()); ++ni) {
    if (effective_compute(s, app_id, s.nodes[static_cast<size_t>(ni)].id) > 0.0) {
      hosts.push_back(ni);
    }
  }

  const int source_node = s.node_index(app.source_node);
  g.vertices.push_back({source_node, 0});
  g.source_vertices.push_back(0);

  // Vertices ordered by (block, node declaration order).
  std::map<std::pair<int, int>, int> vertex_of;  // (block, node) -> index
  vertex_of[{0, source_node}] = 0;
  for (int block = 1; block <= app.block_count(); ++block) {
    for (int ni : hosts) {
      vertex_of[{block, ni}] = static_cast<int>(g.vertices.size());
      g.vertices.push_back({ni, block});
    }
  }
  g.out_edges.assign(g.vertices.size(), {});

  for (int vi = 0; vi < static_cast<int>(g.vertices.size()); ++vi) {
    const Vertex& v = g.vertices[static_cast<size_t>(vi)];
    if (v.block == app.block_count()) continue;  // no blocks beyond the last
    const int head_block = v.block + 1;
    const DnnBlock& head = app.block(head_block);
    const std::string& tail_id = s.nodes[static_cast<size_t>(v.node)].id;

    const double data_bits =
        v.block == 0 ? 0.0
                     : app.block(v.block).output_features * app.bits_per_feature;
    const double ops = head.ops + (head.exit ? head.exit->ops : 0.0);

    double traversal = 1.0;
    if (mode == TraversalMode::kSurvival) {
      traversal = v.block == 0 ? 1.0 : survival_fraction(app, v.block);
    } else {
      const bool tail_has_exit = v.block > 0 && app.block(v.block).exit.has_value();
      traversal = tail_has_exit ? app.block(v.block).exit->output_fraction : 0.0;
    }

    for (int ni : hosts) {
      const std::string& head_id = s.nodes[static_cast<size_t>(ni)].id;
      const double bandwidth = effective_bandwidth(s, app_id, tail_id, head_id);
      if (!(bandwidth > 0.0)) continue;
      const double compute = effective_compute(s, app_id, head_id);

      EdgeWeights w;
      w.data_bits = data_bits;
      w.ops = ops;
      w.traversal_fraction = traversal;
      w.link_capacity = bandwidth;
      w.compute_capacity = compute;
      w.transfer_time = data_bits > 0.0 ? data_bits / bandwidth : 0.0;
      w.compute_time = ops > 0.0 ? ops / compute : 0.0;
      const NetworkNode& tail_node = s.nodes[static_cast<size_t>(v.node)];
      const NetworkNode& head_node = s.nodes[static_cast<size_t>(ni)];
      w.comm_energy = tail_node.id == head_node.id
                          ? 0.0
                          : (tail_node.tx_energy_per_bit +
                             head_node.rx_energy_per_bit) *
                                data_bits;
      w.compute_energy = head_node.compute_energy_per_op() * ops;
      w.energy = w.comm_energy + w.compute_energy;

      ExtendedEdge e;
      e.from = vi;
      e.to = vertex_of.at({head_block, ni});
      e.w = w;
      g.out_edges[static_cast<size_t>(vi)].push_back(
          static_cast<int>(g.edges.size()));
      g.edges.push_back(std::move(e));
    }
  }

  if (g.out_edges[0].empty()) {
    throw Error("application '" + app_id +
                "': data source cannot reach any compute node");
  }

  g.exit_index_of_block.assign(static_cast<size_t>(app.block_count()) + 1, 0);
  for (const DnnBlock& b : app.model) {
    if (b.exit) g.exit_index_of_block[static_cast<size_t>(b.index)] = b.exit->index;
  }
  for (int vi = 0; vi < static_cast<int>(g.vertices.size()); ++vi) {
    const Vertex& v = g.vertices[static_cast<size_t>(vi)];
    if (v.block == 0) continue;
    const DnnBlock& b = app.block(v.block);
    if (b.exit && b.exit->accuracy >= app.target_accuracy) {
      g.terminal_vertices.push_back(vi);
    }
  }
  return g;
}

namespace {

void write_dot(const ExtendedGraph& g, const Scenario& s, std::ostream& out) {
  out << "digraph extended {\n";
  out << "  rankdir=LR;\n";
  for (int vi = 0; vi < static_cast<int>(g.vertices.size()); ++vi) {
    const Vertex& v = g.vertices[static_cast<size_t>(vi)];
    const std::string& node_id = s.nodes[static_cast<size_t>(v.node)].id;
    out << "  v" << vi << " [label=\"" << node_id;
    if (v.block > 0) out << "," << v.block;
    out << "\"];\n";
  }
  for (const ExtendedEdge& e : g.edges) {
    std::ostringstream label;
    label << e.w.transfer_time << "|" << e.w.compute_time << "|" << e.w.energy;
    out << "  v" << e.from << " -> v" << e.to << " [label=\"" << label.str()
        << "\"];\n";
  }
  out << "}\n";
}

}  // namespace

void export_dot(const ExtendedGraph& g, const Scenario& s, std::ostream& out) {
  write_dot(g, s, out);
}

void export_dot(const ExtendedGraph& g, const Scenario& s,
                const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write DOT file '" + path.string() + "'");
  write_dot(g, s, out);
}

}  // namespace fin
