#include "fin/feasible_graph.hpp"

#include <cmath>
#include <deque>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fin/errors.hpp"

namespace fin {

int depth_advance(double tc, double delta, int gamma) {
  if (tc <= 0.0) return 0;
  double raw = std::ceil(static_cast<double>(gamma) * tc / delta);
  if (raw > static_cast<double>(gamma)) return gamma + 1;  // never fits
  return static_cast<int>(raw);
}

FeasibleGraph build_feasible_graph(const ExtendedGraph& g, const Application& app,
                                   int gamma) {
  if (gamma < 1) throw Error("gamma must be at least 1");

  FeasibleGraph fg;
  fg.graph = g;
  fg.gamma = gamma;
  fg.out_edges.assign(static_cast<size_t>(fg.replica_count()), {});

  const double sigma = app.inference_rate;
  const double delta = app.target_latency;

  for (int ei = 0; ei < static_cast<int>(g.edges.size()); ++ei) {
    const ExtendedEdge& e = g.edges[static_cast<size_t>(ei)];
    const EdgeWeights& w = e.w;

    // Rate pruning: the carried sample stream must fit the slice shares.
    if (sigma * w.traversal_fraction * w.data_bits > w.link_capacity) continue;
    if (sigma * w.traversal_fraction * w.ops > w.compute_capacity) continue;

    const int advance = depth_advance(w.transfer_time + w.compute_time, delta, gamma);
    if (advance > gamma) continue;  // no replica can absorb this edge

    for (int g1 = 0; g1 + advance <= gamma; ++g1) {
      FeasibleEdge fe;
      fe.from = fg.replica_id(e.from, g1);
      fe.to = fg.replica_id(e.to, g1 + advance);
      fe.ext_edge = ei;
      fe.steepness = advance;
      fe.energy = w.traversal_fraction * w.energy;
      fg.out_edges[static_cast<size_t>(fe.from)].push_back(
          static_cast<int>(fg.edges.size()));
      fg.edges.push_back(fe);
    }
  }

  for (int src : g.source_vertices) {
    fg.source_replicas.push_back(fg.replica_id(src, 0));
  }
  for (int term : g.terminal_vertices) {
    for (int depth = 0; depth <= gamma; ++depth) {
      fg.terminal_replicas.push_back(fg.replica_id(term, depth));
    }
  }

  // Reachability from the depth-0 sources decides whether the instance is
  // solvable at this resolution.
  std::vector<char> reached(static_cast<size_t>(fg.replica_count()), 0);
  std::deque<int> queue;
  for (int src : fg.source_replicas) {
    reached[static_cast<size_t>(src)] = 1;
    queue.push_back(src);
  }
  while (!queue.empty()) {
    int r = queue.front();
    queue.pop_front();
    for (int fei : fg.out_edges[static_cast<size_t>(r)]) {
      int to = fg.edges[static_cast<size_t>(fei)].to;
      if (!reached[static_cast<size_t>(to)]) {
        reached[static_cast<size_t>(to)] = 1;
        queue.push_back(to);
      }
    }
  }
  bool any_terminal = false;
  for (int term : fg.terminal_replicas) {
    if (reached[static_cast<size_t>(term)]) {
      any_terminal = true;
      break;
    }
  }
  fg.set_unreachable(!any_terminal);
  return fg;
}

int steepness(const FeasibleGraph& fg, std::span<const int> replica_path) {
  if (replica_path.empty()) return 0;
  for (size_t i = 0; i + 1 < replica_path.size(); ++i) {
    bool connected = false;
    for (int fei : fg.out_edges[static_cast<size_t>(replica_path[i])]) {
      if (fg.edges[static_cast<size_t>(fei)].to == replica_path[i + 1]) {
        connected = true;
        break;
      }
    }
    if (!connected) {
      throw Error("steepness: replica sequence is not a connected path");
    }
  }
  return fg.replica_depth(replica_path.back()) -
         fg.replica_depth(replica_path.front());
}

namespace {

void write_dot(const FeasibleGraph& fg, const Scenario& s, std::ostream& out) {
  out << "digraph feasible {\n";
  out << "  rankdir=LR;\n";
  std::vector<char> used(static_cast<size_t>(fg.replica_count()), 0);
  for (const FeasibleEdge& e : fg.edges) {
    used[static_cast<size_t>(e.from)] = 1;
    used[static_cast<size_t>(e.to)] = 1;
  }
  for (int r = 0; r < fg.replica_count(); ++r) {
    if (!used[static_cast<size_t>(r)]) continue;
    const Vertex& v = fg.graph.vertices[static_cast<size_t>(fg.replica_vertex(r))];
    const std::string& node_id = s.nodes[static_cast<size_t>(v.node)].id;
    out << "  r" << r << " [label=\"" << node_id;
    if (v.block > 0) out << "," << v.block;
    out << " g=" << fg.replica_depth(r) << "\"];\n";
  }
  for (const FeasibleEdge& e : fg.edges) {
    const EdgeWeights& w = fg.graph.edges[static_cast<size_t>(e.ext_edge)].w;
    std::ostringstream label;
    label << w.transfer_time << "|" << w.compute_time << "|" << w.energy;
    out << "  r" << e.from << " -> r" << e.to << " [label=\"" << label.str()
        << "\"];\n";
  }
  out << "}\n";
}

}  // namespace

void export_dot(const FeasibleGraph& fg, const Scenario& s, std::ostream& out) {
  write_dot(fg, s, out);
}

void export_dot(const FeasibleGraph& fg, const Scenario& s,
                const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write DOT file '" + path.string() + "'");
  write_dot(fg, s, out);
}

}  // namespace fin
