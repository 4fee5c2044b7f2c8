#include "fin/evaluation.hpp"

#include <cmath>
#include <limits>

#include "fin/errors.hpp"

namespace fin {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

EvaluationReport evaluate(const Scenario& s, const std::string& app_id,
                          const Configuration& cfg, TraversalMode mode) {
  const Application& app = s.application(app_id);

  if (cfg.placements.empty()) {
    throw Error("configuration for '" + app_id + "' has no placements");
  }
  for (int i = 0; i < static_cast<int>(cfg.placements.size()); ++i) {
    const auto& [block, node_id] = cfg.placements[static_cast<size_t>(i)];
    if (block != i + 1) {
      throw Error("configuration blocks must be consecutive from 1");
    }
    if (s.node_index(node_id) < 0) {
      throw Error("configuration places block " + std::to_string(block) +
                  " on unknown node '" + node_id + "'");
    }
  }
  const int last_block = static_cast<int>(cfg.placements.size());
  const DnnBlock& terminal = app.block(last_block);
  if (!terminal.exit) {
    throw Error("configuration ends at block " + std::to_string(last_block) +
                " which carries no exit");
  }
  if (cfg.exit_index != 0 && cfg.exit_index != terminal.exit->index) {
    throw Error("configuration exit index does not match its final block");
  }

  const double sigma = app.inference_rate;
  const double delta = app.target_latency;

  EvaluationReport report;
  report.exit_index = terminal.exit->index;
  report.accuracy = terminal.exit->accuracy;

  double latency = 0.0;
  double comm_j = 0.0;
  double compute_j = 0.0;
  double min_compute_slack = kInf;
  double min_bandwidth_slack = kInf;

  std::string prev = app.source_node;
  for (int block = 1; block <= last_block; ++block) {
    const std::string& host = cfg.placements[static_cast<size_t>(block - 1)].second;
    const DnnBlock& b = app.block(block);

    const double data_bits =
        block == 1 ? 0.0
                   : app.block(block - 1).output_features * app.bits_per_feature;
    const double ops = b.ops + (b.exit ? b.exit->ops : 0.0);

    const double bandwidth = effective_bandwidth(s, app_id, prev, host);
    const double compute = effective_compute(s, app_id, host);

    const double transfer_time =
        data_bits > 0.0 ? (bandwidth > 0.0 ? data_bits / bandwidth : kInf) : 0.0;
    const double compute_time =
        ops > 0.0 ? (compute > 0.0 ? ops / compute : kInf) : 0.0;

    double traversal = 1.0;
    if (mode == TraversalMode::kSurvival) {
      traversal = block == 1 ? 1.0 : survival_fraction(app, block - 1);
    } else {
      const bool tail_has_exit =
          block > 1 && app.block(block - 1).exit.has_value();
      traversal =
          tail_has_exit ? app.block(block - 1).exit->output_fraction : 0.0;
    }

    const NetworkNode& sender = s.node(prev);
    const NetworkNode& receiver = s.node(host);
    const double comm_e =
        prev == host ? 0.0
                     : (sender.tx_energy_per_bit + receiver.rx_energy_per_bit) *
                           data_bits;
    const double compute_e = receiver.compute_energy_per_op() * ops;

    latency += transfer_time + compute_time;
    comm_j += traversal * comm_e;
    compute_j += traversal * compute_e;

    if (prev != host) {
      // A hop between distinct nodes needs a usable link; a configuration
      // whose hop has none is not a path from the source at all.
      if (!(bandwidth > 0.0)) {
        min_bandwidth_slack = -kInf;
      } else {
        min_bandwidth_slack = std::min(
            min_bandwidth_slack, bandwidth - sigma * traversal * data_bits);
      }
    }
    min_compute_slack =
        std::min(min_compute_slack, compute - sigma * traversal * ops);

    prev = host;
  }

  report.latency_s = latency;
  report.comm_energy_j = comm_j;
  report.compute_energy_j = compute_j;
  report.total_energy_j = comm_j + compute_j;
  report.comm_energy_w = sigma * comm_j;
  report.compute_energy_w = sigma * compute_j;
  report.total_energy_w = report.comm_energy_w + report.compute_energy_w;

  report.latency_ok = {latency <= delta, delta - latency};
  report.accuracy_ok = {report.accuracy >= app.target_accuracy,
                        report.accuracy - app.target_accuracy};
  report.compute_rate_ok = {min_compute_slack >= 0.0, min_compute_slack};
  report.bandwidth_rate_ok = {min_bandwidth_slack >= 0.0, min_bandwidth_slack};

  for (const auto& [block, node_id] : cfg.placements) {
    switch (s.node(node_id).tier) {
      case Tier::kMobile: ++report.blocks_mobile; break;
      case Tier::kEdge: ++report.blocks_edge; break;
      case Tier::kCloud: ++report.blocks_cloud; break;
      case Tier::kSource: break;
    }
  }
  return report;
}

}  // namespace fin
