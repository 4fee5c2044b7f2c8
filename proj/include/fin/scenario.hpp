#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fin {

enum class Tier { kMobile, kEdge, kCloud, kSource };

std::string tier_name(Tier tier);
Tier tier_from_name(const std::string& name);

/// A compute/communication endpoint of the multi-tiered system. All values
/// are base SI (ops/s, W, bits/s, J/bit). Data sources have zero compute.
struct NetworkNode {
  std::string id;
  Tier tier = Tier::kMobile;
  double compute_capacity = 0.0;   // ops/s
  double compute_power = 0.0;      // W drawn while computing at full rate
  double idle_power = 0.0;         // W, stored but unused by the cost model
  double max_power = 0.0;          // W, stored but unused by the cost model
  double uplink_capacity = 0.0;    // bits/s
  double downlink_capacity = 0.0;  // bits/s
  double tx_energy_per_bit = 0.0;  // J/bit paid by the sender
  double rx_energy_per_bit = 0.0;  // J/bit paid by the receiver

  /// Joules per operation, derived as compute_power / compute_capacity.
  double compute_energy_per_op() const {
    return compute_capacity > 0.0 ? compute_power / compute_capacity : 0.0;
  }
};

/// Directed communication link. Bandwidth may be infinite; links from data
/// sources to their co-located node must be infinite.
struct Link {
  std::string from;
  std::string to;
  double bandwidth = 0.0;  // bits/s, may be +inf
};

/// Fraction of a node's compute and bandwidth (or of one link's bandwidth)
/// reserved for one application.
struct SliceShare {
  std::string application;
  std::string node;  // empty when the share targets a link
  std::optional<std::pair<std::string, std::string>> link;
  double compute_fraction = 1.0;
  double bandwidth_fraction = 1.0;
};

/// Early-exit head attached to a backbone block.
struct ExitPoint {
  int index = 0;                 // 1-based exit number within the model
  double ops = 0.0;              // operations executed by the exit head
  double output_fraction = 0.0;  // fraction of input samples leaving here
  double accuracy = 0.0;         // inference accuracy when terminating here
  double output_features = 0.0;  // feature count of the exit output
};

/// Unit of placement: a contiguous backbone section plus at most one exit.
struct DnnBlock {
  int index = 0;                 // 1-based position in the backbone
  double output_features = 0.0;  // features handed to the next block
  double ops = 0.0;              // backbone operations of this block
  std::optional<ExitPoint> exit;
};

struct Application {
  std::string id;
  std::vector<DnnBlock> model;
  double inference_rate = 1.0;    // inferences/s
  double target_accuracy = 1.0;   // in (0, 1]
  double target_latency = 0.0;    // s
  double bits_per_feature = 32.0; // tensor quantization width
  std::string source_node;

  int block_count() const { return static_cast<int>(model.size()); }
  const DnnBlock& block(int index) const;  // 1-based

  /// Blocks carrying an exit, in ascending order.
  std::vector<int> exit_blocks() const;
  /// Block of the deepest exit, 0 for a model with no exit.
  int last_exit_block() const;
};

/// Fraction of input samples still in flight after `block_index` blocks.
/// Complements the cumulative exit fractions; exactly 0 past the last exit.
double survival_fraction(const Application& app, int block_index);

struct Scenario {
  std::vector<NetworkNode> nodes;
  std::vector<Link> links;
  std::vector<SliceShare> slices;
  std::vector<Application> applications;

  /// Checks every invariant and rebuilds the lookup tables. Throws
  /// ValidationError naming the first violated invariant. A scenario is
  /// immutable once validated.
  void validate();

  int node_index(const std::string& id) const;  // -1 when unknown
  const NetworkNode& node(const std::string& id) const;
  const NetworkNode& node(int index) const { return nodes[index]; }
  const Application& application(const std::string& id) const;

  /// Compute fraction of `app` on `node`: the declared share, 0 when other
  /// shares are declared on the node, 1 when the node is unsliced.
  double compute_fraction(const std::string& app, const std::string& node) const;
  double bandwidth_fraction(const std::string& app, const std::string& from,
                            const std::string& to) const;
  const Link* find_link(const std::string& from, const std::string& to) const;

 private:
  std::map<std::string, int> node_lookup_;
  std::map<std::string, int> app_lookup_;
  std::map<std::pair<std::string, std::string>, int> link_lookup_;
  // node id -> (app id -> fractions); presence of any entry switches the
  // default for undeclared applications from 1 to 0.
  std::map<std::string, std::map<std::string, std::pair<double, double>>> node_shares_;
  std::map<std::pair<std::string, std::string>, std::map<std::string, double>> link_shares_;
};

/// Bandwidth of (n1, n2) allocated to application h: infinite on the self
/// loop, otherwise min(uplink, downlink, declared link bandwidth) times the
/// bandwidth fraction of h; 0 when no link is declared.
double effective_bandwidth(const Scenario& s, const std::string& app,
                           const std::string& n1, const std::string& n2);

/// Compute rate of `node` allocated to application h.
double effective_compute(const Scenario& s, const std::string& app,
                         const std::string& node);

Scenario load_scenario(const std::filesystem::path& path);
Scenario scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const Scenario& s, int indent = 2);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

}  // namespace fin
