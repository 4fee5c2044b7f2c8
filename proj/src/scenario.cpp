#include "fin/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "fin/errors.hpp"
#include "fin/units.hpp"

namespace fin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSumTolerance = 1e-9;

using nlohmann::json;
using nlohmann::ordered_json;
using units::Dimension;

double get_quantity(const json& obj, const std::string& key, Dimension dim,
                    std::optional<double> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ParseError("missing field '" + key + "'");
  }
  const json& v = obj.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return units::parse_quantity(v.get<std::string>(), dim);
  throw ParseError("field '" + key + "' must be a number or quantity string");
}

std::string get_string(const json& obj, const std::string& key) {
  if (!obj.contains(key) || !obj.at(key).is_string()) {
    throw ParseError("missing string field '" + key + "'");
  }
  return obj.at(key).get<std::string>();
}

json quantity_out(double value) {
  if (std::isinf(value)) return json("inf");
  return json(value);
}

}  // namespace

std::string tier_name(Tier tier) {
  switch (tier) {
    case Tier::kMobile: return "mobile";
    case Tier::kEdge: return "edge";
    case Tier::kCloud: return "cloud";
    case Tier::kSource: return "source";
  }
  return "unknown";
}

Tier tier_from_name(const std::string& name) {
  if (name == "mobile") return Tier::kMobile;
  if (name == "edge") return Tier::kEdge;
  if (name == "cloud") return Tier::kCloud;
  if (name == "source") return Tier::kSource;
  throw ParseError("unknown tier '" + name + "'");
}

const DnnBlock& Application::block(int index) const {
  if (index < 1 || index > block_count()) {
    throw Error("block index " + std::to_string(index) + " out of range for '" +
                id + "'");
  }
  return model[static_cast<size_t>(index - 1)];
}

std::vector<int> Application::exit_blocks() const {
  std::vector<int> blocks;
  for (const auto& b : model) {
    if (b.exit) blocks.push_back(b.index);
  }
  return blocks;
}

int Application::last_exit_block() const {
  int last = 0;
  for (const auto& b : model) {
    if (b.exit) last = b.index;
  }
  return last;
}

double survival_fraction(const Application& app, int block_index) {
  if (block_index < 1 || block_index > app.block_count()) {
    throw Error("survival_fraction: block index " + std::to_string(block_index) +
                " out of range for '" + app.id + "'");
  }
  if (block_index >= app.last_exit_block()) {
    return 0.0;  // everything has exited once the final exit is passed
  }
  double survival = 1.0;
  for (const auto& b : app.model) {
    if (b.index > block_index) break;
    if (b.exit) survival -= b.exit->output_fraction;
  }
  return std::clamp(survival, 0.0, 1.0);
}

void Scenario::validate() {
  node_lookup_.clear();
  app_lookup_.clear();
  link_lookup_.clear();
  node_shares_.clear();
  link_shares_.clear();

  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
    const NetworkNode& n = nodes[static_cast<size_t>(i)];
    if (n.id.empty()) throw ValidationError("node with empty id");
    if (!node_lookup_.emplace(n.id, i).second) {
      throw ValidationError("duplicate node id '" + n.id + "'");
    }
    if (n.compute_capacity < 0) {
      throw ValidationError("node '" + n.id + "': negative compute capacity");
    }
    if (n.tier == Tier::kSource && n.compute_capacity != 0.0) {
      throw ValidationError("node '" + n.id +
                            "': data sources have no compute capability");
    }
    if (n.compute_power < 0 || n.idle_power < 0 || n.max_power < 0 ||
        n.tx_energy_per_bit < 0 || n.rx_energy_per_bit < 0) {
      throw ValidationError("node '" + n.id + "': negative power or energy field");
    }
    if (n.max_power < n.idle_power) {
      throw ValidationError("node '" + n.id + "': max_power below idle_power");
    }
    if (n.uplink_capacity < 0 || n.downlink_capacity < 0) {
      throw ValidationError("node '" + n.id + "': negative link capacity");
    }
  }

  for (const Link& l : links) {
    if (node_lookup_.find(l.from) == node_lookup_.end()) {
      throw ValidationError("link references unknown node '" + l.from + "'");
    }
    if (node_lookup_.find(l.to) == node_lookup_.end()) {
      throw ValidationError("link references unknown node '" + l.to + "'");
    }
    if (l.from == l.to && !std::isinf(l.bandwidth)) {
      throw ValidationError("self loop link on '" + l.from +
                            "' must have infinite bandwidth");
    }
    if (node(l.from).tier == Tier::kSource && !std::isinf(l.bandwidth)) {
      throw ValidationError("link from data source '" + l.from +
                            "' must have infinite bandwidth");
    }
    if (l.bandwidth < 0) {
      throw ValidationError("link " + l.from + "->" + l.to +
                            ": negative bandwidth");
    }
    auto key = std::make_pair(l.from, l.to);
    if (link_lookup_.count(key)) {
      throw ValidationError("duplicate link " + l.from + "->" + l.to);
    }
    link_lookup_[key] = static_cast<int>(&l - links.data());
  }

  for (int i = 0; i < static_cast<int>(applications.size()); ++i) {
    const Application& a = applications[static_cast<size_t>(i)];
    if (a.id.empty()) throw ValidationError("application with empty id");
    if (!app_lookup_.emplace(a.id, i).second) {
      throw ValidationError("duplicate application id '" + a.id + "'");
    }
    if (a.inference_rate < 0) {
      throw ValidationError("application '" + a.id + "': negative inference rate");
    }
    if (!(a.target_accuracy > 0.0 && a.target_accuracy <= 1.0)) {
      throw ValidationError("application '" + a.id +
                            "': target accuracy must be in (0, 1]");
    }
    if (!(a.target_latency > 0.0)) {
      throw ValidationError("application '" + a.id +
                            "': target latency must be positive");
    }
    if (!(a.bits_per_feature > 0.0)) {
      throw ValidationError("application '" + a.id +
                            "': bits per feature must be positive");
    }
    auto src = node_lookup_.find(a.source_node);
    if (src == node_lookup_.end()) {
      throw ValidationError("application '" + a.id + "': unknown source node '" +
                            a.source_node + "'");
    }
    Tier src_tier = nodes[static_cast<size_t>(src->second)].tier;
    if (src_tier != Tier::kSource && src_tier != Tier::kMobile) {
      throw ValidationError("application '" + a.id +
                            "': source node must be a data source or mobile node");
    }
    if (a.model.empty()) {
      throw ValidationError("application '" + a.id + "': empty model");
    }
    double fraction_sum = 0.0;
    int last_exit_index = 0;
    for (int bi = 0; bi < static_cast<int>(a.model.size()); ++bi) {
      const DnnBlock& b = a.model[static_cast<size_t>(bi)];
      if (b.index != bi + 1) {
        throw ValidationError("application '" + a.id + "': block indices must be 1.." +
                              std::to_string(a.model.size()) + " in order");
      }
      if (b.output_features < 0 || b.ops < 0) {
        throw ValidationError("application '" + a.id + "': block " +
                              std::to_string(b.index) + " has negative weights");
      }
      if (b.exit) {
        const ExitPoint& e = *b.exit;
        if (e.index != last_exit_index + 1) {
          throw ValidationError("application '" + a.id +
                                "': exit indices must increase consecutively");
        }
        last_exit_index = e.index;
        if (e.output_fraction < 0.0 || e.output_fraction > 1.0) {
          throw ValidationError("application '" + a.id + "': exit " +
                                std::to_string(e.index) +
                                " output fraction outside [0, 1]");
        }
        if (e.accuracy < 0.0 || e.accuracy > 1.0) {
          throw ValidationError("application '" + a.id + "': exit " +
                                std::to_string(e.index) +
                                " accuracy outside [0, 1]");
        }
        if (e.ops < 0) {
          throw ValidationError("application '" + a.id + "': exit " +
                                std::to_string(e.index) + " has negative ops");
        }
        fraction_sum += e.output_fraction;
      }
    }
    if (last_exit_index == 0) {
      throw ValidationError("application '" + a.id + "': model declares no exit");
    }
    if (std::abs(fraction_sum - 1.0) > kSumTolerance) {
      throw ValidationError("application '" + a.id +
                            "': exit output fractions must sum to 1, got " +
                            std::to_string(fraction_sum));
    }
  }

  // Slice shares: resolve references, then check per-object sums.
  for (const SliceShare& s : slices) {
    if (app_lookup_.find(s.application) == app_lookup_.end()) {
      throw ValidationError("slice references unknown application '" +
                            s.application + "'");
    }
    if (s.compute_fraction < 0.0 || s.compute_fraction > 1.0 ||
        s.bandwidth_fraction < 0.0 || s.bandwidth_fraction > 1.0) {
      throw ValidationError("slice for '" + s.application +
                            "': fractions must lie in [0, 1]");
    }
    if (!s.node.empty()) {
      if (node_lookup_.find(s.node) == node_lookup_.end()) {
        throw ValidationError("slice references unknown node '" + s.node + "'");
      }
      auto& per_app = node_shares_[s.node];
      if (per_app.count(s.application)) {
        throw ValidationError("duplicate slice for application '" +
                              s.application + "' on node '" + s.node + "'");
      }
      per_app[s.application] = {s.compute_fraction, s.bandwidth_fraction};
    } else if (s.link) {
      if (node_lookup_.find(s.link->first) == node_lookup_.end() ||
          node_lookup_.find(s.link->second) == node_lookup_.end()) {
        throw ValidationError("slice references unknown link endpoint");
      }
      auto& per_app = link_shares_[*s.link];
      if (per_app.count(s.application)) {
        throw ValidationError("duplicate link slice for application '" +
                              s.application + "'");
      }
      per_app[s.application] = s.bandwidth_fraction;
    } else {
      throw ValidationError("slice for '" + s.application +
                            "' targets neither a node nor a link");
    }
  }
  for (const auto& [node_id, per_app] : node_shares_) {
    double compute_sum = 0.0;
    double bandwidth_sum = 0.0;
    for (const auto& [app, fractions] : per_app) {
      compute_sum += fractions.first;
      bandwidth_sum += fractions.second;
    }
    if (compute_sum > 1.0 + kSumTolerance) {
      throw ValidationError("node '" + node_id +
                            "': compute slice fractions sum to " +
                            std::to_string(compute_sum));
    }
    if (bandwidth_sum > 1.0 + kSumTolerance) {
      throw ValidationError("node '" + node_id +
                            "': bandwidth slice fractions sum to " +
                            std::to_string(bandwidth_sum));
    }
  }
  for (const auto& [link_key, per_app] : link_shares_) {
    double sum = 0.0;
    for (const auto& [app, fraction] : per_app) sum += fraction;
    if (sum > 1.0 + kSumTolerance) {
      throw ValidationError("link " + link_key.first + "->" + link_key.second +
                            ": bandwidth slice fractions sum to " +
                            std::to_string(sum));
    }
  }
}

int Scenario::node_index(const std::string& id) const {
  auto it = node_lookup_.find(id);
  return it == node_lookup_.end() ? -1 : it->second;
}

const NetworkNode& Scenario::node(const std::string& id) const {
  int idx = node_index(id);
  if (idx < 0) throw Error("unknown node '" + id + "'");
  return nodes[static_cast<size_t>(idx)];
}

const Application& Scenario::application(const std::string& id) const {
  auto it = app_lookup_.find(id);
  if (it == app_lookup_.end()) throw Error("unknown application '" + id + "'");
  return applications[static_cast<size_t>(it->second)];
}

double Scenario::compute_fraction(const std::string& app,
                                  const std::string& node_id) const {
  auto it = node_shares_.find(node_id);
  if (it == node_shares_.end()) return 1.0;
  auto app_it = it->second.find(app);
  return app_it == it->second.end() ? 0.0 : app_it->second.first;
}

double Scenario::bandwidth_fraction(const std::string& app,
                                    const std::string& from,
                                    const std::string& to) const {
  auto link_it = link_shares_.find({from, to});
  if (link_it != link_shares_.end()) {
    auto app_it = link_it->second.find(app);
    return app_it == link_it->second.end() ? 0.0 : app_it->second;
  }
  auto endpoint_fraction = [&](const std::string& node_id) {
    auto it = node_shares_.find(node_id);
    if (it == node_shares_.end()) return 1.0;
    auto app_it = it->second.find(app);
    return app_it == it->second.end() ? 0.0 : app_it->second.second;
  };
  return std::min(endpoint_fraction(from), endpoint_fraction(to));
}

const Link* Scenario::find_link(const std::string& from,
                                const std::string& to) const {
  auto it = link_lookup_.find({from, to});
  return it == link_lookup_.end() ? nullptr : &links[static_cast<size_t>(it->second)];
}

double effective_bandwidth(const Scenario& s, const std::string& app,
                           const std::string& n1, const std::string& n2) {
  s.application(app);  // reject unknown application ids
  const NetworkNode& a = s.node(n1);
  const NetworkNode& b = s.node(n2);
  if (n1 == n2) return kInf;
  const Link* link = s.find_link(n1, n2);
  if (link == nullptr) return 0.0;
  double capacity = std::min(std::min(a.uplink_capacity, b.downlink_capacity),
                             link->bandwidth);
  if (std::isinf(capacity)) return kInf;
  return capacity * s.bandwidth_fraction(app, n1, n2);
}

double effective_compute(const Scenario& s, const std::string& app,
                         const std::string& node_id) {
  s.application(app);
  const NetworkNode& n = s.node(node_id);
  return n.compute_capacity * s.compute_fraction(app, node_id);
}

namespace {

NetworkNode node_from_json(const json& j) {
  NetworkNode n;
  n.id = get_string(j, "id");
  n.tier = tier_from_name(get_string(j, "tier"));
  n.compute_capacity = get_quantity(j, "compute_capacity", Dimension::kOpsRate, 0.0);
  n.compute_power = get_quantity(j, "compute_power", Dimension::kPower, 0.0);
  n.idle_power = get_quantity(j, "idle_power", Dimension::kPower, 0.0);
  n.max_power = get_quantity(j, "max_power", Dimension::kPower, n.idle_power);
  n.uplink_capacity = get_quantity(j, "uplink_capacity", Dimension::kBandwidth, 0.0);
  n.downlink_capacity =
      get_quantity(j, "downlink_capacity", Dimension::kBandwidth, 0.0);
  n.tx_energy_per_bit =
      get_quantity(j, "tx_energy_per_bit", Dimension::kEnergyPerBit, 0.0);
  n.rx_energy_per_bit =
      get_quantity(j, "rx_energy_per_bit", Dimension::kEnergyPerBit, 0.0);
  return n;
}

Application application_from_json(const json& j) {
  Application a;
  a.id = get_string(j, "id");
  a.source_node = get_string(j, "source_node");
  a.inference_rate = get_quantity(j, "inference_rate", Dimension::kRate, 1.0);
  a.target_accuracy =
      get_quantity(j, "target_accuracy", Dimension::kDimensionless);
  a.target_latency = get_quantity(j, "target_latency", Dimension::kTime);
  a.bits_per_feature = get_quantity(j, "bits_per_feature", Dimension::kBits, 32.0);
  if (!j.contains("model") || !j.at("model").is_object() ||
      !j.at("model").contains("blocks")) {
    throw ParseError("application '" + a.id + "': missing model.blocks");
  }
  int index = 0;
  for (const json& bj : j.at("model").at("blocks")) {
    DnnBlock b;
    b.index = ++index;
    b.output_features = get_quantity(bj, "features", Dimension::kDimensionless);
    b.ops = get_quantity(bj, "ops", Dimension::kOps);
    if (bj.contains("exit")) {
      const json& ej = bj.at("exit");
      ExitPoint e;
      e.index = static_cast<int>(
          get_quantity(ej, "index", Dimension::kDimensionless));
      e.ops = get_quantity(ej, "ops", Dimension::kOps);
      e.output_fraction = get_quantity(ej, "fraction", Dimension::kDimensionless);
      e.accuracy = get_quantity(ej, "accuracy", Dimension::kDimensionless);
      e.output_features =
          get_quantity(ej, "features", Dimension::kDimensionless, 0.0);
      b.exit = e;
    }
    a.model.push_back(std::move(b));
  }
  return a;
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("scenario must be a JSON object");

  Scenario s;
  try {
    for (const json& nj : doc.value("nodes", json::array())) {
      s.nodes.push_back(node_from_json(nj));
    }
    for (const json& lj : doc.value("links", json::array())) {
      Link l;
      l.from = get_string(lj, "from");
      l.to = get_string(lj, "to");
      l.bandwidth = get_quantity(lj, "bandwidth", Dimension::kBandwidth, kInf);
      s.links.push_back(std::move(l));
    }
    for (const json& sj : doc.value("slices", json::array())) {
      SliceShare share;
      share.application = get_string(sj, "application");
      if (sj.contains("node")) {
        share.node = get_string(sj, "node");
      } else if (sj.contains("link")) {
        const json& lj = sj.at("link");
        if (!lj.is_array() || lj.size() != 2) {
          throw ParseError("slice link must be a [from, to] pair");
        }
        share.link = {lj.at(0).get<std::string>(), lj.at(1).get<std::string>()};
      }
      share.compute_fraction =
          get_quantity(sj, "compute_fraction", Dimension::kDimensionless, 1.0);
      share.bandwidth_fraction =
          get_quantity(sj, "bandwidth_fraction", Dimension::kDimensionless, 1.0);
      s.slices.push_back(std::move(share));
    }
    for (const json& aj : doc.value("applications", json::array())) {
      s.applications.push_back(application_from_json(aj));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed scenario: ") + e.what());
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open scenario file '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return scenario_from_json_text(buffer.str());
}

std::string scenario_to_json_text(const Scenario& s, int indent) {
  ordered_json doc;
  doc["nodes"] = ordered_json::array();
  for (const NetworkNode& n : s.nodes) {
    ordered_json nj;
    nj["id"] = n.id;
    nj["tier"] = tier_name(n.tier);
    nj["compute_capacity"] = quantity_out(n.compute_capacity);
    nj["compute_power"] = quantity_out(n.compute_power);
    nj["idle_power"] = quantity_out(n.idle_power);
    nj["max_power"] = quantity_out(n.max_power);
    nj["uplink_capacity"] = quantity_out(n.uplink_capacity);
    nj["downlink_capacity"] = quantity_out(n.downlink_capacity);
    nj["tx_energy_per_bit"] = quantity_out(n.tx_energy_per_bit);
    nj["rx_energy_per_bit"] = quantity_out(n.rx_energy_per_bit);
    doc["nodes"].push_back(std::move(nj));
  }
  doc["links"] = ordered_json::array();
  for (const Link& l : s.links) {
    ordered_json lj;
    lj["from"] = l.from;
    lj["to"] = l.to;
    lj["bandwidth"] = quantity_out(l.bandwidth);
    doc["links"].push_back(std::move(lj));
  }
  doc["slices"] = ordered_json::array();
  for (const SliceShare& share : s.slices) {
    ordered_json sj;
    sj["application"] = share.application;
    if (!share.node.empty()) {
      sj["node"] = share.node;
    } else if (share.link) {
      sj["link"] = {share.link->first, share.link->second};
    }
    sj["compute_fraction"] = share.compute_fraction;
    sj["bandwidth_fraction"] = share.bandwidth_fraction;
    doc["slices"].push_back(std::move(sj));
  }
  doc["applications"] = ordered_json::array();
  for (const Application& a : s.applications) {
    ordered_json aj;
    aj["id"] = a.id;
    aj["source_node"] = a.source_node;
    aj["inference_rate"] = a.inference_rate;
    aj["target_accuracy"] = a.target_accuracy;
    aj["target_latency"] = a.target_latency;
    aj["bits_per_feature"] = a.bits_per_feature;
    ordered_json blocks = ordered_json::array();
    for (const DnnBlock& b : a.model) {
      ordered_json bj;
      bj["features"] = b.output_features;
      bj["ops"] = b.ops;
      if (b.exit) {
        ordered_json ej;
        ej["index"] = b.exit->index;
        ej["ops"] = b.exit->ops;
        ej["fraction"] = b.exit->output_fraction;
        ej["accuracy"] = b.exit->accuracy;
        ej["features"] = b.exit->output_features;
        bj["exit"] = std::move(ej);
      }
      blocks.push_back(std::move(bj));
    }
    aj["model"] = ordered_json::object();
    aj["model"]["blocks"] = std::move(blocks);
    doc["applications"].push_back(std::move(aj));
  }
  return doc.dump(indent) + "\n";
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write scenario file '" + path.string() + "'");
  out << scenario_to_json_text(s);
}

}  // namespace fin
