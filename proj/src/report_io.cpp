#include "fin/report_io.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "fin/errors.hpp"

namespace fin {

using nlohmann::ordered_json;

const char* kCsvHeader =
    "algorithm,app,gamma,lambda,axis,value,feasible,exit,latency_ms,"
    "accuracy_pct,total_mJ,comm_mJ,compute_mJ,blocks_mobile,blocks_edge,"
    "blocks_cloud,wall_ms";

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "0";
  return std::string(buf, ptr);
}

namespace {

ordered_json configuration_to_json(const Configuration& cfg) {
  ordered_json j;
  j["application"] = cfg.application;
  j["algorithm"] = algorithm_name(cfg.algorithm);
  j["exit_index"] = cfg.exit_index;
  j["placements"] = ordered_json::array();
  for (const auto& [block, node] : cfg.placements) {
    ordered_json p;
    p["block"] = block;
    p["node"] = node;
    j["placements"].push_back(std::move(p));
  }
  return j;
}

ordered_json verdict_to_json(const ConstraintVerdict& v) {
  ordered_json j;
  j["ok"] = v.ok;
  if (std::isinf(v.slack)) {
    j["slack"] = v.slack > 0 ? "inf" : "-inf";
  } else {
    j["slack"] = v.slack;
  }
  return j;
}

ordered_json report_to_json_obj(const EvaluationReport& r) {
  ordered_json j;
  j["total_energy_w"] = r.total_energy_w;
  j["comm_energy_w"] = r.comm_energy_w;
  j["compute_energy_w"] = r.compute_energy_w;
  j["total_energy_mj_per_inference"] = r.total_energy_j * 1e3;
  j["comm_energy_mj_per_inference"] = r.comm_energy_j * 1e3;
  j["compute_energy_mj_per_inference"] = r.compute_energy_j * 1e3;
  j["latency_ms"] = r.latency_s * 1e3;
  j["accuracy"] = r.accuracy;
  j["exit_index"] = r.exit_index;
  j["feasible"] = r.feasible();
  j["constraints"] = ordered_json::object();
  j["constraints"]["latency"] = verdict_to_json(r.latency_ok);
  j["constraints"]["accuracy"] = verdict_to_json(r.accuracy_ok);
  j["constraints"]["compute_rate"] = verdict_to_json(r.compute_rate_ok);
  j["constraints"]["bandwidth_rate"] = verdict_to_json(r.bandwidth_rate_ok);
  j["deployment"] = ordered_json::object();
  j["deployment"]["mobile"] = r.blocks_mobile;
  j["deployment"]["edge"] = r.blocks_edge;
  j["deployment"]["cloud"] = r.blocks_cloud;
  return j;
}

}  // namespace

std::string report_to_json(const EvaluationReport& report, int indent) {
  return report_to_json_obj(report).dump(indent) + "\n";
}

std::string solve_result_to_json(const ResultRow& row, int indent) {
  ordered_json j;
  j["algorithm"] = row.algorithm;
  j["application"] = row.application;
  j["gamma"] = row.gamma;
  j["lambda"] = row.lambda;
  j["feasible"] = row.feasible;
  if (row.configuration) {
    j["configuration"] = configuration_to_json(*row.configuration);
    j["report"] = report_to_json_obj(row.report);
  } else {
    j["configuration"] = nullptr;
    j["report"] = nullptr;
  }
  return j.dump(indent) + "\n";
}

std::string result_row_to_csv(const ResultRow& row) {
  std::ostringstream out;
  out << row.algorithm << ',' << row.application << ',' << row.gamma << ','
      << row.lambda << ',' << row.axis << ',' << format_double(row.value) << ','
      << (row.feasible ? 1 : 0) << ',' << row.report.exit_index << ','
      << format_double(row.report.latency_s * 1e3) << ','
      << format_double(row.report.accuracy * 100.0) << ','
      << format_double(row.report.total_energy_j * 1e3) << ','
      << format_double(row.report.comm_energy_j * 1e3) << ','
      << format_double(row.report.compute_energy_j * 1e3) << ','
      << row.report.blocks_mobile << ',' << row.report.blocks_edge << ','
      << row.report.blocks_cloud << ',' << format_double(row.wall_ms);
  return out.str();
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const ResultRow& row : rows) out << result_row_to_csv(row) << '\n';
  return out.str();
}

std::string multi_app_to_csv(const MultiAppResult& result) {
  std::ostringstream out;
  out << rows_to_csv(result.rows);
  const MultiAppAggregate& agg = result.aggregate;
  for (const auto& [algo, value] : agg.failure_probability) {
    out << "# aggregate,failure_probability," << algo << ",*,"
        << format_double(value) << '\n';
  }
  for (const auto& [key, value] : agg.failure_probability_per_app) {
    out << "# aggregate,failure_probability," << key.first << ',' << key.second
        << ',' << format_double(value) << '\n';
  }
  for (const auto& [algo, value] : agg.total_energy_w) {
    out << "# aggregate,total_energy_w," << algo << ",*," << format_double(value)
        << '\n';
  }
  for (const auto& [algo, value] : agg.energy_ratio_vs_mcp) {
    out << "# aggregate,energy_ratio_vs_mcp," << algo << ",*,"
        << format_double(value) << '\n';
  }
  for (const auto& [key, value] : agg.deployment_share) {
    out << "# aggregate,deployment_share," << key.first << ',' << key.second
        << ',' << format_double(value) << '\n';
  }
  for (const auto& [key, value] : agg.exit_share) {
    out << "# aggregate,exit_share," << key.first << ",exit-" << key.second
        << ',' << format_double(value) << '\n';
  }
  return out.str();
}

ResultRow result_row_from_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (fields.size() != 17) {
    throw ParseError("CSV row has " + std::to_string(fields.size()) +
                     " fields, expected 17");
  }
  auto to_double = [](const std::string& text) {
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc()) throw ParseError("bad number '" + text + "' in CSV");
    return value;
  };
  ResultRow row;
  row.algorithm = fields[0];
  row.application = fields[1];
  row.gamma = static_cast<int>(to_double(fields[2]));
  row.lambda = static_cast<int>(to_double(fields[3]));
  row.axis = fields[4];
  row.value = to_double(fields[5]);
  row.feasible = fields[6] == "1";
  row.report.exit_index = static_cast<int>(to_double(fields[7]));
  row.report.latency_s = to_double(fields[8]) / 1e3;
  row.report.accuracy = to_double(fields[9]) / 100.0;
  row.report.total_energy_j = to_double(fields[10]) / 1e3;
  row.report.comm_energy_j = to_double(fields[11]) / 1e3;
  row.report.compute_energy_j = to_double(fields[12]) / 1e3;
  row.report.blocks_mobile = static_cast<int>(to_double(fields[13]));
  row.report.blocks_edge = static_cast<int>(to_double(fields[14]));
  row.report.blocks_cloud = static_cast<int>(to_double(fields[15]));
  row.wall_ms = to_double(fields[16]);
  return row;
}

}  // namespace fin
