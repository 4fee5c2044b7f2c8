#pragma once

#include <string>
#include <vector>

#include "fin/harness.hpp"

namespace fin {

/// Shortest round-trip decimal rendering of a double ("inf" for infinities).
std::string format_double(double value);

/// Fixed CSV header shared by sweep and multi-app outputs.
extern const char* kCsvHeader;

std::string result_row_to_csv(const ResultRow& row);
std::string rows_to_csv(const std::vector<ResultRow>& rows);

/// CSV plus a trailing comment block with the aggregate statistics.
std::string multi_app_to_csv(const MultiAppResult& result);

/// One JSON object with the run parameters, configuration, and report.
std::string solve_result_to_json(const ResultRow& row, int indent = 2);

std::string report_to_json(const EvaluationReport& report, int indent = 2);

/// Parses one CSV data row back into a ResultRow (report fields only).
ResultRow result_row_from_csv(const std::string& line);

}  // namespace fin
